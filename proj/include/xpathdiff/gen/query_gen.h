#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "xpathdiff/eval/evaluator.h"
#include "xpathdiff/util/rng.h"
#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::gen {

enum class Mode : std::uint8_t { kTargeted, kUntargeted };

std::string_view mode_name(Mode m);
std::optional<Mode> mode_from_name(std::string_view name);

struct GenConfig {
  std::size_t min_sections = 1;
  std::size_t max_sections = 7;
  std::size_t min_predicates = 0;
  std::size_t max_predicates = 2;
  std::size_t max_subjects = 10;
  std::size_t max_depth = 10;
  std::size_t queries_per_doc = 200;
  Mode mode = Mode::kTargeted;
  bool rectify = true;
  xpath::Standard standard = xpath::Standard::kV1_0;
  double wildcard_prob = 0.3;
  double equal_operand_prob = 0.5;
  double not_wrap_prob = 0.5;
  double positional_prob = 0.2;
  /// Share of predicates whose subject is the targeted node itself (`.`,
  /// an attribute, text()) rather than a sequence derived from it.
  double subject_kind_prob = 0.5;
  bool enable_has_children = false;
  bool enable_child_paths = true;
  /// Attempts per predicate before it is dropped because the designated
  /// evaluator raised an error on some candidate.
  std::size_t predicate_attempts = 4;

  /// Throws std::invalid_argument.
  void validate() const;
};

/// Focus of the targeted node inside the group it was picked from.
struct PredicateSite {
  xml::NodeId target;
  std::size_t position = 1;
  std::size_t size = 1;
  xpath::Standard standard = xpath::Standard::kV1_0;
};

struct SectionTrace {
  /// Candidates after the section prefix, before predicates.
  std::vector<xml::NodeId> candidates;
  std::optional<xml::NodeId> target;
  bool rectified = false;
  /// Section result after predicates.
  std::vector<xml::NodeId> result;
};

struct GenTrace {
  std::vector<SectionTrace> sections;
  std::vector<xml::NodeId> result;
  std::size_t rectify_fallbacks = 0;
  std::size_t dropped_predicates = 0;
  /// Targeted generation without rectification stopped on an empty result.
  bool stopped_on_empty = false;
};

struct GeneratedQuery {
  xpath::XPathExpr expr;
  GenTrace trace;
};

GeneratedQuery generate_query(Rng& rng, const xml::XmlDocument& doc, const GenConfig& cfg);

/// Axes that yield at least one element for some node of `context`, decided
/// from structural conditions. `context` may contain the document origin.
std::vector<xml::Axis> applicable_axes(const xml::XmlDocument& doc, std::span<const xml::NodeId> context);

struct PrefixChoice {
  xpath::SectionPrefix prefix;
  std::vector<eval::Group> groups;
  std::vector<xml::NodeId> result;
};

/// Step uniform over {/, //}; axis uniform over the applicable ones; name test
/// is the wildcard or a tag occurring in the axis result. Result is nonempty.
PrefixChoice generate_section_prefix(Rng& rng, const xml::XmlDocument& doc, std::span<const xml::NodeId> context,
                                     const GenConfig& cfg);

xml::NodeId select_target(Rng& rng, std::span<const xml::NodeId> candidates);

/// Site of `target` in the first group that holds it.
std::optional<PredicateSite> locate(const std::vector<eval::Group>& groups, xml::NodeId target,
                                    xpath::Standard standard);

/// Boolean predicate built bottom-up from a subject at the target, with every
/// intermediate value checked on the designated evaluator.
xpath::ExprNode generate_predicate(Rng& rng, const xml::XmlDocument& doc, const PredicateSite& site,
                                   const GenConfig& cfg);

/// Predicate from document-wide pools of names, built on static kinds only.
xpath::ExprNode generate_untargeted_predicate(Rng& rng, const xml::XmlDocument& doc, const GenConfig& cfg);

struct RectifyStats {
  std::size_t calls = 0;
  std::size_t rewritten = 0;
  std::size_t fallbacks = 0;
};

/// Rewrites `pred` so that it holds at the site: keep it if it already does,
/// otherwise wrap it in not() or repair it structurally (or: one child,
/// and: both children, comparison: opposite operator). A structural repair
/// that does not hold is replaced by not(pred).
xpath::ExprNode rectify_predicate(Rng& rng, const xml::XmlDocument& doc, const xpath::ExprNode& pred,
                                  const PredicateSite& site, double not_wrap_prob, RectifyStats* stats = nullptr);

/// `[k]` or `[a + b]` with a + b = k.
xpath::Predicate generate_positional_predicate(Rng& rng, std::size_t target_position, std::size_t context_size);

}  // namespace xpathdiff::gen
