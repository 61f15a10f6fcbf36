#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xpathdiff/util/rng.h"
#include "xpathdiff/xml/document.h"

namespace xpathdiff::docgen {

enum class ValueKind : std::uint8_t { kInteger, kString };
enum class ContentKind : std::uint8_t { kInteger, kString, kNone, kChildren };

struct AttributeSpec {
  std::string name;
  ValueKind kind;
  bool operator==(const AttributeSpec&) const = default;
};

/// Blueprint for a family of element nodes sharing tag, attribute names and
/// kinds, and content kind.
struct NodeTemplate {
  std::string tag;
  std::vector<AttributeSpec> attributes;
  ContentKind content = ContentKind::kNone;
  bool operator==(const NodeTemplate&) const = default;

  /// Whether instances may receive child elements.
  bool is_container() const { return content == ContentKind::kNone || content == ContentKind::kChildren; }
};

struct IntRange {
  std::int64_t lo;
  std::int64_t hi;
};

struct DocGenConfig {
  IntRange node_count{1, 50};
  IntRange attr_count{0, 3};
  IntRange string_length{0, 10};
  IntRange integer_range{-100, 100};
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on an empty or out-of-domain range.
  void validate() const;
};

/// Tag for template `i` of the fixed alphabet: A..Z, then AA, AB, ...
std::string template_tag(std::size_t i);

/// Lowercase ASCII with interior spaces; never starts or ends with a space.
std::string random_string(Rng& rng, IntRange length);

std::vector<NodeTemplate> generate_templates(Rng& rng, std::size_t count, const DocGenConfig& cfg = {});

xml::ElementNode instantiate_node(Rng& rng, const NodeTemplate& tmpl, xml::NodeId id, const DocGenConfig& cfg = {});

/// Generated document together with the templates it was built from.
struct GeneratedDocument {
  xml::XmlDocument doc;
  std::vector<NodeTemplate> templates;
  /// Template index per node, indexed by id - 1.
  std::vector<std::size_t> assignment;
};

/// Random tree: node 1 is the root; node k picks a parent uniformly among the
/// earlier nodes whose template admits children.
GeneratedDocument generate_document_with_templates(Rng& rng, const DocGenConfig& cfg);

inline xml::XmlDocument generate_document(Rng& rng, const DocGenConfig& cfg) {
  return generate_document_with_templates(rng, cfg).doc;
}

}  // namespace xpathdiff::docgen
