#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "xpathdiff/eval/rewrite.h"
#include "xpathdiff/xml/document.h"
#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::harness {

enum class EngineKind : std::uint8_t { kBuiltinA, kBuiltinB, kBuiltinMutant, kSubprocess };

std::string_view engine_kind_name(EngineKind k);
std::optional<EngineKind> engine_kind_from_name(std::string_view name);

/// Bad engine list or engine description.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EngineSpec {
  std::string name;
  EngineKind kind = EngineKind::kBuiltinA;
  std::optional<eval::Mutation> mutation;  // kBuiltinMutant
  xpath::Standard standard = xpath::Standard::kV3_0;
  /// kSubprocess: shell command with `{doc}` and `{query}`, each exactly once.
  std::string command_template;
  int timeout_ms = 10000;
};

/// Throws ConfigError when the spec is inconsistent.
void validate(const EngineSpec& spec);
/// At least two engines, unique names, one shared standard.
void validate_engines(const std::vector<EngineSpec>& engines);

/// Builtin engine that evaluates with strategy A after the named unsound
/// rewrite. Throws ConfigError for an unknown id.
EngineSpec mutant_engine(std::string_view mutation_id, xpath::Standard standard = xpath::Standard::kV3_0);

/// Parses the short form used on the command line: `builtin_a`, `builtin_b`
/// or `mutant:<id>`. The name is the token itself.
EngineSpec engine_from_token(std::string_view token, xpath::Standard standard);

nlohmann::json to_json(const EngineSpec& spec);
/// `standard` fills in a missing "standard" field.
EngineSpec engine_from_json(const nlohmann::json& j, xpath::Standard standard);

struct NodeList {
  std::vector<std::uint32_t> ids;
  bool operator==(const NodeList&) const = default;
};
struct EngineError {
  std::string klass;
  bool operator==(const EngineError&) const = default;
};
struct Timeout {
  bool operator==(const Timeout&) const = default;
};
using Outcome = std::variant<NodeList, EngineError, Timeout>;

struct EngineResult {
  Outcome outcome;
  double wall_ms = 0;
};

inline bool succeeded(const Outcome& o) { return std::holds_alternative<NodeList>(o); }

/// "empty", "nonempty", "error" or "timeout".
std::string_view outcome_shape(const Outcome& o);

/// Timing is left out so that records stay byte-identical across runs.
nlohmann::json to_json(const Outcome& o);
Outcome outcome_from_json(const nlohmann::json& j);

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t doc = 0;
  std::uint64_t query = 0;
  std::uint32_t lane = 0;
  bool operator==(const Provenance&) const = default;
};

struct TestCase {
  std::string doc_text;
  std::string query_text;
  /// Structured query; builtin engines evaluate this instead of the text.
  std::optional<xpath::XPathExpr> query;
  xpath::Standard standard = xpath::Standard::kV3_0;
  std::optional<Provenance> provenance;
  /// Parsed doc_text, if the caller already has it.
  std::shared_ptr<const xml::XmlDocument> doc;
};

/// Serializes `doc` and renders `expr`.
TestCase make_case(std::shared_ptr<const xml::XmlDocument> doc, xpath::XPathExpr expr,
                   std::optional<Provenance> provenance = std::nullopt);

nlohmann::json to_json(const TestCase& c);
TestCase case_from_json(const nlohmann::json& j);

/// Never throws for engine-side failures; they become EngineError/Timeout.
EngineResult run_engine(const EngineSpec& spec, const TestCase& c);

/// Parses adapter output: zero or more `N <id>` lines, or one `ERR <class>`
/// line. Anything else yields EngineError("adapter").
Outcome parse_wire_output(std::string_view out);

enum class Klass : std::uint8_t { kLogic, kError };
std::string_view klass_name(Klass k);
std::optional<Klass> klass_from_name(std::string_view name);

using Results = std::map<std::string, EngineResult>;

struct Discrepancy {
  TestCase test;
  Results results;
  Klass klass = Klass::kLogic;
  std::string fingerprint;
  /// Engine names the classification rests on: the first two engines with
  /// differing node lists, or the first succeeding and first failing one.
  std::pair<std::string, std::string> pair;
};

/// Logic takes precedence over error when both occur. Timeouts count as
/// errors; two failures never form a discrepancy, whatever their classes.
std::optional<Discrepancy> compare(const TestCase& c, const Results& results);

/// Hash over klass, the sorted function/operator names of the query (constants
/// erased) and each engine's outcome shape in engine-name order.
std::string fingerprint(const Discrepancy& d);

/// Discrepancy record: case, per-engine outcomes, klass, fingerprint, pair.
nlohmann::json to_json(const Discrepancy& d);

}  // namespace xpathdiff::harness
