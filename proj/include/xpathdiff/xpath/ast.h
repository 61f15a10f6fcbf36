#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "xpathdiff/xml/document.h"

namespace xpathdiff::xpath {

enum class Standard : std::uint8_t { kV1_0, kV3_0 };

std::string_view standard_name(Standard s);  // "1.0" / "3.0"
std::optional<Standard> standard_from_name(std::string_view name);

enum class StepKind : std::uint8_t { kSlash, kDoubleSlash };

struct SectionPrefix {
  StepKind step = StepKind::kSlash;
  xml::Axis axis = xml::Axis::kChild;
  /// Tag name test; nullopt is the wildcard `*`.
  std::optional<std::string> tag;
  bool operator==(const SectionPrefix&) const = default;
};

enum class Function : std::uint8_t {
  kCount,
  kPosition,
  kLast,
  kBoolean,
  kNumber,
  kString,
  kStringLength,
  kStartsWith,
  kContains,
  kConcat,
  kSubstring,
  kFloor,
  kCeiling,
  kRound,
  kSum,
  kName,
  // 3.0 only
  kSubsequence,
  kTail,
  kHead,
  kExists,
  kEmpty,
  kAbs,
  kMin,
  kMax,
  kStringJoin,
  kHasChildren,
};

enum class Operator : std::uint8_t {
  kAdd,
  kSub,
  kMul,
  kDiv,
  kMod,
  kEq,
  kNe,
  kLt,
  kLe,
  kGt,
  kGe,
  kAnd,
  kOr,
  kNegate,
  kNot,
};

bool is_comparison(Operator op);
bool is_arithmetic(Operator op);
/// Comparison with the complementary truth table on single numbers:
/// <= <-> >, < <-> >=, = <-> !=.
Operator opposite(Operator op);

/// Integer literals are xs:integer in 3.0 and plain numbers in 1.0.
using Literal = std::variant<std::int64_t, double, std::string, bool>;

enum class NodeKind : std::uint8_t {
  kLiteral,
  kContextItem,  // .
  kAttribute,    // @name, or @* when name == "*"
  kChildPath,    // Tag (one child step)
  kText,         // text()
  kCall,
  kBinary,
  kUnary,
  kRange,  // lhs to rhs
};

/// Predicate expression tree. Children carry the operands/arguments in order.
struct ExprNode {
  NodeKind kind = NodeKind::kLiteral;
  Literal literal;
  std::string name;
  Function function = Function::kCount;
  Operator op = Operator::kAdd;
  std::vector<ExprNode> children;

  static ExprNode lit(Literal v);
  static ExprNode integer(std::int64_t v) { return lit(Literal{v}); }
  static ExprNode context_item();
  static ExprNode attribute(std::string name);
  static ExprNode child_path(std::string tag);
  static ExprNode text();
  static ExprNode call(Function fn, std::vector<ExprNode> args = {});
  static ExprNode binary(Operator op, ExprNode lhs, ExprNode rhs);
  static ExprNode unary(Operator op, ExprNode arg);
  static ExprNode range(ExprNode lhs, ExprNode rhs);

  bool operator==(const ExprNode&) const = default;
};

/// Height of the tree; a leaf has depth 1.
std::size_t depth(const ExprNode& node);
std::size_t node_count(const ExprNode& node);
/// Occurrences of subjects: context item, attribute, child path, text(),
/// position(), last().
std::size_t subject_count(const ExprNode& node);

enum class PredicateKind : std::uint8_t { kBoolean, kPositional };

struct Predicate {
  PredicateKind kind = PredicateKind::kBoolean;
  ExprNode body;
  bool operator==(const Predicate&) const = default;
};

struct Section {
  SectionPrefix prefix;
  std::vector<Predicate> predicates;
  bool operator==(const Section&) const = default;
};

struct XPathExpr {
  std::vector<Section> sections;
  Standard standard = Standard::kV1_0;
  bool operator==(const XPathExpr&) const = default;
};

std::size_t node_count(const XPathExpr& expr);

}  // namespace xpathdiff::xpath
