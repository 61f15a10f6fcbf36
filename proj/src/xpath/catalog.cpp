#include "xpathdiff/xpath/catalog.h"

#include <stdexcept>

namespace xpathdiff::xpath {

namespace {

constexpr KindMask NS = mask(ValueKind::kNodeSet);
constexpr KindMask NUM = mask(ValueKind::kNumber);
constexpr KindMask STR = mask(ValueKind::kString);
constexpr KindMask BOOL = mask(ValueKind::kBoolean);
constexpr KindMask SEQ = mask(ValueKind::kSequence);
constexpr KindMask ANY = kAnyKind;
constexpr KindMask ATOMIC = NS | NUM | STR | BOOL;  // anything but a multi-item atomic sequence

// 1.0 converts every argument except node-set parameters; 3.0 applies the
// function conversion rules, so the masks differ.
constexpr ParamType kItems{ANY, ANY};
constexpr ParamType kNodes{NS, NS};
constexpr ParamType kNodeOpt{NS, NS, true};
constexpr ParamType kEbv{ANY, ATOMIC};
constexpr ParamType kAtomicOpt{ANY, ATOMIC, true};
constexpr ParamType kStringOpt{ANY, NS | STR, true};
constexpr ParamType kStrings{ANY, NS | STR};
constexpr ParamType kNumericOpt{ANY, NS | NUM, true};
constexpr ParamType kNumericSeq{NS, NS | NUM | SEQ};
constexpr ParamType kSequence{0, NS | SEQ};
constexpr ParamType kComparand{ANY, ANY};

using enum Function;
using enum Operator;
constexpr Standard V1 = Standard::kV1_0;
constexpr Standard V3 = Standard::kV3_0;

CatalogEntry fn(std::string_view name, Function f, std::vector<ParamType> params, ValueKind result,
                Standard min = V1, ResultRule rule = ResultRule::kFixed, bool optional = false) {
  return {name, EntryForm::kFunction, f, kAdd, std::move(params), rule, result, min, optional};
}

CatalogEntry bin(std::string_view name, Operator op, ParamType p, ValueKind result) {
  return {name, EntryForm::kBinary, kCount, op, {p, p}, ResultRule::kFixed, result, V1, false};
}

const std::vector<CatalogEntry>& registry() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> e;
    e.push_back(fn("count", kCount, {{NS, ANY}}, ValueKind::kNumber));
    e.push_back(fn("position", kPosition, {}, ValueKind::kNumber));
    e.push_back(fn("last", kLast, {}, ValueKind::kNumber));
    e.push_back(fn("boolean", kBoolean, {kEbv}, ValueKind::kBoolean));
    e.push_back(fn("number", kNumber, {kAtomicOpt}, ValueKind::kNumber));
    e.push_back(fn("string", kString, {kAtomicOpt}, ValueKind::kString));
    e.push_back(fn("string-length", kStringLength, {kStringOpt}, ValueKind::kNumber));
    e.push_back(fn("starts-with", kStartsWith, {kStringOpt, kStringOpt}, ValueKind::kBoolean));
    e.push_back(fn("contains", kContains, {kStringOpt, kStringOpt}, ValueKind::kBoolean));
    e.push_back(fn("concat", kConcat, {kAtomicOpt, kAtomicOpt}, ValueKind::kString));
    e.push_back(fn("substring", kSubstring, {kStringOpt, kNumericOpt, kNumericOpt}, ValueKind::kString));
    e.push_back(fn("floor", kFloor, {kNumericOpt}, ValueKind::kNumber));
    e.push_back(fn("ceiling", kCeiling, {kNumericOpt}, ValueKind::kNumber));
    e.push_back(fn("round", kRound, {kNumericOpt}, ValueKind::kNumber));
    e.push_back(fn("sum", kSum, {kNumericSeq}, ValueKind::kNumber));
    e.push_back(fn("name", kName, {kNodeOpt}, ValueKind::kString));

    e.push_back(fn("subsequence", kSubsequence, {kSequence, kNumericOpt, kNumericOpt}, ValueKind::kSequence, V3,
                   ResultRule::kSameAsFirst));
    e.push_back(fn("tail", kTail, {kSequence}, ValueKind::kSequence, V3, ResultRule::kSameAsFirst));
    e.push_back(fn("head", kHead, {kSequence}, ValueKind::kNumber, V3, ResultRule::kItemOfFirst));
    e.push_back(fn("exists", kExists, {kItems}, ValueKind::kBoolean, V3));
    e.push_back(fn("empty", kEmpty, {kItems}, ValueKind::kBoolean, V3));
    e.push_back(fn("abs", kAbs, {kNumericOpt}, ValueKind::kNumber, V3));
    e.push_back(fn("min", kMin, {kNumericSeq}, ValueKind::kNumber, V3));
    e.push_back(fn("max", kMax, {kNumericSeq}, ValueKind::kNumber, V3));
    e.push_back(fn("string-join", kStringJoin, {kStrings, kStringOpt}, ValueKind::kString, V3));
    e.push_back(fn("has-children", kHasChildren, {kNodeOpt}, ValueKind::kBoolean, V3, ResultRule::kFixed, true));

    e.push_back(bin("+", kAdd, kNumericOpt, ValueKind::kNumber));
    e.push_back(bin("-", kSub, kNumericOpt, ValueKind::kNumber));
    e.push_back(bin("*", kMul, kNumericOpt, ValueKind::kNumber));
    e.push_back(bin("div", kDiv, kNumericOpt, ValueKind::kNumber));
    e.push_back(bin("mod", kMod, kNumericOpt, ValueKind::kNumber));
    e.push_back(bin("=", kEq, kComparand, ValueKind::kBoolean));
    e.push_back(bin("!=", kNe, kComparand, ValueKind::kBoolean));
    e.push_back(bin("<", kLt, kComparand, ValueKind::kBoolean));
    e.push_back(bin("<=", kLe, kComparand, ValueKind::kBoolean));
    e.push_back(bin(">", kGt, kComparand, ValueKind::kBoolean));
    e.push_back(bin(">=", kGe, kComparand, ValueKind::kBoolean));
    e.push_back(bin("and", kAnd, kEbv, ValueKind::kBoolean));
    e.push_back(bin("or", kOr, kEbv, ValueKind::kBoolean));
    e.push_back({"-", EntryForm::kUnary, kCount, kNegate, {kNumericOpt}, ResultRule::kFixed, ValueKind::kNumber, V1});
    e.push_back({"not", EntryForm::kUnary, kCount, kNot, {kEbv}, ResultRule::kFixed, ValueKind::kBoolean, V1});
    e.push_back({"to", EntryForm::kRange, kCount, kAdd, {kNumericOpt, kNumericOpt}, ResultRule::kFixed,
                 ValueKind::kSequence, V3});
    return e;
  }();
  return entries;
}

}  // namespace

std::string_view kind_name(ValueKind k) {
  switch (k) {
    case ValueKind::kNodeSet: return "node-set";
    case ValueKind::kNumber: return "number";
    case ValueKind::kString: return "string";
    case ValueKind::kBoolean: return "boolean";
    case ValueKind::kSequence: return "sequence";
  }
  return "?";
}

std::span<const CatalogEntry> catalog() { return registry(); }

const CatalogEntry& entry_for(Function f) {
  for (const CatalogEntry& e : registry()) {
    if (e.form == EntryForm::kFunction && e.function == f) return e;
  }
  throw std::logic_error("function missing from catalog");
}

const CatalogEntry& entry_for(Operator op) {
  for (const CatalogEntry& e : registry()) {
    if ((e.form == EntryForm::kBinary || e.form == EntryForm::kUnary) && e.op == op) return e;
  }
  throw std::logic_error("operator missing from catalog");
}

const CatalogEntry& range_entry() { return registry().back(); }

const CatalogEntry* find_entry(std::string_view name, EntryForm form) {
  for (const CatalogEntry& e : registry()) {
    if (e.form == form && e.name == name) return &e;
  }
  return nullptr;
}

std::vector<const CatalogEntry*> functions_accepting(ValueKind kind, Standard standard) {
  std::vector<const CatalogEntry*> out;
  for (const CatalogEntry& e : registry()) {
    if (e.params.empty()) continue;
    if (standard == Standard::kV1_0 && e.min_standard == Standard::kV3_0) continue;
    if (e.params.front().accepts(kind, standard)) out.push_back(&e);
  }
  return out;
}

const CatalogEntry* entry_of(const ExprNode& node) {
  switch (node.kind) {
    case NodeKind::kCall: return &entry_for(node.function);
    case NodeKind::kBinary:
    case NodeKind::kUnary: return &entry_for(node.op);
    case NodeKind::kRange: return &range_entry();
    default: return nullptr;
  }
}

ValueKind infer_kind(const ExprNode& node, Standard standard) {
  switch (node.kind) {
    case NodeKind::kLiteral:
      if (std::holds_alternative<std::string>(node.literal)) return ValueKind::kString;
      if (std::holds_alternative<bool>(node.literal)) return ValueKind::kBoolean;
      return ValueKind::kNumber;
    case NodeKind::kContextItem:
    case NodeKind::kAttribute:
    case NodeKind::kChildPath:
    case NodeKind::kText:
      return ValueKind::kNodeSet;
    default:
      break;
  }
  const CatalogEntry& e = *entry_of(node);
  switch (e.rule) {
    case ResultRule::kFixed:
      return e.result;
    case ResultRule::kSameAsFirst:
      return infer_kind(node.children.front(), standard) == ValueKind::kNodeSet ? ValueKind::kNodeSet
                                                                                 : ValueKind::kSequence;
    case ResultRule::kItemOfFirst:
      return infer_kind(node.children.front(), standard) == ValueKind::kNodeSet ? ValueKind::kNodeSet
                                                                                 : ValueKind::kNumber;
  }
  return e.result;
}

bool is_singleton(const ExprNode& node) {
  switch (node.kind) {
    case NodeKind::kLiteral:
    case NodeKind::kContextItem:
    case NodeKind::kText:
      return true;
    case NodeKind::kAttribute:
      return node.name != "*";
    case NodeKind::kChildPath:
    case NodeKind::kRange:
      return false;
    case NodeKind::kCall:
      switch (node.function) {
        case Function::kSubsequence:
        case Function::kTail:
          return false;
        case Function::kHead:
        default:
          return true;
      }
    case NodeKind::kBinary:
    case NodeKind::kUnary:
      return true;
  }
  return true;
}

}  // namespace xpathdiff::xpath
