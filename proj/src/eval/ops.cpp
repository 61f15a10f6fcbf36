#include "xpathdiff/eval/ops.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>

#include "xpathdiff/xpath/catalog.h"

namespace xpathdiff::eval {

using xpath::Function;
using xpath::Operator;

std::string_view error_class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::kTypeError: return "type-error";
    case ErrorClass::kUnsupportedFeature: return "unsupported-feature";
    case ErrorClass::kDynamicError: return "dynamic-error";
  }
  return "?";
}

std::optional<ErrorClass> error_class_from_name(std::string_view name) {
  if (name == "type-error") return ErrorClass::kTypeError;
  if (name == "unsupported-feature") return ErrorClass::kUnsupportedFeature;
  if (name == "dynamic-error") return ErrorClass::kDynamicError;
  return std::nullopt;
}

void type_error(const std::string& code, const std::string& message) {
  throw EvalError(ErrorClass::kTypeError, code, message);
}

void dynamic_error(const std::string& code, const std::string& message) {
  throw EvalError(ErrorClass::kDynamicError, code, message);
}

void unsupported(const std::string& message) { throw EvalError(ErrorClass::kUnsupportedFeature, "XPST0017", message); }

bool is_node_set(const Value& v) { return std::all_of(v.begin(), v.end(), is_node); }

std::vector<xml::NodeId> element_ids(const Value& v) {
  std::vector<xml::NodeId> out;
  for (const Item& i : v) {
    if (const auto* n = std::get_if<NodeRef>(&i)) out.push_back(n->element);
  }
  return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_xml_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_xml_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_xml_space(s.back())) s.remove_suffix(1);
  return s;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// digits ['.' digits*] | '.' digits
std::size_t scan_decimal(std::string_view s, std::size_t i) {
  std::size_t start = i;
  std::size_t int_digits = 0;
  while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
  std::size_t frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return start;
  return i;
}

// Input is already validated; strtod saturates to +-inf or 0 out of range.
double parse_double_checked(std::string_view s) {
  std::string buf(s);
  return std::strtod(buf.c_str(), nullptr);
}

std::string shortest_fixed(double d) {
  char buf[400];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::fixed);
  return std::string(buf, ptr);
}

bool is_numeric(const Atomic& a) { return std::holds_alternative<double>(a) || std::holds_alternative<std::int64_t>(a); }

double numeric_double(const Atomic& a) {
  if (const auto* i = std::get_if<std::int64_t>(&a)) return static_cast<double>(*i);
  return std::get<double>(a);
}

std::string atomic_to_string(const Atomic& a) {
  if (const auto* u = std::get_if<Untyped>(&a)) return u->value;
  if (const auto* s = std::get_if<std::string>(&a)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&a)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&a)) return double_to_string_v3(*d);
  return std::get<bool>(a) ? "true" : "false";
}

std::string_view atomic_type_name(const Atomic& a) {
  switch (a.index()) {
    case 0: return "xs:untypedAtomic";
    case 1: return "xs:double";
    case 2: return "xs:integer";
    case 3: return "xs:string";
    default: return "xs:boolean";
  }
}

double cast_to_double(const std::string& s) {
  auto d = parse_xs_double(s);
  if (!d) dynamic_error("FORG0001", "cannot cast \"" + s + "\" to xs:double");
  return *d;
}

// ---- 1.0 helpers ----

double number_v1(const xml::XmlDocument& doc, const Value& v) {
  if (v.empty()) return kNaN;
  const Item& i = v.front();
  if (const auto* n = std::get_if<NodeRef>(&i)) return string_to_number_v1(string_value(doc, *n));
  if (const auto* d = std::get_if<double>(&i)) return *d;
  if (const auto* k = std::get_if<std::int64_t>(&i)) return static_cast<double>(*k);
  if (const auto* s = std::get_if<std::string>(&i)) return string_to_number_v1(*s);
  return std::get<bool>(i) ? 1.0 : 0.0;
}

std::string string_v1(const xml::XmlDocument& doc, const Value& v) {
  if (v.empty()) return "";
  const Item& i = v.front();
  if (const auto* n = std::get_if<NodeRef>(&i)) return string_value(doc, *n);
  if (const auto* d = std::get_if<double>(&i)) return number_to_string_v1(*d);
  if (const auto* k = std::get_if<std::int64_t>(&i)) return std::to_string(*k);
  if (const auto* s = std::get_if<std::string>(&i)) return *s;
  return std::get<bool>(i) ? "true" : "false";
}

bool boolean_v1(const Value& v) {
  if (is_node_set(v)) return !v.empty();
  const Item& i = v.front();
  if (const auto* d = std::get_if<double>(&i)) return *d != 0 && !std::isnan(*d);
  if (const auto* k = std::get_if<std::int64_t>(&i)) return *k != 0;
  if (const auto* s = std::get_if<std::string>(&i)) return !s->empty();
  return std::get<bool>(i);
}

template <typename T>
bool apply_order(Operator op, const T& a, const T& b) {
  switch (op) {
    case Operator::kEq: return a == b;
    case Operator::kNe: return a != b;
    case Operator::kLt: return a < b;
    case Operator::kLe: return a <= b;
    case Operator::kGt: return a > b;
    case Operator::kGe: return a >= b;
    default: return false;
  }
}

bool is_equality(Operator op) { return op == Operator::kEq || op == Operator::kNe; }

Operator mirror(Operator op) {
  switch (op) {
    case Operator::kLt: return Operator::kGt;
    case Operator::kLe: return Operator::kGe;
    case Operator::kGt: return Operator::kLt;
    case Operator::kGe: return Operator::kLe;
    default: return op;
  }
}

// Node-set on the left, a single atomic on the right.
bool compare_nodes_atomic_v1(const xml::XmlDocument& doc, const Value& nodes, const Item& other, Operator op) {
  if (const auto* b = std::get_if<bool>(&other)) {
    bool nb = !nodes.empty();
    if (is_equality(op)) return apply_order(op, nb, *b);
    return apply_order(op, nb ? 1.0 : 0.0, *b ? 1.0 : 0.0);
  }
  bool numeric = std::holds_alternative<double>(other) || std::holds_alternative<std::int64_t>(other);
  if (numeric || !is_equality(op)) {
    double rhs = number_v1(doc, Value{other});
    for (const Item& n : nodes) {
      if (apply_order(op, string_to_number_v1(string_value(doc, std::get<NodeRef>(n))), rhs)) return true;
    }
    return false;
  }
  const std::string& rhs = std::get<std::string>(other);
  for (const Item& n : nodes) {
    if (apply_order(op, string_value(doc, std::get<NodeRef>(n)), rhs)) return true;
  }
  return false;
}

bool compare_v1(const xml::XmlDocument& doc, const Value& lhs, const Value& rhs, Operator op) {
  bool ln = is_node_set(lhs);
  bool rn = is_node_set(rhs);
  if (ln && rn) {
    if (is_equality(op)) {
      std::vector<std::string> rs;
      rs.reserve(rhs.size());
      for (const Item& b : rhs) rs.push_back(string_value(doc, std::get<NodeRef>(b)));
      for (const Item& a : lhs) {
        std::string as = string_value(doc, std::get<NodeRef>(a));
        for (const std::string& bs : rs) {
          if (apply_order(op, as, bs)) return true;
        }
      }
      return false;
    }
    std::vector<double> rs;
    rs.reserve(rhs.size());
    for (const Item& b : rhs) rs.push_back(string_to_number_v1(string_value(doc, std::get<NodeRef>(b))));
    for (const Item& a : lhs) {
      double an = string_to_number_v1(string_value(doc, std::get<NodeRef>(a)));
      for (double bn : rs) {
        if (apply_order(op, an, bn)) return true;
      }
    }
    return false;
  }
  if (ln) return compare_nodes_atomic_v1(doc, lhs, rhs.front(), op);
  if (rn) return compare_nodes_atomic_v1(doc, rhs, lhs.front(), mirror(op));

  const Item& a = lhs.front();
  const Item& b = rhs.front();
  if (is_equality(op)) {
    if (std::holds_alternative<bool>(a) || std::holds_alternative<bool>(b)) {
      return apply_order(op, boolean_v1(lhs), boolean_v1(rhs));
    }
    bool an = std::holds_alternative<double>(a) || std::holds_alternative<std::int64_t>(a);
    bool bn = std::holds_alternative<double>(b) || std::holds_alternative<std::int64_t>(b);
    if (an || bn) return apply_order(op, number_v1(doc, lhs), number_v1(doc, rhs));
    return apply_order(op, string_v1(doc, lhs), string_v1(doc, rhs));
  }
  return apply_order(op, number_v1(doc, lhs), number_v1(doc, rhs));
}

// ---- 3.0 helpers ----

std::vector<Atomic> atomize_all(const xml::XmlDocument& doc, const Value& v) {
  std::vector<Atomic> out;
  out.reserve(v.size());
  for (const Item& i : v) out.push_back(atomize(doc, i));
  return out;
}

/// Zero or one atomized item; more is XPTY0004.
std::optional<Atomic> atomize_opt(const xml::XmlDocument& doc, const Value& v, std::string_view what) {
  if (v.empty()) return std::nullopt;
  if (v.size() > 1) type_error("XPTY0004", std::string(what) + " expects at most one item");
  return atomize(doc, v.front());
}

/// xs:string? parameter: untyped and strings pass, other atomics are XPTY0004.
std::string string_param(const xml::XmlDocument& doc, const Value& v, std::string_view what) {
  auto a = atomize_opt(doc, v, what);
  if (!a) return "";
  if (const auto* u = std::get_if<Untyped>(&*a)) return u->value;
  if (const auto* s = std::get_if<std::string>(&*a)) return *s;
  type_error("XPTY0004", std::string(what) + " expects xs:string, got " + std::string(atomic_type_name(*a)));
}

/// Numeric parameter: untyped is cast to double, strings/booleans are XPTY0004.
std::optional<Atomic> numeric_param(const xml::XmlDocument& doc, const Value& v, std::string_view what) {
  auto a = atomize_opt(doc, v, what);
  if (!a) return std::nullopt;
  if (const auto* u = std::get_if<Untyped>(&*a)) return Atomic{cast_to_double(u->value)};
  if (is_numeric(*a)) return a;
  type_error("XPTY0004", std::string(what) + " expects a number, got " + std::string(atomic_type_name(*a)));
}

double double_param(const xml::XmlDocument& doc, const Value& v, std::string_view what) {
  auto a = numeric_param(doc, v, what);
  if (!a) type_error("XPTY0004", std::string(what) + " expects exactly one number");
  return numeric_double(*a);
}

std::int64_t checked(Operator op, std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  bool overflow = false;
  switch (op) {
    case Operator::kAdd: overflow = __builtin_add_overflow(a, b, &r); break;
    case Operator::kSub: overflow = __builtin_sub_overflow(a, b, &r); break;
    case Operator::kMul: overflow = __builtin_mul_overflow(a, b, &r); break;
    default: break;
  }
  if (overflow) dynamic_error("FOAR0002", "integer overflow");
  return r;
}

double double_op(Operator op, double a, double b) {
  switch (op) {
    case Operator::kAdd: return a + b;
    case Operator::kSub: return a - b;
    case Operator::kMul: return a * b;
    case Operator::kDiv: return a / b;
    case Operator::kMod: return std::fmod(a, b);
    default: return kNaN;
  }
}

bool compare_atomic_v3(Atomic a, Atomic b, Operator op) {
  bool au = std::holds_alternative<Untyped>(a);
  bool bu = std::holds_alternative<Untyped>(b);
  auto promote_untyped = [](Atomic& u, const Atomic& other, bool other_untyped) {
    std::string s = std::get<Untyped>(u).value;
    if (other_untyped || std::holds_alternative<std::string>(other)) {
      u = std::move(s);
    } else if (is_numeric(other)) {
      u = cast_to_double(s);
    } else if (std::holds_alternative<bool>(other)) {
      std::string_view t = trim(s);
      if (t == "true" || t == "1") {
        u = true;
      } else if (t == "false" || t == "0") {
        u = false;
      } else {
        dynamic_error("FORG0001", "cannot cast \"" + s + "\" to xs:boolean");
      }
    }
  };
  if (au) promote_untyped(a, b, bu);
  if (bu) promote_untyped(b, a, au);

  if (is_numeric(a) && is_numeric(b)) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
      return apply_order(op, std::get<std::int64_t>(a), std::get<std::int64_t>(b));
    }
    return apply_order(op, numeric_double(a), numeric_double(b));
  }
  if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
    return apply_order(op, std::get<std::string>(a), std::get<std::string>(b));
  }
  if (std::holds_alternative<bool>(a) && std::holds_alternative<bool>(b)) {
    return apply_order(op, std::get<bool>(a), std::get<bool>(b));
  }
  type_error("XPTY0004", "cannot compare " + std::string(atomic_type_name(a)) + " with " +
                             std::string(atomic_type_name(b)));
}

std::size_t codepoint_length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) {
    if ((static_cast<unsigned char>(c) & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string substring_impl(const std::string& s, double start, double length) {
  double rs = xpath_round(start);
  double end = rs + xpath_round(length);
  std::string out;
  double pos = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) pos += 1;
    if (pos >= rs && pos < end) out += s[i];
  }
  return out;
}

Value subsequence_impl(const Value& seq, double start, std::optional<double> length) {
  double rs = xpath_round(start);
  double end = length ? rs + xpath_round(*length) : std::numeric_limits<double>::infinity();
  Value out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    double p = static_cast<double>(i + 1);
    if (p >= rs && p < end) out.push_back(seq[i]);
  }
  return out;
}

Value rounding_v3(const xml::XmlDocument& doc, Function fn, const Value& arg) {
  auto a = numeric_param(doc, arg, xpath::entry_for(fn).name);
  if (!a) return {};
  if (const auto* i = std::get_if<std::int64_t>(&*a)) {
    if (fn == Function::kAbs) {
      if (*i == std::numeric_limits<std::int64_t>::min()) dynamic_error("FOAR0002", "integer overflow in abs");
      return {*i < 0 ? -*i : *i};
    }
    return {*i};
  }
  double d = std::get<double>(*a);
  switch (fn) {
    case Function::kFloor: return {std::floor(d)};
    case Function::kCeiling: return {std::ceil(d)};
    case Function::kRound: return {xpath_round(d)};
    default: return {std::fabs(d)};
  }
}

/// sum/min/max operand: atomized, untyped cast to double, only numbers (and,
/// for min/max, all-string sequences) accepted.
std::vector<Atomic> aggregate_items(const xml::XmlDocument& doc, const Value& v, Function fn) {
  std::vector<Atomic> items = atomize_all(doc, v);
  bool any_string = false;
  bool any_number = false;
  for (Atomic& a : items) {
    if (const auto* u = std::get_if<Untyped>(&a)) {
      a = cast_to_double(u->value);
    }
    if (is_numeric(a)) {
      any_number = true;
    } else if (std::holds_alternative<std::string>(a) && fn != Function::kSum) {
      any_string = true;
    } else {
      type_error("FORG0006", std::string(xpath::entry_for(fn).name) + " over " + std::string(atomic_type_name(a)));
    }
  }
  if (any_string && any_number) type_error("FORG0006", "mixed strings and numbers");
  return items;
}

Value sum_v3(const xml::XmlDocument& doc, const Value& v) {
  std::vector<Atomic> items = aggregate_items(doc, v, Function::kSum);
  bool all_int = std::all_of(items.begin(), items.end(),
                             [](const Atomic& a) { return std::holds_alternative<std::int64_t>(a); });
  if (all_int) {
    std::int64_t total = 0;
    for (const Atomic& a : items) total = checked(Operator::kAdd, total, std::get<std::int64_t>(a));
    return {total};
  }
  double total = 0;
  for (const Atomic& a : items) total += numeric_double(a);
  return {total};
}

Value min_max_v3(const xml::XmlDocument& doc, const Value& v, bool want_max) {
  std::vector<Atomic> items = aggregate_items(doc, v, want_max ? Function::kMax : Function::kMin);
  if (items.empty()) return {};
  if (std::holds_alternative<std::string>(items.front())) {
    std::string best = std::get<std::string>(items.front());
    for (const Atomic& a : items) {
      const std::string& s = std::get<std::string>(a);
      if (want_max ? s > best : s < best) best = s;
    }
    return {best};
  }
  bool all_int = std::all_of(items.begin(), items.end(),
                             [](const Atomic& a) { return std::holds_alternative<std::int64_t>(a); });
  if (all_int) {
    std::int64_t best = std::get<std::int64_t>(items.front());
    for (const Atomic& a : items) {
      std::int64_t x = std::get<std::int64_t>(a);
      if (want_max ? x > best : x < best) best = x;
    }
    return {best};
  }
  double best = numeric_double(items.front());
  for (const Atomic& a : items) {
    double x = numeric_double(a);
    if (std::isnan(x)) return {kNaN};
    if (want_max ? x > best : x < best) best = x;
  }
  return {best};
}

const NodeRef* single_node_v3(const Value& v, std::string_view what) {
  if (v.empty()) return nullptr;
  if (v.size() > 1) type_error("XPTY0004", std::string(what) + " expects at most one node");
  const auto* n = std::get_if<NodeRef>(&v.front());
  if (!n) type_error("XPTY0004", std::string(what) + " expects a node");
  return n;
}

std::string node_name(const xml::XmlDocument& doc, const NodeRef& n) {
  const xml::ElementNode& e = doc.node(n.element);
  switch (n.kind) {
    case RefKind::kElement: return e.tag;
    case RefKind::kAttribute: return e.attributes[n.attr].name;
    case RefKind::kText: return "";
  }
  return "";
}

Value call_v1(const xml::XmlDocument& doc, Function fn, std::span<const Value> args) {
  constexpr Standard s = Standard::kV1_0;
  auto require_nodes = [&](const Value& v) {
    if (!is_node_set(v)) type_error("XPTY0004", std::string(xpath::entry_for(fn).name) + " expects a node-set");
  };
  switch (fn) {
    case Function::kCount:
      require_nodes(args[0]);
      return {static_cast<double>(args[0].size())};
    case Function::kBoolean: return {boolean_v1(args[0])};
    case Function::kNumber: return {number_v1(doc, args[0])};
    case Function::kString: return {string_v1(doc, args[0])};
    case Function::kStringLength: return {static_cast<double>(codepoint_length(string_v1(doc, args[0])))};
    case Function::kStartsWith: return {string_v1(doc, args[0]).starts_with(string_v1(doc, args[1]))};
    case Function::kContains:
      return {string_v1(doc, args[0]).find(string_v1(doc, args[1])) != std::string::npos};
    case Function::kConcat: return {string_v1(doc, args[0]) + string_v1(doc, args[1])};
    case Function::kSubstring:
      return {substring_impl(string_v1(doc, args[0]), number_v1(doc, args[1]), number_v1(doc, args[2]))};
    case Function::kFloor: return {std::floor(number_v1(doc, args[0]))};
    case Function::kCeiling: return {std::ceil(number_v1(doc, args[0]))};
    case Function::kRound: return {xpath_round(number_v1(doc, args[0]))};
    case Function::kSum: {
      require_nodes(args[0]);
      double total = 0;
      for (const Item& i : args[0]) total += string_to_number_v1(string_value(doc, std::get<NodeRef>(i)));
      return {total};
    }
    case Function::kName:
      require_nodes(args[0]);
      if (args[0].empty()) return {std::string()};
      return {node_name(doc, std::get<NodeRef>(args[0].front()))};
    default:
      (void)s;
      unsupported(std::string(xpath::entry_for(fn).name) + "() is not an XPath 1.0 function");
  }
}

Value call_v3(const xml::XmlDocument& doc, Function fn, std::span<const Value> args) {
  const std::string_view name = xpath::entry_for(fn).name;
  switch (fn) {
    case Function::kCount: return {static_cast<std::int64_t>(args[0].size())};
    case Function::kBoolean: return {effective_boolean(doc, args[0], Standard::kV3_0)};
    case Function::kNumber: return {to_number(doc, args[0], Standard::kV3_0)};
    case Function::kString: return {to_string(doc, args[0], Standard::kV3_0)};
    case Function::kStringLength:
      return {static_cast<std::int64_t>(codepoint_length(string_param(doc, args[0], name)))};
    case Function::kStartsWith: return {string_param(doc, args[0], name).starts_with(string_param(doc, args[1], name))};
    case Function::kContains:
      return {string_param(doc, args[0], name).find(string_param(doc, args[1], name)) != std::string::npos};
    case Function::kConcat: {
      std::string out;
      for (const Value& a : args) {
        if (auto at = atomize_opt(doc, a, name)) out += atomic_to_string(*at);
      }
      return {out};
    }
    case Function::kSubstring: {
      std::string src = string_param(doc, args[0], name);
      return {substring_impl(src, double_param(doc, args[1], name), double_param(doc, args[2], name))};
    }
    case Function::kFloor:
    case Function::kCeiling:
    case Function::kRound:
    case Function::kAbs:
      return rounding_v3(doc, fn, args[0]);
    case Function::kSum: return sum_v3(doc, args[0]);
    case Function::kMin: return min_max_v3(doc, args[0], false);
    case Function::kMax: return min_max_v3(doc, args[0], true);
    case Function::kName: {
      const NodeRef* n = single_node_v3(args[0], name);
      return {n ? node_name(doc, *n) : std::string()};
    }
    case Function::kHasChildren: {
      const NodeRef* n = single_node_v3(args[0], name);
      if (!n || n->kind != RefKind::kElement) return {false};
      const xml::ElementNode& e = doc.node(n->element);
      bool text_child = e.text && !xml::lexical(*e.text).empty();
      return {!e.children.empty() || text_child};
    }
    case Function::kSubsequence:
      return subsequence_impl(args[0], double_param(doc, args[1], name), double_param(doc, args[2], name));
    case Function::kTail: return subsequence_impl(args[0], 2, std::nullopt);
    case Function::kHead:
      if (args[0].empty()) return {};
      return {args[0].front()};
    case Function::kExists: return {!args[0].empty()};
    case Function::kEmpty: return {args[0].empty()};
    case Function::kStringJoin: {
      std::string sep = string_param(doc, args[1], name);
      if (args[1].empty()) type_error("XPTY0004", "string-join separator is required");
      std::string out;
      bool first = true;
      for (const Item& i : args[0]) {
        Atomic a = atomize(doc, i);
        if (!first) out += sep;
        first = false;
        if (const auto* u = std::get_if<Untyped>(&a)) {
          out += u->value;
        } else if (const auto* str = std::get_if<std::string>(&a)) {
          out += *str;
        } else {
          type_error("XPTY0004", "string-join expects strings, got " + std::string(atomic_type_name(a)));
        }
      }
      return {out};
    }
    case Function::kPosition:
    case Function::kLast:
      break;
  }
  throw std::logic_error("call_function: focus function without a focus");
}

}  // namespace

std::string string_value(const xml::XmlDocument& doc, const NodeRef& n) {
  const xml::ElementNode& e = doc.node(n.element);
  switch (n.kind) {
    case RefKind::kElement: return doc.string_value(doc.order_of(n.element));
    case RefKind::kAttribute: return xml::lexical(e.attributes[n.attr].value);
    case RefKind::kText: return e.text ? xml::lexical(*e.text) : std::string();
  }
  return {};
}

Atomic atomize(const xml::XmlDocument& doc, const Item& item) {
  if (const auto* n = std::get_if<NodeRef>(&item)) return Untyped{string_value(doc, *n)};
  if (const auto* d = std::get_if<double>(&item)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&item)) return *i;
  if (const auto* s = std::get_if<std::string>(&item)) return *s;
  return std::get<bool>(item);
}

double string_to_number_v1(std::string_view s) {
  s = trim(s);
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  std::size_t end = scan_decimal(s, i);
  if (end == i || end != s.size()) return kNaN;
  return parse_double_checked(s);
}

std::string number_to_string_v1(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  if (d == 0) return "0";
  return shortest_fixed(d);
}

std::optional<double> parse_xs_double(std::string_view s) {
  s = trim(s);
  if (s == "INF" || s == "+INF") return std::numeric_limits<double>::infinity();
  if (s == "-INF") return -std::numeric_limits<double>::infinity();
  if (s == "NaN") return kNaN;
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
  std::size_t end = scan_decimal(s, i);
  if (end == i) return std::nullopt;
  if (end < s.size() && (s[end] == 'e' || s[end] == 'E')) {
    std::size_t j = end + 1;
    if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
    std::size_t digits = j;
    while (j < s.size() && is_digit(s[j])) ++j;
    if (j == digits) return std::nullopt;
    end = j;
  }
  if (end != s.size()) return std::nullopt;
  std::string buf(s[0] == '+' ? s.substr(1) : s);
  return parse_double_checked(buf);
}

std::optional<std::int64_t> parse_xs_integer(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s[0] == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::string double_to_string_v3(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "INF" : "-INF";
  if (d == 0) return std::signbit(d) ? "-0" : "0";
  double a = std::fabs(d);
  if (a >= 1e-6 && a < 1e6) return shortest_fixed(d);
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, d, std::chars_format::scientific);
  std::string sci(buf, ptr);  // e.g. 1.5e+07
  auto e = sci.find('e');
  std::string mantissa = sci.substr(0, e);
  int exponent = std::stoi(sci.substr(e + 1));
  if (mantissa.find('.') == std::string::npos) mantissa += ".0";
  return mantissa + "E" + std::to_string(exponent);
}

double xpath_round(double d) {
  if (std::isnan(d) || std::isinf(d) || d == 0) return d;
  double f = std::floor(d);
  double r = (d - f >= 0.5) ? f + 1 : f;
  if (r == 0 && d < 0) return -0.0;
  return r;
}

double to_number(const xml::XmlDocument& doc, const Value& v, Standard s) {
  if (s == Standard::kV1_0) return number_v1(doc, v);
  auto a = atomize_opt(doc, v, "number");
  if (!a) return kNaN;
  if (const auto* u = std::get_if<Untyped>(&*a)) return parse_xs_double(u->value).value_or(kNaN);
  if (const auto* str = std::get_if<std::string>(&*a)) return parse_xs_double(*str).value_or(kNaN);
  if (const auto* b = std::get_if<bool>(&*a)) return *b ? 1.0 : 0.0;
  return numeric_double(*a);
}

std::string to_string(const xml::XmlDocument& doc, const Value& v, Standard s) {
  if (s == Standard::kV1_0) return string_v1(doc, v);
  auto a = atomize_opt(doc, v, "string");
  return a ? atomic_to_string(*a) : std::string();
}

Value literal_value(const xpath::Literal& lit, Standard s) {
  if (const auto* i = std::get_if<std::int64_t>(&lit)) {
    if (s == Standard::kV1_0) return {static_cast<double>(*i)};
    return {*i};
  }
  if (const auto* d = std::get_if<double>(&lit)) return {*d};
  if (const auto* str = std::get_if<std::string>(&lit)) return {*str};
  return {std::get<bool>(lit)};
}

bool effective_boolean(const xml::XmlDocument& doc, const Value& v, Standard s) {
  (void)doc;
  if (s == Standard::kV1_0) return boolean_v1(v);
  if (v.empty()) return false;
  if (is_node(v.front())) return true;
  if (v.size() > 1) type_error("FORG0006", "effective boolean value of a multi-item atomic sequence");
  const Item& i = v.front();
  if (const auto* b = std::get_if<bool>(&i)) return *b;
  if (const auto* str = std::get_if<std::string>(&i)) return !str->empty();
  if (const auto* k = std::get_if<std::int64_t>(&i)) return *k != 0;
  double d = std::get<double>(i);
  return d != 0 && !std::isnan(d);
}

bool compare_general(const xml::XmlDocument& doc, const Value& lhs, const Value& rhs, Operator op, Standard s) {
  if (!xpath::is_comparison(op)) throw std::invalid_argument("compare_general: not a comparison");
  if (s == Standard::kV1_0) return compare_v1(doc, lhs, rhs, op);
  std::vector<Atomic> la = atomize_all(doc, lhs);
  std::vector<Atomic> ra = atomize_all(doc, rhs);
  for (const Atomic& a : la) {
    for (const Atomic& b : ra) {
      if (compare_atomic_v3(a, b, op)) return true;
    }
  }
  return false;
}

Value arithmetic(const xml::XmlDocument& doc, Operator op, const Value& lhs, const Value& rhs, Standard s) {
  if (!xpath::is_arithmetic(op)) throw std::invalid_argument("arithmetic: not an arithmetic operator");
  if (s == Standard::kV1_0) return {double_op(op, number_v1(doc, lhs), number_v1(doc, rhs))};
  const std::string_view name = xpath::entry_for(op).name;
  auto a = numeric_param(doc, lhs, name);
  auto b = numeric_param(doc, rhs, name);
  if (!a || !b) return {};
  const auto* ai = std::get_if<std::int64_t>(&*a);
  const auto* bi = std::get_if<std::int64_t>(&*b);
  if (ai && bi) {
    switch (op) {
      case Operator::kDiv:
        if (*bi == 0) dynamic_error("FOAR0001", "integer division by zero");
        return {static_cast<double>(*ai) / static_cast<double>(*bi)};
      case Operator::kMod:
        if (*bi == 0) dynamic_error("FOAR0001", "integer modulus by zero");
        if (*bi == -1) return {std::int64_t{0}};
        return {*ai % *bi};
      default:
        return {checked(op, *ai, *bi)};
    }
  }
  return {double_op(op, numeric_double(*a), numeric_double(*b))};
}

Value negate(const xml::XmlDocument& doc, const Value& v, Standard s) {
  if (s == Standard::kV1_0) return {-number_v1(doc, v)};
  auto a = numeric_param(doc, v, "unary -");
  if (!a) return {};
  if (const auto* i = std::get_if<std::int64_t>(&*a)) {
    if (*i == std::numeric_limits<std::int64_t>::min()) dynamic_error("FOAR0002", "integer overflow in negation");
    return {-*i};
  }
  return {-std::get<double>(*a)};
}

Value range_to(const xml::XmlDocument& doc, const Value& lhs, const Value& rhs) {
  auto bound = [&](const Value& v) -> std::optional<std::int64_t> {
    auto a = atomize_opt(doc, v, "to");
    if (!a) return std::nullopt;
    if (const auto* u = std::get_if<Untyped>(&*a)) {
      auto i = parse_xs_integer(u->value);
      if (!i) dynamic_error("FORG0001", "cannot cast \"" + u->value + "\" to xs:integer");
      return i;
    }
    if (const auto* i = std::get_if<std::int64_t>(&*a)) return *i;
    type_error("XPTY0004", "range bound must be xs:integer, got " + std::string(atomic_type_name(*a)));
  };
  auto lo = bound(lhs);
  auto hi = bound(rhs);
  if (!lo || !hi || *lo > *hi) return {};
  // hi - lo may overflow for extreme bounds; compare in unsigned space.
  auto span = static_cast<std::uint64_t>(*hi) - static_cast<std::uint64_t>(*lo);
  if (span >= static_cast<std::uint64_t>(kMaxRangeItems)) {
    dynamic_error("XPDY0130", "range of " + std::to_string(span) + "+ items exceeds the implementation limit");
  }
  Value out;
  out.reserve(span + 1);
  for (std::int64_t i = *lo;; ++i) {
    out.push_back(i);
    if (i == *hi) break;
  }
  return out;
}

Value call_function(const xml::XmlDocument& doc, Function fn, std::span<const Value> args, Standard s) {
  const xpath::CatalogEntry& e = xpath::entry_for(fn);
  if (args.size() != e.params.size()) throw std::invalid_argument("call_function: wrong arity");
  if (s == Standard::kV1_0) {
    if (e.min_standard == Standard::kV3_0) unsupported(std::string(e.name) + "() is not an XPath 1.0 function");
    return call_v1(doc, fn, args);
  }
  return call_v3(doc, fn, args);
}

void check_standard(const xpath::ExprNode& node, Standard s) {
  if (s == Standard::kV3_0) return;
  if (node.kind == xpath::NodeKind::kRange) unsupported("range expressions require XPath 3.0");
  if (node.kind == xpath::NodeKind::kCall && xpath::entry_for(node.function).min_standard == Standard::kV3_0) {
    unsupported(std::string(xpath::entry_for(node.function).name) + "() is not an XPath 1.0 function");
  }
  for (const xpath::ExprNode& c : node.children) check_standard(c, s);
}

void check_standard(const xpath::XPathExpr& expr) {
  for (const xpath::Section& sec : expr.sections) {
    for (const xpath::Predicate& p : sec.predicates) check_standard(p.body, expr.standard);
  }
}

bool predicate_truth(const xml::XmlDocument& doc, const Value& v, std::size_t position, Standard s) {
  if (v.size() == 1) {
    if (const auto* d = std::get_if<double>(&v.front())) return *d == static_cast<double>(position);
    if (const auto* i = std::get_if<std::int64_t>(&v.front())) return *i == static_cast<std::int64_t>(position);
  }
  return effective_boolean(doc, v, s);
}

}  // namespace xpathdiff::eval
