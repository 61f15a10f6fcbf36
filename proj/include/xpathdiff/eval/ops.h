#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "xpathdiff/eval/value.h"
#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::eval {

using xpath::Standard;

// Conversions shared by both evaluation strategies. Navigation and predicate
// machinery differ between the strategies; value semantics live here.

std::string string_value(const xml::XmlDocument& doc, const NodeRef& n);
Atomic atomize(const xml::XmlDocument& doc, const Item& item);

/// 1.0 string -> number: optional '-', digits with optional fraction; NaN otherwise.
double string_to_number_v1(std::string_view s);
/// 1.0 number -> string: NaN, Infinity, integers without a point, no exponents.
std::string number_to_string_v1(double d);
/// xs:double lexical form, including INF/-INF/NaN and exponents.
std::optional<double> parse_xs_double(std::string_view s);
std::optional<std::int64_t> parse_xs_integer(std::string_view s);
/// Canonical xs:double string: decimal inside [1e-6, 1e6), else mantissa E exponent.
std::string double_to_string_v3(double d);

double to_number(const xml::XmlDocument& doc, const Value& v, Standard s);
std::string to_string(const xml::XmlDocument& doc, const Value& v, Standard s);
/// XPath round(): nearest integer, halves toward positive infinity.
double xpath_round(double d);

Value literal_value(const xpath::Literal& lit, Standard s);

/// Effective boolean value. Throws EvalError (3.0 FORG0006) for operands
/// that have none.
bool effective_boolean(const xml::XmlDocument& doc, const Value& v, Standard s);

/// General comparison (=, !=, <, <=, >, >=) with existential semantics.
bool compare_general(const xml::XmlDocument& doc, const Value& lhs, const Value& rhs, xpath::Operator op, Standard s);

Value arithmetic(const xml::XmlDocument& doc, xpath::Operator op, const Value& lhs, const Value& rhs, Standard s);
Value negate(const xml::XmlDocument& doc, const Value& v, Standard s);
/// `lhs to rhs` (3.0 only).
Value range_to(const xml::XmlDocument& doc, const Value& lhs, const Value& rhs);

/// Largest sequence `to` may build before raising a dynamic error.
inline constexpr std::int64_t kMaxRangeItems = 1'000'000;

/// Every catalog function except position() and last(), which need the focus.
Value call_function(const xml::XmlDocument& doc, xpath::Function fn, std::span<const Value> args, Standard s);

/// Throws unsupported-feature when a 3.0-only construct occurs in a 1.0 query.
void check_standard(const xpath::ExprNode& node, Standard s);
void check_standard(const xpath::XPathExpr& expr);

/// Predicate outcome for a context at `position`: a single numeric value is a
/// position test, anything else goes through the effective boolean value.
bool predicate_truth(const xml::XmlDocument& doc, const Value& v, std::size_t position, Standard s);

}  // namespace xpathdiff::eval
