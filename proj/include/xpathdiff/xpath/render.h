#pragma once

#include <string>

#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::xpath {

/// Single-line query text. Operands of binary/unary/range nodes are
/// parenthesized unless they are literals, `.`, attribute or child steps,
/// `text()` or function calls; `child::` is left implicit.
std::string render(const XPathExpr& expr);
std::string render(const ExprNode& node);
std::string render(const SectionPrefix& prefix);

/// Shortest decimal form that reads back to the same double, never in
/// exponent notation (1.0 has no exponent syntax). Throws for NaN/infinity.
std::string format_number(double v);

}  // namespace xpathdiff::xpath
