#pragma once

#include <cstdint>
#include <vector>

#include "xpathdiff/eval/value.h"
#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::eval {

/// Reference evaluator, strategy B. Navigates with the pre-order interval
/// encoding (order, subtree end, depth) instead of links, materializes each
/// step for the whole context set at once, and evaluates predicates column by
/// column over (group, node, position, size) rows. Same contract as evaluate().
EvalResult evaluate_strategy_b(const xml::XmlDocument& doc, const xpath::XPathExpr& expr);

/// Interval-encoded axis navigation by pre-order position; `context` may be
/// XmlDocument::kOriginOrder. Canonical axis order, appended to `out`.
void interval_axis(const xml::XmlDocument& doc, std::int32_t context, xml::Axis axis, std::vector<std::uint32_t>& out);

}  // namespace xpathdiff::eval
