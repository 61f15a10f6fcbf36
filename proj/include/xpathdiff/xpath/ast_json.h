#pragma once

#include <nlohmann/json.hpp>

#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::xpath {

/// Structured form of a query, stored next to its text in records and
/// fixtures so that builtin engines can evaluate it without an XPath parser.
nlohmann::json to_json(const ExprNode& node);
nlohmann::json to_json(const XPathExpr& expr);

/// Throws std::invalid_argument on malformed input.
ExprNode expr_node_from_json(const nlohmann::json& j);
XPathExpr xpath_from_json(const nlohmann::json& j);

}  // namespace xpathdiff::xpath
