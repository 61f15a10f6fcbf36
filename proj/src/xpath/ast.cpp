#include "xpathdiff/xpath/ast.h"

#include <algorithm>
#include <stdexcept>

namespace xpathdiff::xpath {

std::string_view standard_name(Standard s) { return s == Standard::kV1_0 ? "1.0" : "3.0"; }

std::optional<Standard> standard_from_name(std::string_view name) {
  if (name == "1.0" || name == "1" || name == "v1") return Standard::kV1_0;
  if (name == "3.0" || name == "3" || name == "v3") return Standard::kV3_0;
  return std::nullopt;
}

bool is_comparison(Operator op) { return op >= Operator::kEq && op <= Operator::kGe; }

bool is_arithmetic(Operator op) { return op <= Operator::kMod; }

Operator opposite(Operator op) {
  switch (op) {
    case Operator::kEq: return Operator::kNe;
    case Operator::kNe: return Operator::kEq;
    case Operator::kLt: return Operator::kGe;
    case Operator::kGe: return Operator::kLt;
    case Operator::kLe: return Operator::kGt;
    case Operator::kGt: return Operator::kLe;
    default: throw std::invalid_argument("opposite: not a comparison operator");
  }
}

ExprNode ExprNode::lit(Literal v) {
  ExprNode n;
  n.kind = NodeKind::kLiteral;
  n.literal = std::move(v);
  return n;
}

ExprNode ExprNode::context_item() {
  ExprNode n;
  n.kind = NodeKind::kContextItem;
  return n;
}

ExprNode ExprNode::attribute(std::string name) {
  ExprNode n;
  n.kind = NodeKind::kAttribute;
  n.name = std::move(name);
  return n;
}

ExprNode ExprNode::child_path(std::string tag) {
  ExprNode n;
  n.kind = NodeKind::kChildPath;
  n.name = std::move(tag);
  return n;
}

ExprNode ExprNode::text() {
  ExprNode n;
  n.kind = NodeKind::kText;
  return n;
}

ExprNode ExprNode::call(Function fn, std::vector<ExprNode> args) {
  ExprNode n;
  n.kind = NodeKind::kCall;
  n.function = fn;
  n.children = std::move(args);
  return n;
}

ExprNode ExprNode::binary(Operator op, ExprNode lhs, ExprNode rhs) {
  ExprNode n;
  n.kind = NodeKind::kBinary;
  n.op = op;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

ExprNode ExprNode::unary(Operator op, ExprNode arg) {
  ExprNode n;
  n.kind = NodeKind::kUnary;
  n.op = op;
  n.children.push_back(std::move(arg));
  return n;
}

ExprNode ExprNode::range(ExprNode lhs, ExprNode rhs) {
  ExprNode n;
  n.kind = NodeKind::kRange;
  n.children.push_back(std::move(lhs));
  n.children.push_back(std::move(rhs));
  return n;
}

std::size_t depth(const ExprNode& node) {
  std::size_t d = 0;
  for (const ExprNode& c : node.children) d = std::max(d, depth(c));
  return d + 1;
}

std::size_t node_count(const ExprNode& node) {
  std::size_t n = 1;
  for (const ExprNode& c : node.children) n += node_count(c);
  return n;
}

std::size_t subject_count(const ExprNode& node) {
  std::size_t n = 0;
  switch (node.kind) {
    case NodeKind::kContextItem:
    case NodeKind::kAttribute:
    case NodeKind::kChildPath:
    case NodeKind::kText:
      n = 1;
      break;
    case NodeKind::kCall:
      n = (node.function == Function::kPosition || node.function == Function::kLast) ? 1 : 0;
      break;
    default:
      break;
  }
  for (const ExprNode& c : node.children) n += subject_count(c);
  return n;
}

std::size_t node_count(const XPathExpr& expr) {
  std::size_t n = 0;
  for (const Section& s : expr.sections) {
    n += 1;
    for (const Predicate& p : s.predicates) n += node_count(p.body);
  }
  return n;
}

}  // namespace xpathdiff::xpath
