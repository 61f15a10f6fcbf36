#include "xpathdiff/eval/evaluator.h"

#include "xpathdiff/eval/ops.h"

namespace xpathdiff::eval {

using xpath::ExprNode;
using xpath::Function;
using xpath::NodeKind;
using xpath::Operator;

namespace {

bool name_matches(const xml::XmlDocument& doc, xml::NodeId n, const xpath::SectionPrefix& prefix) {
  return !prefix.tag || doc.node(n).tag == *prefix.tag;
}

Value eval_node(const EvalContext& ctx, const ExprNode& node);

Value eval_binary(const EvalContext& ctx, const ExprNode& node) {
  const xml::XmlDocument& doc = *ctx.doc;
  if (node.op == Operator::kAnd) {
    if (!effective_boolean(doc, eval_node(ctx, node.children[0]), ctx.standard)) return {false};
    return {effective_boolean(doc, eval_node(ctx, node.children[1]), ctx.standard)};
  }
  if (node.op == Operator::kOr) {
    if (effective_boolean(doc, eval_node(ctx, node.children[0]), ctx.standard)) return {true};
    return {effective_boolean(doc, eval_node(ctx, node.children[1]), ctx.standard)};
  }
  Value lhs = eval_node(ctx, node.children[0]);
  Value rhs = eval_node(ctx, node.children[1]);
  if (xpath::is_comparison(node.op)) return {compare_general(doc, lhs, rhs, node.op, ctx.standard)};
  return arithmetic(doc, node.op, lhs, rhs, ctx.standard);
}

Value eval_node(const EvalContext& ctx, const ExprNode& node) {
  const xml::XmlDocument& doc = *ctx.doc;
  const xml::ElementNode& self = doc.node(ctx.node);
  switch (node.kind) {
    case NodeKind::kLiteral:
      return literal_value(node.literal, ctx.standard);
    case NodeKind::kContextItem:
      return {NodeRef{ctx.node}};
    case NodeKind::kAttribute: {
      Value out;
      for (std::size_t i = 0; i < self.attributes.size(); ++i) {
        if (node.name == "*" || self.attributes[i].name == node.name) {
          out.push_back(NodeRef{ctx.node, RefKind::kAttribute, static_cast<std::uint16_t>(i)});
        }
      }
      return out;
    }
    case NodeKind::kChildPath: {
      Value out;
      for (xml::NodeId c : self.children) {
        if (doc.node(c).tag == node.name) out.push_back(NodeRef{c});
      }
      return out;
    }
    case NodeKind::kText:
      if (self.text && !xml::lexical(*self.text).empty()) return {NodeRef{ctx.node, RefKind::kText}};
      return {};
    case NodeKind::kCall: {
      if (node.function == Function::kPosition || node.function == Function::kLast) {
        std::size_t v = node.function == Function::kPosition ? ctx.position : ctx.size;
        if (ctx.standard == xpath::Standard::kV1_0) return {static_cast<double>(v)};
        return {static_cast<std::int64_t>(v)};
      }
      std::vector<Value> args;
      args.reserve(node.children.size());
      for (const ExprNode& c : node.children) args.push_back(eval_node(ctx, c));
      return call_function(doc, node.function, args, ctx.standard);
    }
    case NodeKind::kBinary:
      return eval_binary(ctx, node);
    case NodeKind::kUnary: {
      Value arg = eval_node(ctx, node.children[0]);
      if (node.op == Operator::kNot) return {!effective_boolean(doc, arg, ctx.standard)};
      return negate(doc, arg, ctx.standard);
    }
    case NodeKind::kRange: {
      Value lhs = eval_node(ctx, node.children[0]);
      Value rhs = eval_node(ctx, node.children[1]);
      return range_to(doc, lhs, rhs);
    }
  }
  return {};
}

}  // namespace

bool predicate_holds(const EvalContext& ctx, const ExprNode& predicate) {
  return predicate_truth(*ctx.doc, eval_node(ctx, predicate), ctx.position, ctx.standard);
}

std::vector<xml::NodeId> step_contexts(const xml::XmlDocument& doc, std::span<const xml::NodeId> context,
                                       xpath::StepKind step) {
  if (step == xpath::StepKind::kSlash) return {context.begin(), context.end()};
  std::vector<xml::NodeId> expanded;
  for (xml::NodeId c : context) {
    if (c == xml::kDocumentOrigin) expanded.push_back(c);
    for (xml::NodeId d : xml::navigate_axis(doc, c, xml::Axis::kDescendantOrSelf)) expanded.push_back(d);
  }
  // The origin precedes every element; keep it first.
  bool has_origin = false;
  std::vector<xml::NodeId> elements;
  for (xml::NodeId n : expanded) {
    if (n == xml::kDocumentOrigin) {
      has_origin = true;
    } else {
      elements.push_back(n);
    }
  }
  std::vector<xml::NodeId> out;
  if (has_origin) out.push_back(xml::kDocumentOrigin);
  for (xml::NodeId n : xml::document_order_dedup(doc, elements)) out.push_back(n);
  return out;
}

std::vector<Group> expand_step(const xml::XmlDocument& doc, std::span<const xml::NodeId> context,
                               const xpath::SectionPrefix& prefix) {
  std::vector<Group> groups;
  for (xml::NodeId c : step_contexts(doc, context, prefix.step)) {
    Group g{c, {}};
    for (xml::NodeId n : xml::navigate_axis(doc, c, prefix.axis)) {
      if (name_matches(doc, n, prefix)) g.nodes.push_back(n);
    }
    if (!g.nodes.empty()) groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<Group> filter_groups(const xml::XmlDocument& doc, const std::vector<Group>& groups,
                                 const ExprNode& predicate, xpath::Standard standard) {
  std::vector<Group> out;
  for (const Group& g : groups) {
    Group kept{g.context, {}};
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      EvalContext ctx{&doc, g.nodes[i], i + 1, g.nodes.size(), standard};
      if (predicate_holds(ctx, predicate)) kept.nodes.push_back(g.nodes[i]);
    }
    if (!kept.nodes.empty()) out.push_back(std::move(kept));
  }
  return out;
}

std::vector<xml::NodeId> merge_groups(const xml::XmlDocument& doc, const std::vector<Group>& groups) {
  std::vector<xml::NodeId> all;
  for (const Group& g : groups) all.insert(all.end(), g.nodes.begin(), g.nodes.end());
  return xml::document_order_dedup(doc, all);
}

EvalResult evaluate(const xml::XmlDocument& doc, const xpath::XPathExpr& expr) {
  EvalResult result;
  try {
    check_standard(expr);
    std::vector<xml::NodeId> current = initial_context();
    for (const xpath::Section& section : expr.sections) {
      std::vector<Group> groups = expand_step(doc, current, section.prefix);
      for (const xpath::Predicate& p : section.predicates) groups = filter_groups(doc, groups, p.body, expr.standard);
      current = merge_groups(doc, groups);
      if (current.empty()) break;
    }
    for (xml::NodeId n : current) result.value.push_back(NodeRef{n});
  } catch (const EvalError& e) {
    result.value.clear();
    result.error = e;
  }
  return result;
}

EvalResult evaluate_subexpr(const EvalContext& ctx, const ExprNode& node) {
  EvalResult result;
  try {
    check_standard(node, ctx.standard);
    result.value = eval_node(ctx, node);
  } catch (const EvalError& e) {
    result.error = e;
  }
  return result;
}

}  // namespace xpathdiff::eval
