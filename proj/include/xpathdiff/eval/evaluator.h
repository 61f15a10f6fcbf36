#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "xpathdiff/eval/value.h"
#include "xpathdiff/xpath/ast.h"

namespace xpathdiff::eval {

/// Focus for evaluating a predicate expression.
struct EvalContext {
  const xml::XmlDocument* doc = nullptr;
  xml::NodeId node;
  std::size_t position = 1;
  std::size_t size = 1;
  xpath::Standard standard = xpath::Standard::kV1_0;
};

/// Reference evaluator, strategy A: walks parent/child links from each context
/// node and evaluates predicates one context at a time. Top-level results are
/// element nodes in document order without duplicates.
EvalResult evaluate(const xml::XmlDocument& doc, const xpath::XPathExpr& expr);

/// Value of one predicate expression at a context.
EvalResult evaluate_subexpr(const EvalContext& ctx, const xpath::ExprNode& node);

// Section-level building blocks, shared with the query generator so that it
// sees exactly what the designated evaluator sees.

/// Nodes produced by one section prefix for one context node, in axis order.
struct Group {
  xml::NodeId context;
  std::vector<xml::NodeId> nodes;
};

/// Applies a section prefix (step, axis, name test) to a context sequence.
/// `//` first expands each context to its descendant-or-self closure.
std::vector<Group> expand_step(const xml::XmlDocument& doc, std::span<const xml::NodeId> context,
                               const xpath::SectionPrefix& prefix);

/// Contexts a section prefix is applied to after `//` expansion.
std::vector<xml::NodeId> step_contexts(const xml::XmlDocument& doc, std::span<const xml::NodeId> context,
                                       xpath::StepKind step);

/// Keeps the nodes of each group that satisfy `predicate`; positions are
/// renumbered within each group. Throws EvalError.
std::vector<Group> filter_groups(const xml::XmlDocument& doc, const std::vector<Group>& groups,
                                 const xpath::ExprNode& predicate, xpath::Standard standard);

/// Union of all groups in document order.
std::vector<xml::NodeId> merge_groups(const xml::XmlDocument& doc, const std::vector<Group>& groups);

/// Evaluates a predicate at one node with the given focus. Throws EvalError.
bool predicate_holds(const EvalContext& ctx, const xpath::ExprNode& predicate);

/// The sequence every query starts from: the document origin.
inline std::vector<xml::NodeId> initial_context() { return {xml::kDocumentOrigin}; }

}  // namespace xpathdiff::eval
