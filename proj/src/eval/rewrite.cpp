#include "xpathdiff/eval/rewrite.h"

#include <array>

namespace xpathdiff::eval {

using xpath::ExprNode;
using xpath::Function;
using xpath::NodeKind;
using xpath::Operator;

namespace {

constexpr std::array<std::pair<Mutation, std::string_view>, 3> kNames{{
    {Mutation::kMulCompareRewrite, "mul_compare_rewrite"},
    {Mutation::kOrTrueRewrite, "or_true_rewrite"},
    {Mutation::kTailSubseqOffByOne, "tail_subseq_off_by_one"},
}};

std::optional<double> numeric_literal(const ExprNode& n) {
  if (n.kind != NodeKind::kLiteral) return std::nullopt;
  if (const auto* i = std::get_if<std::int64_t>(&n.literal)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&n.literal)) return *d;
  return std::nullopt;
}

bool is_relational(Operator op) {
  return op == Operator::kLt || op == Operator::kLe || op == Operator::kGt || op == Operator::kGe;
}

bool rewrite_mul_compare(ExprNode& n) {
  if (n.kind != NodeKind::kBinary || !is_relational(n.op)) return false;
  ExprNode& lhs = n.children[0];
  if (lhs.kind != NodeKind::kBinary || lhs.op != Operator::kMul || !numeric_literal(lhs.children[1])) return false;
  ExprNode x = std::move(lhs.children[0]);
  ExprNode a = std::move(lhs.children[1]);
  ExprNode b = std::move(n.children[1]);
  n = ExprNode::binary(n.op, std::move(x), ExprNode::binary(Operator::kDiv, std::move(b), std::move(a)));
  return true;
}

// Lower bound (x >= c / x > c) or upper bound (x <= c / x < c) on a subject.
struct Bound {
  const ExprNode* subject;
  double value;
  bool lower;
  bool strict;
};

std::optional<Bound> bound_of(const ExprNode& n) {
  if (n.kind != NodeKind::kBinary || !is_relational(n.op)) return std::nullopt;
  auto c = numeric_literal(n.children[1]);
  if (!c) return std::nullopt;
  bool lower = n.op == Operator::kGe || n.op == Operator::kGt;
  bool strict = n.op == Operator::kGt || n.op == Operator::kLt;
  return Bound{&n.children[0], *c, lower, strict};
}

bool rewrite_or_true(ExprNode& n) {
  if (n.kind != NodeKind::kBinary || n.op != Operator::kOr) return false;
  auto a = bound_of(n.children[0]);
  auto b = bound_of(n.children[1]);
  if (!a || !b || a->lower == b->lower || !(*a->subject == *b->subject)) return false;
  const Bound& lo = a->lower ? *a : *b;
  const Bound& hi = a->lower ? *b : *a;
  bool covers = (lo.strict || hi.strict) ? lo.value < hi.value : lo.value <= hi.value;
  if (!covers) return false;
  n = ExprNode::lit(true);
  return true;
}

bool rewrite_tail_subseq(ExprNode& n) {
  if (n.kind != NodeKind::kCall || n.function != Function::kTail) return false;
  ExprNode& inner = n.children[0];
  if (inner.kind != NodeKind::kCall || inner.function != Function::kSubsequence) return false;
  ExprNode len = std::move(inner.children[2]);
  inner.children[2] = ExprNode::binary(Operator::kSub, std::move(len), ExprNode::integer(1));
  return true;
}

}  // namespace

std::string_view mutation_name(Mutation m) {
  for (const auto& [k, v] : kNames) {
    if (k == m) return v;
  }
  return "?";
}

std::optional<Mutation> mutation_from_name(std::string_view name) {
  for (const auto& [k, v] : kNames) {
    if (v == name) return k;
  }
  return std::nullopt;
}

std::size_t apply_mutation(Mutation m, ExprNode& node) {
  std::size_t sites = 0;
  for (ExprNode& c : node.children) sites += apply_mutation(m, c);
  bool hit = false;
  switch (m) {
    case Mutation::kMulCompareRewrite: hit = rewrite_mul_compare(node); break;
    case Mutation::kOrTrueRewrite: hit = rewrite_or_true(node); break;
    case Mutation::kTailSubseqOffByOne: hit = rewrite_tail_subseq(node); break;
  }
  return sites + (hit ? 1 : 0);
}

xpath::XPathExpr apply_mutation(Mutation m, const xpath::XPathExpr& expr, std::size_t* sites) {
  xpath::XPathExpr out = expr;
  std::size_t total = 0;
  for (xpath::Section& s : out.sections) {
    for (xpath::Predicate& p : s.predicates) total += apply_mutation(m, p.body);
  }
  if (sites) *sites = total;
  return out;
}

}  // namespace xpathdiff::eval
