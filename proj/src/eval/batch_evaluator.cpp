#include "xpathdiff/eval/batch_evaluator.h"

#include <algorithm>
#include <span>

#include "xpathdiff/eval/ops.h"

namespace xpathdiff::eval {

using xml::Axis;
using xpath::ExprNode;
using xpath::Function;
using xpath::NodeKind;
using xpath::Operator;

namespace {

constexpr std::int32_t kOrigin = xml::XmlDocument::kOriginOrder;

std::int32_t interval_parent(const xml::XmlDocument& doc, std::uint32_t c) {
  for (std::int64_t p = static_cast<std::int64_t>(c) - 1; p >= 0; --p) {
    if (doc.subtree_end(static_cast<std::uint32_t>(p)) >= c) return static_cast<std::int32_t>(p);
  }
  return kOrigin;
}

struct Row {
  std::uint32_t group;
  std::uint32_t node;  // pre-order position
  std::uint32_t position;
  std::uint32_t size;
};

struct Cell {
  Value value;
  std::optional<EvalError> error;
};

class Batch {
 public:
  Batch(const xml::XmlDocument& doc, xpath::Standard standard) : doc_(doc), standard_(standard) {}

  /// One cell per row, aligned with `rows`.
  std::vector<Cell> eval(const ExprNode& node, std::span<const Row> rows) const {
    switch (node.kind) {
      case NodeKind::kLiteral: {
        Value v = literal_value(node.literal, standard_);
        return std::vector<Cell>(rows.size(), Cell{v, std::nullopt});
      }
      case NodeKind::kContextItem:
      case NodeKind::kAttribute:
      case NodeKind::kChildPath:
      case NodeKind::kText: {
        std::vector<Cell> out(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) out[r].value = subject(node, rows[r].node);
        return out;
      }
      case NodeKind::kCall:
        return call(node, rows);
      case NodeKind::kBinary:
        if (node.op == Operator::kAnd || node.op == Operator::kOr) return logical(node, rows);
        return apply(node, rows, [&](std::vector<Value>& args) {
          if (xpath::is_comparison(node.op)) {
            return Value{compare_general(doc_, args[0], args[1], node.op, standard_)};
          }
          return arithmetic(doc_, node.op, args[0], args[1], standard_);
        });
      case NodeKind::kUnary:
        return apply(node, rows, [&](std::vector<Value>& args) {
          if (node.op == Operator::kNot) return Value{!effective_boolean(doc_, args[0], standard_)};
          return negate(doc_, args[0], standard_);
        });
      case NodeKind::kRange:
        return apply(node, rows, [&](std::vector<Value>& args) { return range_to(doc_, args[0], args[1]); });
    }
    return std::vector<Cell>(rows.size());
  }

 private:
  Value subject(const ExprNode& node, std::uint32_t order) const {
    const xml::ElementNode& self = doc_.at(order);
    switch (node.kind) {
      case NodeKind::kContextItem:
        return {NodeRef{self.id}};
      case NodeKind::kAttribute: {
        Value out;
        for (std::size_t i = 0; i < self.attributes.size(); ++i) {
          if (node.name == "*" || self.attributes[i].name == node.name) {
            out.push_back(NodeRef{self.id, RefKind::kAttribute, static_cast<std::uint16_t>(i)});
          }
        }
        return out;
      }
      case NodeKind::kChildPath: {
        Value out;
        std::vector<std::uint32_t> kids;
        interval_axis(doc_, static_cast<std::int32_t>(order), Axis::kChild, kids);
        for (std::uint32_t k : kids) {
          if (doc_.at(k).tag == node.name) out.push_back(NodeRef{doc_.at(k).id});
        }
        return out;
      }
      default:
        if (self.text && !xml::lexical(*self.text).empty()) return {NodeRef{self.id, RefKind::kText}};
        return {};
    }
  }

  template <typename F>
  std::vector<Cell> apply(const ExprNode& node, std::span<const Row> rows, F&& fn) const {
    std::vector<std::vector<Cell>> args;
    args.reserve(node.children.size());
    for (const ExprNode& c : node.children) args.push_back(eval(c, rows));
    std::vector<Cell> out(rows.size());
    std::vector<Value> row_args(node.children.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
      bool failed = false;
      for (std::size_t a = 0; a < args.size(); ++a) {
        if (args[a][r].error) {
          out[r].error = args[a][r].error;
          failed = true;
          break;
        }
        row_args[a] = std::move(args[a][r].value);
      }
      if (failed) continue;
      try {
        out[r].value = fn(row_args);
      } catch (const EvalError& e) {
        out[r].error = e;
      }
    }
    return out;
  }

  std::vector<Cell> call(const ExprNode& node, std::span<const Row> rows) const {
    if (node.function == Function::kPosition || node.function == Function::kLast) {
      std::vector<Cell> out(rows.size());
      for (std::size_t r = 0; r < rows.size(); ++r) {
        std::uint32_t v = node.function == Function::kPosition ? rows[r].position : rows[r].size;
        if (standard_ == xpath::Standard::kV1_0) {
          out[r].value = {static_cast<double>(v)};
        } else {
          out[r].value = {static_cast<std::int64_t>(v)};
        }
      }
      return out;
    }
    return apply(node, rows,
                 [&](std::vector<Value>& args) { return call_function(doc_, node.function, args, standard_); });
  }

  // and/or: the right operand only sees the rows the left one did not decide.
  std::vector<Cell> logical(const ExprNode& node, std::span<const Row> rows) const {
    const bool is_and = node.op == Operator::kAnd;
    std::vector<Cell> out(rows.size());
    std::vector<Cell> left = eval(node.children[0], rows);
    std::vector<std::size_t> pending;
    std::vector<Row> pending_rows;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (left[r].error) {
        out[r].error = left[r].error;
        continue;
      }
      try {
        bool b = effective_boolean(doc_, left[r].value, standard_);
        if (b != is_and) {
          out[r].value = {b};
        } else {
          pending.push_back(r);
          pending_rows.push_back(rows[r]);
        }
      } catch (const EvalError& e) {
        out[r].error = e;
      }
    }
    if (pending.empty()) return out;
    std::vector<Cell> right = eval(node.children[1], pending_rows);
    for (std::size_t i = 0; i < pending.size(); ++i) {
      Cell& dst = out[pending[i]];
      if (right[i].error) {
        dst.error = right[i].error;
        continue;
      }
      try {
        dst.value = {effective_boolean(doc_, right[i].value, standard_)};
      } catch (const EvalError& e) {
        dst.error = e;
      }
    }
    return out;
  }

  const xml::XmlDocument& doc_;
  xpath::Standard standard_;
};

std::vector<std::int32_t> expand_contexts(const xml::XmlDocument& doc, const std::vector<std::int32_t>& current,
                                          xpath::StepKind step) {
  if (step == xpath::StepKind::kSlash) return current;
  std::vector<char> mark(doc.size(), 0);
  bool origin = false;
  for (std::int32_t c : current) {
    if (c == kOrigin) {
      origin = true;
      std::fill(mark.begin(), mark.end(), 1);
    } else {
      auto o = static_cast<std::uint32_t>(c);
      std::fill(mark.begin() + o, mark.begin() + doc.subtree_end(o) + 1, 1);
    }
  }
  std::vector<std::int32_t> out;
  if (origin) out.push_back(kOrigin);
  for (std::uint32_t o = 0; o < doc.size(); ++o) {
    if (mark[o]) out.push_back(static_cast<std::int32_t>(o));
  }
  return out;
}

}  // namespace

void interval_axis(const xml::XmlDocument& doc, std::int32_t context, Axis axis, std::vector<std::uint32_t>& out) {
  const auto n = static_cast<std::uint32_t>(doc.size());
  if (context == kOrigin) {
    switch (axis) {
      case Axis::kChild: out.push_back(0); break;
      case Axis::kDescendant:
      case Axis::kDescendantOrSelf:
        for (std::uint32_t o = 0; o < n; ++o) out.push_back(o);
        break;
      default: break;
    }
    return;
  }
  const auto c = static_cast<std::uint32_t>(context);
  const std::uint32_t end = doc.subtree_end(c);
  switch (axis) {
    case Axis::kSelf:
      out.push_back(c);
      break;
    case Axis::kChild:
      for (std::uint32_t o = c + 1; o <= end; o = doc.subtree_end(o) + 1) out.push_back(o);
      break;
    case Axis::kDescendantOrSelf:
      out.push_back(c);
      [[fallthrough]];
    case Axis::kDescendant:
      for (std::uint32_t o = c + 1; o <= end; ++o) out.push_back(o);
      break;
    case Axis::kParent: {
      std::int32_t p = interval_parent(doc, c);
      if (p != kOrigin) out.push_back(static_cast<std::uint32_t>(p));
      break;
    }
    case Axis::kAncestorOrSelf:
      out.push_back(c);
      [[fallthrough]];
    case Axis::kAncestor:
      for (std::int64_t p = static_cast<std::int64_t>(c) - 1; p >= 0; --p) {
        if (doc.subtree_end(static_cast<std::uint32_t>(p)) >= c) out.push_back(static_cast<std::uint32_t>(p));
      }
      break;
    case Axis::kFollowing:
      for (std::uint32_t o = end + 1; o < n; ++o) out.push_back(o);
      break;
    case Axis::kPreceding:
      for (std::int64_t o = static_cast<std::int64_t>(c) - 1; o >= 0; --o) {
        if (doc.subtree_end(static_cast<std::uint32_t>(o)) < c) out.push_back(static_cast<std::uint32_t>(o));
      }
      break;
    case Axis::kFollowingSibling: {
      std::int32_t p = interval_parent(doc, c);
      if (p == kOrigin) break;
      const std::uint32_t pend = doc.subtree_end(static_cast<std::uint32_t>(p));
      for (std::uint32_t o = end + 1; o <= pend; o = doc.subtree_end(o) + 1) out.push_back(o);
      break;
    }
    case Axis::kPrecedingSibling: {
      std::int32_t p = interval_parent(doc, c);
      if (p == kOrigin) break;
      std::vector<std::uint32_t> before;
      for (std::uint32_t o = static_cast<std::uint32_t>(p) + 1; o < c; o = doc.subtree_end(o) + 1) before.push_back(o);
      out.insert(out.end(), before.rbegin(), before.rend());
      break;
    }
  }
}

EvalResult evaluate_strategy_b(const xml::XmlDocument& doc, const xpath::XPathExpr& expr) {
  EvalResult result;
  try {
    check_standard(expr);
    Batch batch(doc, expr.standard);
    std::vector<std::int32_t> current{kOrigin};
    std::vector<std::uint32_t> scratch;
    for (const xpath::Section& section : expr.sections) {
      std::vector<std::int32_t> contexts = expand_contexts(doc, current, section.prefix.step);
      std::vector<Row> rows;
      for (std::uint32_t g = 0; g < contexts.size(); ++g) {
        scratch.clear();
        interval_axis(doc, contexts[g], section.prefix.axis, scratch);
        std::size_t first = rows.size();
        for (std::uint32_t o : scratch) {
          if (!section.prefix.tag || doc.at(o).tag == *section.prefix.tag) rows.push_back({g, o, 0, 0});
        }
        const auto size = static_cast<std::uint32_t>(rows.size() - first);
        for (std::uint32_t k = 0; k < size; ++k) {
          rows[first + k].position = k + 1;
          rows[first + k].size = size;
        }
      }

      for (const xpath::Predicate& p : section.predicates) {
        std::vector<Cell> cells = batch.eval(p.body, rows);
        std::vector<Row> kept;
        for (std::size_t r = 0; r < rows.size(); ++r) {
          if (cells[r].error) throw *cells[r].error;
          if (predicate_truth(doc, cells[r].value, rows[r].position, expr.standard)) kept.push_back(rows[r]);
        }
        // Renumber within each group (rows of a group are contiguous).
        for (std::size_t i = 0; i < kept.size();) {
          std::size_t j = i;
          while (j < kept.size() && kept[j].group == kept[i].group) ++j;
          for (std::size_t k = i; k < j; ++k) {
            kept[k].position = static_cast<std::uint32_t>(k - i + 1);
            kept[k].size = static_cast<std::uint32_t>(j - i);
          }
          i = j;
        }
        rows = std::move(kept);
      }

      std::vector<char> selected(doc.size(), 0);
      for (const Row& r : rows) selected[r.node] = 1;
      current.clear();
      for (std::uint32_t o = 0; o < doc.size(); ++o) {
        if (selected[o]) current.push_back(static_cast<std::int32_t>(o));
      }
      if (current.empty()) break;
    }
    for (std::int32_t o : current) {
      if (o != kOrigin) result.value.push_back(NodeRef{doc.at(static_cast<std::uint32_t>(o)).id});
    }
  } catch (const EvalError& e) {
    result.value.clear();
    result.error = e;
  }
  return result;
}

}  // namespace xpathdiff::eval
