#include "xpathdiff/gen/query_gen.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "xpathdiff/docgen/doc_gen.h"
#include "xpathdiff/eval/ops.h"
#include "xpathdiff/xpath/catalog.h"

namespace xpathdiff::gen {

using eval::Value;
using xml::Axis;
using xml::NodeId;
using xpath::CatalogEntry;
using xpath::EntryForm;
using xpath::ExprNode;
using xpath::Function;
using xpath::NodeKind;
using xpath::Operator;
using xpath::Standard;
using xpath::ValueKind;

std::string_view mode_name(Mode m) { return m == Mode::kTargeted ? "targeted" : "untargeted"; }

std::optional<Mode> mode_from_name(std::string_view name) {
  if (name == "targeted") return Mode::kTargeted;
  if (name == "untargeted") return Mode::kUntargeted;
  return std::nullopt;
}

void GenConfig::validate() const {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0 && p <= 1)) throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  };
  prob(wildcard_prob, "wildcard_prob");
  prob(equal_operand_prob, "equal_operand_prob");
  prob(not_wrap_prob, "not_wrap_prob");
  prob(positional_prob, "positional_prob");
  prob(subject_kind_prob, "subject_kind_prob");
  if (min_sections < 1 || min_sections > max_sections) throw std::invalid_argument("bad section range");
  if (min_predicates > max_predicates) throw std::invalid_argument("bad predicate range");
  if (max_depth < 3) throw std::invalid_argument("max_depth must be at least 3");
  if (max_subjects < 1) throw std::invalid_argument("max_subjects must be at least 1");
  if (predicate_attempts < 1) throw std::invalid_argument("predicate_attempts must be at least 1");
}

namespace {

bool is_relational(Operator op) {
  return op == Operator::kLt || op == Operator::kLe || op == Operator::kGt || op == Operator::kGe;
}

constexpr std::array<Operator, 6> kComparisons = {Operator::kEq, Operator::kNe, Operator::kLt,
                                                  Operator::kLe, Operator::kGt, Operator::kGe};

std::optional<Value> value_at(const xml::XmlDocument& doc, const PredicateSite& site, const ExprNode& node) {
  eval::EvalContext ctx{&doc, site.target, site.position, site.size, site.standard};
  eval::EvalResult r = eval::evaluate_subexpr(ctx, node);
  if (!r.ok()) return std::nullopt;
  return std::move(r.value);
}

/// Kind of `node`'s value: static for node-sets, otherwise read off the value.
ValueKind kind_of(const ExprNode& node, const Value& v, Standard s) {
  ValueKind st = xpath::infer_kind(node, s);
  if (st == ValueKind::kNodeSet) return st;
  if (v.size() != 1) return s == Standard::kV1_0 ? st : ValueKind::kSequence;
  const eval::Item& i = v.front();
  if (std::holds_alternative<eval::NodeRef>(i)) return ValueKind::kNodeSet;
  if (std::holds_alternative<double>(i) || std::holds_alternative<std::int64_t>(i)) return ValueKind::kNumber;
  if (std::holds_alternative<std::string>(i)) return ValueKind::kString;
  return ValueKind::kBoolean;
}

ExprNode number_literal(double d) {
  if (std::floor(d) == d && std::fabs(d) < 1e15) return ExprNode::integer(static_cast<std::int64_t>(d));
  return ExprNode::lit(d);
}

std::optional<std::int64_t> integer_lexical(const std::string& s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size() || s.size() - i > 15) return std::nullopt;
  for (std::size_t k = i; k < s.size(); ++k) {
    if (s[k] < '0' || s[k] > '9') return std::nullopt;
  }
  return std::stoll(s);
}

class Builder {
 public:
  Builder(Rng& rng, const xml::XmlDocument& doc, const GenConfig& cfg, const PredicateSite* site)
      : rng_(rng), doc_(doc), cfg_(cfg), site_(site), std_(cfg.standard) {}

  ExprNode build() {
    Tracked t = subject();
    std::size_t extensions = 0;
    while (extensions < cfg_.max_depth && rng_.chance(0.6)) {
      if (!extend(t, true)) break;
      ++extensions;
    }
    ExprNode p = finalize(t);
    if (rng_.chance(0.5)) {
      // Second condition, often over the very same expression; a relational
      // test on it then tends to be closed from the other side.
      const bool same = rng_.chance(0.7);
      Tracked base = same ? t : subject();
      std::optional<ExprNode> q;
      if (same && p.kind == NodeKind::kBinary && is_relational(p.op) && rng_.chance(0.8)) {
        q = bounded_from_other_side(t, p);
      }
      if (!q) {
        if (rng_.chance(0.3)) extend(base, false);
        q = finalize(base, /*allow_exists=*/false);
      }
      Operator op = rng_.chance(0.5) ? Operator::kOr : Operator::kAnd;
      ExprNode combined = ExprNode::binary(op, p, std::move(*q));
      if (fits(combined) && evaluable(combined)) p = std::move(combined);
    }
    return p;
  }

 private:
  struct Tracked {
    ExprNode node;
    Value value;
    ValueKind kind;
  };

  bool targeted() const { return site_ != nullptr; }

  // Leaves room for finalize() and a not() from rectification.
  bool fits(const ExprNode& n) const {
    return xpath::depth(n) + 2 <= cfg_.max_depth && xpath::subject_count(n) <= cfg_.max_subjects;
  }

  bool evaluable(const ExprNode& n) const { return !targeted() || value_at(doc_, *site_, n).has_value(); }

  std::optional<Tracked> track(ExprNode n) const {
    if (!targeted()) {
      ValueKind k = xpath::infer_kind(n, std_);
      return Tracked{std::move(n), {}, k};
    }
    auto v = value_at(doc_, *site_, n);
    if (!v) return std::nullopt;
    ValueKind k = kind_of(n, *v, std_);
    return Tracked{std::move(n), std::move(*v), k};
  }

  ExprNode constant_range() {
    std::int64_t lo = rng_.uniform(-2, 3);
    return ExprNode::range(ExprNode::integer(lo), ExprNode::integer(lo + rng_.uniform(0, 4)));
  }

  ExprNode focus_subject() {
    return ExprNode::call(rng_.chance(0.5) ? Function::kPosition : Function::kLast);
  }

  Tracked subject() {
    std::vector<ExprNode> options;
    const bool v3 = std_ == Standard::kV3_0;
    if (targeted()) {
      const xml::ElementNode& e = doc_.node(site_->target);
      if (!rng_.chance(cfg_.subject_kind_prob)) {
        if (cfg_.enable_child_paths) {
          std::vector<std::string> tags;
          for (NodeId c : e.children) {
            const std::string& tag = doc_.node(c).tag;
            if (std::find(tags.begin(), tags.end(), tag) == tags.end()) tags.push_back(tag);
          }
          for (std::string& tag : tags) options.push_back(ExprNode::child_path(std::move(tag)));
        }
        if (v3 && rng_.chance(0.3)) options.push_back(constant_range());
      }
      if (options.empty()) {
        if (rng_.chance(0.1)) {
          options.push_back(focus_subject());
        } else {
          options.push_back(ExprNode::context_item());
          for (const xml::Attribute& a : e.attributes) options.push_back(ExprNode::attribute(a.name));
          if (e.text && !xml::lexical(*e.text).empty()) options.push_back(ExprNode::text());
        }
      }
    } else {
      if (!rng_.chance(cfg_.subject_kind_prob)) {
        if (cfg_.enable_child_paths) {
          for (std::string& tag : doc_.tags()) options.push_back(ExprNode::child_path(std::move(tag)));
        }
        if (v3 && rng_.chance(0.3)) options.push_back(constant_range());
      }
      if (options.empty()) {
        if (rng_.chance(0.1)) {
          options.push_back(focus_subject());
        } else {
          options.push_back(ExprNode::context_item());
          options.push_back(ExprNode::text());
          for (std::string& name : doc_.attribute_names()) options.push_back(ExprNode::attribute(std::move(name)));
        }
      }
    }
    ExprNode chosen = options[rng_.index(options.size())];
    if (auto t = track(chosen)) return std::move(*t);
    // Subjects never fail at their own target; this is a safety net.
    return *track(ExprNode::context_item());
  }

  std::string current_string(const Tracked& t) const {
    if (!targeted() || t.value.empty()) return docgen::random_string(rng_, {0, 4});
    try {
      Value first{t.value.front()};
      return eval::to_string(doc_, first, std_);
    } catch (const eval::EvalError&) {
      return "";
    }
  }

  ExprNode string_literal_like(const Tracked& t, Function fn) {
    std::string s = current_string(t);
    if (!s.empty() && rng_.chance(0.7)) {
      auto len = static_cast<std::size_t>(rng_.index(s.size() + 1));
      if (fn == Function::kStartsWith) return ExprNode::lit(s.substr(0, len));
      auto start = rng_.index(s.size() - len + 1);
      return ExprNode::lit(s.substr(start, len));
    }
    return ExprNode::lit(docgen::random_string(rng_, {0, 3}));
  }

  std::optional<ExprNode> equal_literal(const Value& v) {
    if (v.empty()) return std::nullopt;
    const eval::Item& item = v[rng_.index(v.size())];
    if (const auto* n = std::get_if<eval::NodeRef>(&item)) {
      std::string sv = eval::string_value(doc_, *n);
      if (auto i = integer_lexical(sv)) return ExprNode::integer(*i);
      return ExprNode::lit(std::move(sv));
    }
    if (const auto* d = std::get_if<double>(&item)) {
      if (!std::isfinite(*d)) return std::nullopt;
      return number_literal(*d);
    }
    if (const auto* i = std::get_if<std::int64_t>(&item)) return ExprNode::integer(*i);
    if (const auto* s = std::get_if<std::string>(&item)) return ExprNode::lit(*s);
    return ExprNode::lit(std::get<bool>(item));
  }

  /// Number near `v`'s numeric content, or a random one.
  ExprNode nearby_number(const Value& v) {
    double base = 0;
    bool known = false;
    if (!v.empty()) {
      const eval::Item& item = v[rng_.index(v.size())];
      if (const auto* d = std::get_if<double>(&item); d && std::isfinite(*d)) {
        base = *d;
        known = true;
      } else if (const auto* i = std::get_if<std::int64_t>(&item)) {
        base = static_cast<double>(*i);
        known = true;
      } else if (const auto* n = std::get_if<eval::NodeRef>(&item)) {
        if (auto k = integer_lexical(eval::string_value(doc_, *n))) {
          base = static_cast<double>(*k);
          known = true;
        }
      }
    }
    double x = known && rng_.chance(0.8) ? std::floor(base) + static_cast<double>(rng_.uniform(-5, 5))
                                         : static_cast<double>(rng_.uniform(-100, 100));
    if (rng_.chance(0.1)) x += 0.5;
    return number_literal(x);
  }

  bool looks_numeric(const Tracked& t) const {
    if (t.kind == ValueKind::kNumber) return true;
    if (t.kind == ValueKind::kString || t.kind == ValueKind::kBoolean) return false;
    if (t.value.empty()) return false;
    const eval::Item& item = t.value.front();
    if (const auto* n = std::get_if<eval::NodeRef>(&item)) {
      return integer_lexical(eval::string_value(doc_, *n)).has_value();
    }
    return !std::holds_alternative<std::string>(item) && !std::holds_alternative<bool>(item);
  }

  ExprNode compare_operand(const Tracked& t) {
    if (rng_.chance(0.2)) {
      Tracked other = subject();
      if (fits(ExprNode::binary(Operator::kEq, t.node, other.node))) return std::move(other.node);
    }
    if (targeted() && rng_.chance(cfg_.equal_operand_prob)) {
      if (auto lit = equal_literal(t.value)) return std::move(*lit);
    }
    switch (t.kind) {
      case ValueKind::kBoolean: return ExprNode::lit(rng_.chance(0.5));
      case ValueKind::kString: return string_literal_like(t, Function::kContains);
      case ValueKind::kNumber: return nearby_number(t.value);
      default:
        if (!targeted()) {
          return rng_.chance(0.5) ? nearby_number({}) : ExprNode::lit(docgen::random_string(rng_, {0, 4}));
        }
        if (looks_numeric(t)) return nearby_number(t.value);
        return string_literal_like(t, Function::kContains);
    }
  }

  ExprNode numeric_operand() {
    if (rng_.chance(0.2)) {
      Tracked other = subject();
      if (other.kind == ValueKind::kNumber || looks_numeric(other)) return std::move(other.node);
    }
    std::int64_t k = rng_.uniform(-10, 10);
    return ExprNode::integer(k);
  }

  /// Condition used as the right operand of and/or.
  ExprNode side_condition() {
    Tracked s = subject();
    if (rng_.chance(0.4)) extend(s, false);
    return finalize(s, false);
  }

  std::optional<ExprNode> apply(const CatalogEntry& e, const Tracked& t) {
    std::vector<ExprNode> args{t.node};
    const std::size_t m = targeted() ? t.value.size() : 3;
    switch (e.form) {
      case EntryForm::kFunction:
        switch (e.function) {
          case Function::kStartsWith:
          case Function::kContains:
            args.push_back(string_literal_like(t, e.function));
            break;
          case Function::kConcat:
            if (rng_.chance(0.25)) {
              args.push_back(subject().node);
            } else {
              args.push_back(ExprNode::lit(docgen::random_string(rng_, {0, 3})));
            }
            break;
          case Function::kSubstring: {
            auto len = static_cast<std::int64_t>(current_string(t).size());
            args.push_back(ExprNode::integer(rng_.uniform(0, len + 1)));
            args.push_back(ExprNode::integer(rng_.uniform(0, len + 1)));
            break;
          }
          case Function::kSubsequence: {
            auto len = static_cast<std::int64_t>(m);
            if (len >= 1 && rng_.chance(0.7)) {
              // A window inside the current sequence.
              std::int64_t start = rng_.uniform(1, len);
              args.push_back(ExprNode::integer(start));
              args.push_back(ExprNode::integer(rng_.uniform(1, len - start + 1)));
            } else {
              args.push_back(ExprNode::integer(rng_.uniform(0, len + 1)));
              args.push_back(ExprNode::integer(rng_.uniform(0, len + 1)));
            }
            break;
          }
          case Function::kStringJoin: {
            static const std::array<std::string, 4> seps = {"", ",", " ", "-"};
            args.push_back(ExprNode::lit(seps[rng_.index(seps.size())]));
            break;
          }
          default:
            break;
        }
        return ExprNode::call(e.function, std::move(args));
      case EntryForm::kBinary:
        if (xpath::is_comparison(e.op)) return ExprNode::binary(e.op, t.node, compare_operand(t));
        if (xpath::is_arithmetic(e.op)) return ExprNode::binary(e.op, t.node, numeric_operand());
        return ExprNode::binary(e.op, t.node, side_condition());
      case EntryForm::kUnary:
        return ExprNode::unary(e.op, t.node);
      case EntryForm::kRange: {
        std::int64_t lo = 0;
        if (targeted() && t.value.size() == 1) {
          if (const auto* i = std::get_if<std::int64_t>(&t.value.front())) lo = *i;
        }
        return ExprNode::range(t.node, ExprNode::integer(lo + rng_.uniform(0, 4)));
      }
    }
    return std::nullopt;
  }

  double weight(const CatalogEntry& e, const Tracked& t) const {
    if (e.form != EntryForm::kFunction) return 1.0;
    const bool window = t.node.kind == NodeKind::kCall && t.node.function == Function::kSubsequence;
    if (e.function == Function::kTail || e.function == Function::kHead) return window ? 10.0 : 4.0;
    if (e.function == Function::kSubsequence) {
      const bool many = targeted() ? t.value.size() >= 2 : !xpath::is_singleton(t.node);
      return many ? 6.0 : 0.5;
    }
    return 1.0;
  }

  /// One bottom-up step: wraps `t` in a random catalog entry that accepts its
  /// kind. Returns false if no entry could be applied.
  bool extend(Tracked& t, bool allow_logical) {
    std::vector<const CatalogEntry*> options;
    for (const CatalogEntry* e : xpath::functions_accepting(t.kind, std_)) {
      if (e->optional && !cfg_.enable_has_children) continue;
      if (!allow_logical && e->form == EntryForm::kBinary &&
          (e->op == Operator::kAnd || e->op == Operator::kOr)) {
        continue;
      }
      if (std_ == Standard::kV3_0 && e->params.front().singleton_v3) {
        if (!xpath::is_singleton(t.node) || t.value.size() > 1) continue;
      }
      options.push_back(e);
    }
    if (options.empty()) return false;
    double total = 0;
    for (const CatalogEntry* e : options) total += weight(*e, t);
    for (int attempt = 0; attempt < 4; ++attempt) {
      double r = rng_.unit() * total;
      const CatalogEntry* chosen = options.back();
      for (const CatalogEntry* e : options) {
        r -= weight(*e, t);
        if (r < 0) {
          chosen = e;
          break;
        }
      }
      auto node = apply(*chosen, t);
      if (!node || !fits(*node)) continue;
      if (auto next = track(std::move(*node))) {
        t = std::move(*next);
        return true;
      }
    }
    return false;
  }

  ExprNode comparison(const Tracked& t) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      Operator op = kComparisons[rng_.index(kComparisons.size())];
      ExprNode n = ExprNode::binary(op, t.node, compare_operand(t));
      if (fits(n) && evaluable(n)) return n;
    }
    return ExprNode::call(Function::kBoolean, {t.node});
  }

  std::optional<ExprNode> bounded_from_other_side(const Tracked& t, const ExprNode& first) {
    const bool lower = first.op == Operator::kGt || first.op == Operator::kGe;
    std::array<Operator, 2> flipped = lower ? std::array{Operator::kLt, Operator::kLe}
                                            : std::array{Operator::kGt, Operator::kGe};
    ExprNode operand = compare_operand(t);
    const ExprNode& bound = first.children[1];
    if (bound.kind == NodeKind::kLiteral && rng_.chance(0.5)) {
      double b = 0;
      if (const auto* i = std::get_if<std::int64_t>(&bound.literal)) {
        b = static_cast<double>(*i);
      } else if (const auto* d = std::get_if<double>(&bound.literal)) {
        b = *d;
      }
      if (std::holds_alternative<std::int64_t>(bound.literal) || std::holds_alternative<double>(bound.literal)) {
        const double step = static_cast<double>(rng_.uniform(0, 5));
        operand = number_literal(lower ? b + step : b - step);
      }
    }
    ExprNode n = ExprNode::binary(flipped[rng_.index(2)], t.node, std::move(operand));
    if (fits(n) && evaluable(n)) return n;
    return std::nullopt;
  }

  ExprNode finalize(const Tracked& t, bool allow_exists = true) {
    const bool v3 = std_ == Standard::kV3_0;
    switch (t.kind) {
      case ValueKind::kBoolean:
        return t.node;
      case ValueKind::kNumber:
        return comparison(t);
      case ValueKind::kString:
        if (!allow_exists || rng_.chance(0.6)) return comparison(t);
        return ExprNode::call(Function::kBoolean, {t.node});
      case ValueKind::kNodeSet:
      case ValueKind::kSequence:
        if (!allow_exists || rng_.chance(0.6)) return comparison(t);
        return ExprNode::call(v3 ? Function::kExists : Function::kBoolean, {t.node});
    }
    return t.node;
  }

  Rng& rng_;
  const xml::XmlDocument& doc_;
  const GenConfig& cfg_;
  const PredicateSite* site_;
  Standard std_;
};

// Truth of a rectification candidate at the site. Top-level predicates use the
// predicate rule (numbers are positions); operands of and/or use the EBV.
bool holds(const xml::XmlDocument& doc, const PredicateSite& site, const ExprNode& node, bool top) {
  auto v = value_at(doc, site, node);
  if (!v) return false;
  try {
    if (top) return eval::predicate_truth(doc, *v, site.position, site.standard);
    return eval::effective_boolean(doc, *v, site.standard);
  } catch (const eval::EvalError&) {
    return false;
  }
}

ExprNode rectify_rec(Rng& rng, const xml::XmlDocument& doc, const ExprNode& pred, const PredicateSite& site,
                     double not_wrap_prob, RectifyStats* stats, bool top) {
  if (holds(doc, site, pred, top)) return pred;
  ExprNode out;
  if (rng.chance(not_wrap_prob)) {
    out = ExprNode::unary(Operator::kNot, pred);
  } else if (pred.kind == NodeKind::kBinary && pred.op == Operator::kOr) {
    out = pred;
    std::size_t i = rng.index(2);
    out.children[i] = rectify_rec(rng, doc, pred.children[i], site, not_wrap_prob, stats, false);
  } else if (pred.kind == NodeKind::kBinary && pred.op == Operator::kAnd) {
    out = pred;
    for (ExprNode& c : out.children) c = rectify_rec(rng, doc, c, site, not_wrap_prob, stats, false);
  } else if (pred.kind == NodeKind::kBinary && xpath::is_comparison(pred.op)) {
    out = pred;
    out.op = xpath::opposite(pred.op);
  } else {
    out = ExprNode::unary(Operator::kNot, pred);
  }
  if (!holds(doc, site, out, top)) {
    if (stats) ++stats->fallbacks;
    out = ExprNode::unary(Operator::kNot, pred);
  }
  return out;
}

}  // namespace

std::vector<Axis> applicable_axes(const xml::XmlDocument& doc, std::span<const NodeId> context) {
  std::array<bool, xml::kAllAxes.size()> ok{};
  auto set = [&](Axis a) { ok[static_cast<std::size_t>(a)] = true; };
  const auto last = static_cast<std::uint32_t>(doc.size() - 1);
  for (NodeId c : context) {
    if (c == xml::kDocumentOrigin) {
      set(Axis::kChild);
      set(Axis::kDescendant);
      set(Axis::kDescendantOrSelf);
      continue;
    }
    const std::uint32_t o = doc.order_of(c);
    const xml::ElementNode& e = doc.node(c);
    set(Axis::kSelf);
    set(Axis::kDescendantOrSelf);
    set(Axis::kAncestorOrSelf);
    if (!e.children.empty()) {
      set(Axis::kChild);
      set(Axis::kDescendant);
    }
    if (doc.subtree_end(o) < last) set(Axis::kFollowing);
    // Everything before a node is an ancestor or a preceding node.
    if (o > doc.depth(o)) set(Axis::kPreceding);
    if (e.parent) {
      set(Axis::kParent);
      set(Axis::kAncestor);
      const std::vector<NodeId>& sibs = doc.node(*e.parent).children;
      if (sibs.front() != c) set(Axis::kPrecedingSibling);
      if (sibs.back() != c) set(Axis::kFollowingSibling);
    }
  }
  std::vector<Axis> out;
  for (Axis a : xml::kAllAxes) {
    if (ok[static_cast<std::size_t>(a)]) out.push_back(a);
  }
  return out;
}

PrefixChoice generate_section_prefix(Rng& rng, const xml::XmlDocument& doc, std::span<const NodeId> context,
                                     const GenConfig& cfg) {
  if (context.empty()) throw std::invalid_argument("generate_section_prefix: empty context");
  PrefixChoice out;
  out.prefix.step = rng.chance(0.5) ? xpath::StepKind::kSlash : xpath::StepKind::kDoubleSlash;
  std::vector<NodeId> contexts = eval::step_contexts(doc, context, out.prefix.step);
  std::vector<Axis> axes = applicable_axes(doc, contexts);
  out.prefix.axis = axes[rng.index(axes.size())];
  out.groups = eval::expand_step(doc, context, out.prefix);

  if (!rng.chance(cfg.wildcard_prob)) {
    std::vector<std::string> tags;
    for (const eval::Group& g : out.groups) {
      for (NodeId n : g.nodes) {
        const std::string& t = doc.node(n).tag;
        if (std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
      }
    }
    out.prefix.tag = tags[rng.index(tags.size())];
    std::vector<eval::Group> kept;
    for (eval::Group& g : out.groups) {
      std::erase_if(g.nodes, [&](NodeId n) { return doc.node(n).tag != *out.prefix.tag; });
      if (!g.nodes.empty()) kept.push_back(std::move(g));
    }
    out.groups = std::move(kept);
  }
  out.result = eval::merge_groups(doc, out.groups);
  return out;
}

NodeId select_target(Rng& rng, std::span<const NodeId> candidates) {
  if (candidates.empty()) throw std::invalid_argument("select_target: no candidates");
  return candidates[rng.index(candidates.size())];
}

std::optional<PredicateSite> locate(const std::vector<eval::Group>& groups, NodeId target, Standard standard) {
  for (const eval::Group& g : groups) {
    auto it = std::find(g.nodes.begin(), g.nodes.end(), target);
    if (it != g.nodes.end()) {
      return PredicateSite{target, static_cast<std::size_t>(it - g.nodes.begin()) + 1, g.nodes.size(), standard};
    }
  }
  return std::nullopt;
}

ExprNode generate_predicate(Rng& rng, const xml::XmlDocument& doc, const PredicateSite& site, const GenConfig& cfg) {
  GenConfig local = cfg;
  local.standard = site.standard;
  return Builder(rng, doc, local, &site).build();
}

ExprNode generate_untargeted_predicate(Rng& rng, const xml::XmlDocument& doc, const GenConfig& cfg) {
  return Builder(rng, doc, cfg, nullptr).build();
}

ExprNode rectify_predicate(Rng& rng, const xml::XmlDocument& doc, const ExprNode& pred, const PredicateSite& site,
                           double not_wrap_prob, RectifyStats* stats) {
  if (stats) ++stats->calls;
  ExprNode out = rectify_rec(rng, doc, pred, site, not_wrap_prob, stats, true);
  if (stats && !(out == pred)) ++stats->rewritten;
  return out;
}

xpath::Predicate generate_positional_predicate(Rng& rng, std::size_t target_position, std::size_t context_size) {
  if (target_position < 1 || target_position > context_size) {
    throw std::invalid_argument("generate_positional_predicate: position out of range");
  }
  const auto k = static_cast<std::int64_t>(target_position);
  xpath::Predicate p;
  p.kind = xpath::PredicateKind::kPositional;
  if (k >= 2 && rng.chance(0.5)) {
    std::int64_t a = rng.uniform(1, k - 1);
    p.body = ExprNode::binary(Operator::kAdd, ExprNode::integer(a), ExprNode::integer(k - a));
  } else {
    p.body = ExprNode::integer(k);
  }
  return p;
}

GeneratedQuery generate_query(Rng& rng, const xml::XmlDocument& doc, const GenConfig& cfg) {
  cfg.validate();
  GeneratedQuery out;
  out.expr.standard = cfg.standard;
  GenTrace& trace = out.trace;
  const bool targeted = cfg.mode == Mode::kTargeted;

  std::vector<NodeId> current = eval::initial_context();
  const auto sections = static_cast<std::size_t>(
      rng.uniform(static_cast<std::int64_t>(cfg.min_sections), static_cast<std::int64_t>(cfg.max_sections)));
  for (std::size_t s = 0; s < sections; ++s) {
    if (targeted && current.empty()) {
      trace.stopped_on_empty = true;
      break;
    }
    xpath::Section section;
    SectionTrace st;
    std::vector<eval::Group> groups;
    if (targeted) {
      PrefixChoice pc = generate_section_prefix(rng, doc, current, cfg);
      section.prefix = pc.prefix;
      groups = std::move(pc.groups);
      st.candidates = std::move(pc.result);
    } else {
      section.prefix.step = rng.chance(0.5) ? xpath::StepKind::kSlash : xpath::StepKind::kDoubleSlash;
      section.prefix.axis = xml::kAllAxes[rng.index(xml::kAllAxes.size())];
      if (!rng.chance(cfg.wildcard_prob)) section.prefix.tag = rng.pick(doc.tags());
      groups = current.empty() ? std::vector<eval::Group>{} : eval::expand_step(doc, current, section.prefix);
      st.candidates = eval::merge_groups(doc, groups);
    }
    if (!st.candidates.empty() && (targeted || cfg.rectify)) st.target = select_target(rng, st.candidates);

    std::optional<PredicateSite> site;
    if (st.target) site = locate(groups, *st.target, cfg.standard);
    const auto predicates = static_cast<std::size_t>(
        rng.uniform(static_cast<std::int64_t>(cfg.min_predicates), static_cast<std::int64_t>(cfg.max_predicates)));
    for (std::size_t p = 0; p < predicates; ++p) {
      if (st.target) {
        if (auto now = locate(groups, *st.target, cfg.standard)) site = now;
      }
      bool accepted = false;
      for (std::size_t attempt = 0; attempt < cfg.predicate_attempts && !accepted; ++attempt) {
        xpath::Predicate pred;
        RectifyStats stats;
        if (rng.chance(cfg.positional_prob)) {
          if (targeted && site) {
            pred = generate_positional_predicate(rng, site->position, site->size);
          } else {
            pred = generate_positional_predicate(rng, static_cast<std::size_t>(rng.uniform(1, 3)), 3);
          }
        } else {
          pred.body = (targeted && site) ? generate_predicate(rng, doc, *site, cfg)
                                         : generate_untargeted_predicate(rng, doc, cfg);
          if (cfg.rectify && site) {
            pred.body = rectify_predicate(rng, doc, pred.body, *site, cfg.not_wrap_prob, &stats);
            if (stats.rewritten) st.rectified = true;
          }
        }
        std::vector<eval::Group> filtered;
        try {
          filtered = eval::filter_groups(doc, groups, pred.body, cfg.standard);
        } catch (const eval::EvalError&) {
          continue;
        }
        if (cfg.rectify && targeted && site && !locate(filtered, *st.target, cfg.standard)) continue;
        trace.rectify_fallbacks += stats.fallbacks;
        groups = std::move(filtered);
        section.predicates.push_back(std::move(pred));
        accepted = true;
      }
      if (!accepted) ++trace.dropped_predicates;
    }
    current = eval::merge_groups(doc, groups);
    st.result = current;
    out.expr.sections.push_back(std::move(section));
    trace.sections.push_back(std::move(st));
  }
  trace.result = current;
  return out;
}

}  // namespace xpathdiff::gen
