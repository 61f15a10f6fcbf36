#include "xpathdiff/reduce/reducer.h"

#include <memory>
#include <unordered_set>
#include <vector>

#include "xpathdiff/xml/serialize.h"
#include "xpathdiff/xpath/catalog.h"
#include "xpathdiff/xpath/render.h"

namespace xpathdiff::reduce {

namespace {

using xml::ElementNode;
using xml::NodeId;
using xml::XmlDocument;
using xpath::ExprNode;
using xpath::XPathExpr;

struct State {
  std::shared_ptr<const XmlDocument> doc;
  XPathExpr expr;
};

using Path = std::vector<std::size_t>;

void collect_paths(const ExprNode& n, Path& cur, std::vector<Path>& out) {
  out.push_back(cur);
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    cur.push_back(i);
    collect_paths(n.children[i], cur, out);
    cur.pop_back();
  }
}

template <typename Node>
Node& at(Node& root, const Path& path) {
  Node* n = &root;
  for (std::size_t i : path) n = &n->children[i];
  return *n;
}

std::vector<ExprNode> literals_of(const ExprNode& n, xpath::Standard standard) {
  switch (xpath::infer_kind(n, standard)) {
    case xpath::ValueKind::kNumber: return {ExprNode::integer(0), ExprNode::integer(1)};
    case xpath::ValueKind::kString: return {ExprNode::lit(std::string())};
    case xpath::ValueKind::kBoolean: return {ExprNode::lit(true), ExprNode::lit(false)};
    default: return {};
  }
}

std::vector<XPathExpr> query_candidates(const XPathExpr& e) {
  std::vector<XPathExpr> out;
  if (e.sections.size() > 1) {
    // Leading and trailing sections first, then inner ones.
    std::vector<std::size_t> order{0, e.sections.size() - 1};
    for (std::size_t s = 1; s + 1 < e.sections.size(); ++s) order.push_back(s);
    for (std::size_t s : order) {
      XPathExpr c = e;
      c.sections.erase(c.sections.begin() + static_cast<std::ptrdiff_t>(s));
      out.push_back(std::move(c));
    }
  }
  for (std::size_t s = 0; s < e.sections.size(); ++s) {
    const xpath::SectionPrefix& prefix = e.sections[s].prefix;
    if (prefix.axis != xml::Axis::kChild) {
      XPathExpr c = e;
      c.sections[s].prefix.axis = xml::Axis::kChild;
      out.push_back(std::move(c));
    }
    if (prefix.step == xpath::StepKind::kDoubleSlash) {
      XPathExpr c = e;
      c.sections[s].prefix.step = xpath::StepKind::kSlash;
      out.push_back(std::move(c));
    }
  }
  for (std::size_t s = 0; s < e.sections.size(); ++s) {
    for (std::size_t p = 0; p < e.sections[s].predicates.size(); ++p) {
      XPathExpr c = e;
      c.sections[s].predicates.erase(c.sections[s].predicates.begin() + static_cast<std::ptrdiff_t>(p));
      out.push_back(std::move(c));
    }
  }
  for (std::size_t s = 0; s < e.sections.size(); ++s) {
    for (std::size_t p = 0; p < e.sections[s].predicates.size(); ++p) {
      const ExprNode& body = e.sections[s].predicates[p].body;
      std::vector<Path> paths;
      Path cur;
      collect_paths(body, cur, paths);
      for (const Path& path : paths) {
        const ExprNode& target = at(body, path);
        std::vector<ExprNode> replacements = target.children;
        for (ExprNode& l : literals_of(target, e.standard)) {
          if (!(l == target)) replacements.push_back(std::move(l));
        }
        for (ExprNode& r : replacements) {
          XPathExpr c = e;
          at(c.sections[s].predicates[p].body, path) = std::move(r);
          out.push_back(std::move(c));
        }
      }
    }
  }
  return out;
}

std::vector<ElementNode> copy_nodes(const XmlDocument& doc) {
  return {doc.nodes().begin(), doc.nodes().end()};
}

void subtree_ids(const XmlDocument& doc, NodeId id, std::unordered_set<std::uint32_t>& out) {
  const std::uint32_t first = doc.order_of(id);
  for (std::uint32_t o = first; o <= doc.subtree_end(first); ++o) out.insert(doc.at(o).id.value);
}

std::shared_ptr<const XmlDocument> keep_subtree(const XmlDocument& doc, NodeId root) {
  std::unordered_set<std::uint32_t> keep;
  subtree_ids(doc, root, keep);
  std::vector<ElementNode> nodes;
  for (const ElementNode& n : doc.nodes()) {
    if (!keep.contains(n.id.value)) continue;
    nodes.push_back(n);
    if (n.id == root) nodes.back().parent.reset();
  }
  return std::make_shared<const XmlDocument>(std::move(nodes));
}

std::shared_ptr<const XmlDocument> delete_subtree(const XmlDocument& doc, NodeId victim) {
  std::unordered_set<std::uint32_t> drop;
  subtree_ids(doc, victim, drop);
  std::vector<ElementNode> nodes;
  for (const ElementNode& n : doc.nodes()) {
    if (drop.contains(n.id.value)) continue;
    nodes.push_back(n);
    std::erase(nodes.back().children, victim);
  }
  return std::make_shared<const XmlDocument>(std::move(nodes));
}

std::vector<std::shared_ptr<const XmlDocument>> doc_candidates(const XmlDocument& doc) {
  std::vector<std::shared_ptr<const XmlDocument>> out;
  for (std::size_t o = 1; o < doc.size(); ++o) out.push_back(keep_subtree(doc, doc.at(o).id));
  for (std::size_t o = 1; o < doc.size(); ++o) out.push_back(delete_subtree(doc, doc.at(o).id));
  for (std::size_t o = 0; o < doc.size(); ++o) {
    const ElementNode& n = doc.at(o);
    for (std::size_t a = 1; a < n.attributes.size(); ++a) {
      auto nodes = copy_nodes(doc);
      nodes[o].attributes.erase(nodes[o].attributes.begin() + static_cast<std::ptrdiff_t>(a));
      out.push_back(std::make_shared<const XmlDocument>(std::move(nodes)));
    }
    if (n.text) {
      auto nodes = copy_nodes(doc);
      nodes[o].text.reset();
      out.push_back(std::make_shared<const XmlDocument>(std::move(nodes)));
    }
  }
  return out;
}

harness::TestCase to_case(const State& s, const harness::TestCase& like) {
  harness::TestCase c = harness::make_case(s.doc, s.expr, like.provenance);
  c.standard = like.standard;
  return c;
}

}  // namespace

ReductionCheck same_discrepancy(harness::EngineSpec first, harness::EngineSpec second, harness::Klass klass) {
  return [first = std::move(first), second = std::move(second), klass](const harness::TestCase& c) {
    harness::Results results;
    results[first.name] = harness::run_engine(first, c);
    results[second.name] = harness::run_engine(second, c);
    auto d = harness::compare(c, results);
    return d && d->klass == klass;
  };
}

std::size_t size_measure(const XmlDocument& doc, const XPathExpr& expr) {
  std::size_t n = doc.size() + xpath::node_count(expr);
  for (const ElementNode& e : doc.nodes()) n += e.attributes.size() + (e.text ? 1 : 0);
  return n;
}

harness::TestCase reduce(const harness::TestCase& input, const ReductionCheck& check, ReduceStats* stats) {
  if (!input.query) throw ReductionError("reduction needs the structured query");
  ReduceStats local;
  ReduceStats& st = stats ? *stats : local;
  State cur{input.doc ? input.doc : std::make_shared<const XmlDocument>(xml::parse(input.doc_text)), *input.query};
  ++st.attempts;
  if (!check(to_case(cur, input))) throw ReductionError("the input case does not satisfy the check");

  auto text_size = [](const harness::TestCase& c) { return c.doc_text.size() + c.query_text.size(); };
  std::size_t cur_measure = size_measure(*cur.doc, cur.expr);
  std::size_t cur_text = text_size(to_case(cur, input));

  for (bool improved = true; improved;) {
    improved = false;
    ++st.passes;
    std::vector<State> candidates;
    for (XPathExpr& e : query_candidates(cur.expr)) candidates.push_back({cur.doc, std::move(e)});
    for (auto& d : doc_candidates(*cur.doc)) candidates.push_back({std::move(d), cur.expr});
    for (State& cand : candidates) {
      const std::size_t m = size_measure(*cand.doc, cand.expr);
      if (m > cur_measure) continue;
      harness::TestCase c = to_case(cand, input);
      const std::size_t t = text_size(c);
      if (t > cur_text || (m == cur_measure && t == cur_text)) continue;
      ++st.attempts;
      if (!check(c)) continue;
      ++st.accepted;
      cur = std::move(cand);
      cur_measure = m;
      cur_text = t;
      improved = true;
      break;
    }
  }
  return to_case(cur, input);
}

}  // namespace xpathdiff::reduce
