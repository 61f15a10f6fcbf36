#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "xpathdiff/docgen/doc_gen.h"
#include "xpathdiff/xml/document.h"
#include "xpathdiff/xml/serialize.h"
#include "xpathdiff/xpath/ast.h"

namespace testsupport {

using namespace xpathdiff;

inline std::vector<std::uint32_t> raw(const std::vector<xml::NodeId>& ids) {
  std::vector<std::uint32_t> out;
  for (xml::NodeId i : ids) out.push_back(i.value);
  return out;
}

inline xml::XmlDocument random_doc(std::uint64_t seed, docgen::DocGenConfig cfg = {}) {
  Rng rng(derive_seed({seed, 0xd0c}));
  return docgen::generate_document(rng, cfg);
}

inline xpath::Section section(xpath::StepKind step, xml::Axis axis, std::optional<std::string> tag,
                              std::vector<xpath::ExprNode> preds = {}) {
  xpath::Section s;
  s.prefix = {step, axis, std::move(tag)};
  for (auto& p : preds) s.predicates.push_back({xpath::PredicateKind::kBoolean, std::move(p)});
  return s;
}

inline xpath::XPathExpr query(xpath::Standard standard, std::vector<xpath::Section> sections) {
  return {std::move(sections), standard};
}

/// `//tag[pred]`
inline xpath::XPathExpr anywhere(xpath::Standard standard, std::optional<std::string> tag, xpath::ExprNode pred) {
  std::vector<xpath::ExprNode> preds;
  preds.push_back(std::move(pred));
  return query(standard, {section(xpath::StepKind::kDoubleSlash, xml::Axis::kChild, std::move(tag), std::move(preds))});
}

/// Axis semantics recomputed from parent/child links alone.
class AxisOracle {
 public:
  explicit AxisOracle(const xml::XmlDocument& doc) : doc_(doc) {
    std::function<void(xml::NodeId)> walk = [&](xml::NodeId n) {
      preorder_.push_back(n);
      for (xml::NodeId c : doc.node(n).children) walk(c);
    };
    walk(doc.root());
  }

  const std::vector<xml::NodeId>& preorder() const { return preorder_; }

  std::size_t rank(xml::NodeId n) const {
    return static_cast<std::size_t>(std::find(preorder_.begin(), preorder_.end(), n) - preorder_.begin());
  }

  bool is_ancestor(xml::NodeId a, xml::NodeId n) const {
    for (auto p = doc_.node(n).parent; p; p = doc_.node(*p).parent) {
      if (*p == a) return true;
    }
    return false;
  }

  std::vector<xml::NodeId> axis(xml::NodeId x, xml::Axis axis) const {
    using xml::Axis;
    std::vector<xml::NodeId> out;
    if (x == xml::kDocumentOrigin) {
      if (axis == Axis::kChild) out.push_back(doc_.root());
      if (axis == Axis::kDescendant || axis == Axis::kDescendantOrSelf) out = preorder_;
      return out;
    }
    const xml::ElementNode& e = doc_.node(x);
    switch (axis) {
      case Axis::kSelf: out.push_back(x); break;
      case Axis::kChild: out = e.children; break;
      case Axis::kDescendantOrSelf: out.push_back(x); [[fallthrough]];
      case Axis::kDescendant:
        for (xml::NodeId n : preorder_) {
          if (is_ancestor(x, n)) out.push_back(n);
        }
        break;
      case Axis::kParent:
        if (e.parent) out.push_back(*e.parent);
        break;
      case Axis::kAncestorOrSelf: out.push_back(x); [[fallthrough]];
      case Axis::kAncestor:
        for (auto p = e.parent; p; p = doc_.node(*p).parent) out.push_back(*p);
        break;
      case Axis::kFollowing:
        for (xml::NodeId n : preorder_) {
          if (rank(n) > rank(x) && !is_ancestor(x, n)) out.push_back(n);
        }
        break;
      case Axis::kPreceding:
        for (xml::NodeId n : preorder_) {
          if (rank(n) < rank(x) && !is_ancestor(n, x)) out.push_back(n);
        }
        std::reverse(out.begin(), out.end());
        break;
      case Axis::kFollowingSibling:
      case Axis::kPrecedingSibling: {
        if (!e.parent) break;
        const auto& sib = doc_.node(*e.parent).children;
        auto it = std::find(sib.begin(), sib.end(), x);
        if (axis == Axis::kFollowingSibling) {
          out.assign(it + 1, sib.end());
        } else {
          out.assign(sib.begin(), it);
          std::reverse(out.begin(), out.end());
        }
        break;
      }
    }
    return out;
  }

 private:
  const xml::XmlDocument& doc_;
  std::vector<xml::NodeId> preorder_;
};

}  // namespace testsupport
