#include "xpathdiff/xml/document.h"

#include <algorithm>
#include <unordered_set>

namespace xpathdiff::xml {

std::string lexical(const TypedValue& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

const Attribute* ElementNode::find_attribute(std::string_view name) const {
  for (const Attribute& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

namespace {

constexpr std::array<std::string_view, 11> kAxisNames = {
    "self",      "child",    "descendant",       "descendant-or-self", "parent",           "ancestor",
    "ancestor-or-self", "following", "following-sibling", "preceding", "preceding-sibling",
};

}  // namespace

std::string_view axis_name(Axis axis) { return kAxisNames[static_cast<std::size_t>(axis)]; }

std::optional<Axis> axis_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i) {
    if (kAxisNames[i] == name) return static_cast<Axis>(i);
  }
  return std::nullopt;
}

bool is_reverse_axis(Axis axis) {
  switch (axis) {
    case Axis::kParent:
    case Axis::kAncestor:
    case Axis::kAncestorOrSelf:
    case Axis::kPreceding:
    case Axis::kPrecedingSibling:
      return true;
    default:
      return false;
  }
}

XmlDocument::XmlDocument(std::vector<ElementNode> nodes) {
  if (nodes.empty()) throw DocumentError("document has no element");

  std::unordered_map<std::uint32_t, std::size_t> by_id;
  std::optional<std::size_t> root;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const ElementNode& n = nodes[i];
    if (n.id.value == 0) throw DocumentError("node id 0 is reserved");
    if (!by_id.emplace(n.id.value, i).second) {
      throw DocumentError("duplicate node id " + std::to_string(n.id.value));
    }
    if (n.tag.empty()) throw DocumentError("empty tag on node " + std::to_string(n.id.value));
    if (n.attributes.empty() || n.attributes.front().name != "id" ||
        n.attributes.front().value != TypedValue{static_cast<std::int64_t>(n.id.value)}) {
      throw DocumentError("node " + std::to_string(n.id.value) + " lacks a leading matching id attribute");
    }
    std::unordered_set<std::string_view> names;
    for (const Attribute& a : n.attributes) {
      if (!names.insert(a.name).second) {
        throw DocumentError("duplicate attribute '" + a.name + "' on node " + std::to_string(n.id.value));
      }
    }
    if (!n.parent) {
      if (root) throw DocumentError("more than one parentless node");
      root = i;
    }
  }
  if (!root) throw DocumentError("no root element (cycle)");

  for (const ElementNode& n : nodes) {
    for (NodeId c : n.children) {
      auto it = by_id.find(c.value);
      if (it == by_id.end()) throw DocumentError("dangling child id " + std::to_string(c.value));
      if (nodes[it->second].parent != n.id) {
        throw DocumentError("child " + std::to_string(c.value) + " does not link back to its parent");
      }
    }
    if (n.parent) {
      auto it = by_id.find(n.parent->value);
      if (it == by_id.end()) throw DocumentError("dangling parent id " + std::to_string(n.parent->value));
      const auto& siblings = nodes[it->second].children;
      if (std::count(siblings.begin(), siblings.end(), n.id) != 1) {
        throw DocumentError("node " + std::to_string(n.id.value) + " is not listed exactly once by its parent");
      }
    }
  }

  // Pre-order walk from the root; anything unreached sits on a cycle.
  nodes_.reserve(nodes.size());
  std::vector<std::uint32_t> depth_stack;
  std::vector<std::pair<std::size_t, std::uint32_t>> stack{{*root, 0}};
  std::vector<bool> seen(nodes.size(), false);
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    if (seen[i]) throw DocumentError("cycle through node " + std::to_string(nodes[i].id.value));
    seen[i] = true;
    index_.emplace(nodes[i].id.value, static_cast<std::uint32_t>(nodes_.size()));
    depth_.push_back(d);
    const auto& kids = nodes[i].children;
    for (auto it = kids.rbegin(); it != kids.rend(); ++it) stack.emplace_back(by_id.at(it->value), d + 1);
    nodes_.push_back(std::move(nodes[i]));
  }
  if (nodes_.size() != nodes.size()) throw DocumentError("nodes unreachable from the root");

  const std::size_t n = nodes_.size();
  parent_.assign(n, kOriginOrder);
  children_.assign(n, {});
  end_.assign(n, 0);
  for (std::uint32_t o = 0; o < n; ++o) {
    if (nodes_[o].parent) parent_[o] = static_cast<std::int32_t>(index_.at(nodes_[o].parent->value));
    for (NodeId c : nodes_[o].children) children_[o].push_back(index_.at(c.value));
  }
  for (std::uint32_t o = static_cast<std::uint32_t>(n); o-- > 0;) {
    end_[o] = children_[o].empty() ? o : end_[children_[o].back()];
  }
  string_values_.assign(n, {});
  for (std::uint32_t o = 0; o < n; ++o) {
    for (std::uint32_t d = o; d <= end_[o]; ++d) {
      if (nodes_[d].text) string_values_[o] += lexical(*nodes_[d].text);
    }
  }
}

std::uint32_t XmlDocument::order_of(NodeId id) const {
  auto it = index_.find(id.value);
  if (it == index_.end()) throw std::out_of_range("unknown node id " + std::to_string(id.value));
  return it->second;
}

std::vector<NodeId> XmlDocument::document_order() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  for (const ElementNode& n : nodes_) out.push_back(n.id);
  return out;
}

std::vector<std::string> XmlDocument::tags() const {
  std::vector<std::string> out;
  for (const ElementNode& n : nodes_) {
    if (std::find(out.begin(), out.end(), n.tag) == out.end()) out.push_back(n.tag);
  }
  return out;
}

std::vector<std::string> XmlDocument::attribute_names() const {
  std::vector<std::string> out;
  for (const ElementNode& n : nodes_) {
    for (const Attribute& a : n.attributes) {
      if (std::find(out.begin(), out.end(), a.name) == out.end()) out.push_back(a.name);
    }
  }
  return out;
}

namespace {

void append_subtree(const XmlDocument& doc, std::uint32_t o, std::vector<std::uint32_t>& out) {
  out.push_back(o);
  for (std::uint32_t c : doc.child_orders(o)) append_subtree(doc, c, out);
}

void append_subtree_reversed(const XmlDocument& doc, std::uint32_t o, std::vector<std::uint32_t>& out) {
  auto kids = doc.child_orders(o);
  for (auto it = kids.rbegin(); it != kids.rend(); ++it) append_subtree_reversed(doc, *it, out);
  out.push_back(o);
}

std::size_t sibling_index(const XmlDocument& doc, std::uint32_t o) {
  auto sibs = doc.child_orders(static_cast<std::uint32_t>(doc.parent_order(o)));
  return static_cast<std::size_t>(std::find(sibs.begin(), sibs.end(), o) - sibs.begin());
}

}  // namespace

void navigate_axis_orders(const XmlDocument& doc, std::int32_t context, Axis axis,
                          std::vector<std::uint32_t>& out) {
  if (context == XmlDocument::kOriginOrder) {
    switch (axis) {
      case Axis::kChild:
        out.push_back(0);
        break;
      case Axis::kDescendant:
      case Axis::kDescendantOrSelf:
        append_subtree(doc, 0, out);
        break;
      default:
        break;
    }
    return;
  }
  const auto o = static_cast<std::uint32_t>(context);
  switch (axis) {
    case Axis::kSelf:
      out.push_back(o);
      break;
    case Axis::kChild:
      for (std::uint32_t c : doc.child_orders(o)) out.push_back(c);
      break;
    case Axis::kDescendantOrSelf:
      out.push_back(o);
      [[fallthrough]];
    case Axis::kDescendant:
      for (std::uint32_t c : doc.child_orders(o)) append_subtree(doc, c, out);
      break;
    case Axis::kParent:
      if (doc.parent_order(o) >= 0) out.push_back(static_cast<std::uint32_t>(doc.parent_order(o)));
      break;
    case Axis::kAncestorOrSelf:
      out.push_back(o);
      [[fallthrough]];
    case Axis::kAncestor:
      for (std::int32_t p = doc.parent_order(o); p >= 0; p = doc.parent_order(static_cast<std::uint32_t>(p))) {
        out.push_back(static_cast<std::uint32_t>(p));
      }
      break;
    case Axis::kFollowingSibling:
      if (doc.parent_order(o) >= 0) {
        auto sibs = doc.child_orders(static_cast<std::uint32_t>(doc.parent_order(o)));
        for (std::size_t i = sibling_index(doc, o) + 1; i < sibs.size(); ++i) out.push_back(sibs[i]);
      }
      break;
    case Axis::kPrecedingSibling:
      if (doc.parent_order(o) >= 0) {
        auto sibs = doc.child_orders(static_cast<std::uint32_t>(doc.parent_order(o)));
        for (std::size_t i = sibling_index(doc, o); i-- > 0;) out.push_back(sibs[i]);
      }
      break;
    case Axis::kFollowing:
      for (std::int32_t a = context; doc.parent_order(static_cast<std::uint32_t>(a)) >= 0;
           a = doc.parent_order(static_cast<std::uint32_t>(a))) {
        const auto ua = static_cast<std::uint32_t>(a);
        auto sibs = doc.child_orders(static_cast<std::uint32_t>(doc.parent_order(ua)));
        for (std::size_t i = sibling_index(doc, ua) + 1; i < sibs.size(); ++i) append_subtree(doc, sibs[i], out);
      }
      break;
    case Axis::kPreceding:
      for (std::int32_t a = context; doc.parent_order(static_cast<std::uint32_t>(a)) >= 0;
           a = doc.parent_order(static_cast<std::uint32_t>(a))) {
        const auto ua = static_cast<std::uint32_t>(a);
        auto sibs = doc.child_orders(static_cast<std::uint32_t>(doc.parent_order(ua)));
        for (std::size_t i = sibling_index(doc, ua); i-- > 0;) append_subtree_reversed(doc, sibs[i], out);
      }
      break;
  }
}

std::vector<NodeId> navigate_axis(const XmlDocument& doc, NodeId context, Axis axis) {
  const std::int32_t start =
      context == kDocumentOrigin ? XmlDocument::kOriginOrder : static_cast<std::int32_t>(doc.order_of(context));
  std::vector<std::uint32_t> orders;
  navigate_axis_orders(doc, start, axis, orders);
  std::vector<NodeId> out;
  out.reserve(orders.size());
  for (std::uint32_t o : orders) out.push_back(doc.at(o).id);
  return out;
}

std::vector<NodeId> document_order_dedup(const XmlDocument& doc, std::span<const NodeId> nodes) {
  std::vector<std::uint32_t> orders;
  orders.reserve(nodes.size());
  for (NodeId n : nodes) orders.push_back(doc.order_of(n));
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  std::vector<NodeId> out;
  out.reserve(orders.size());
  for (std::uint32_t o : orders) out.push_back(doc.at(o).id);
  return out;
}

}  // namespace xpathdiff::xml
