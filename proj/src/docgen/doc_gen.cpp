#include "xpathdiff/docgen/doc_gen.h"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <stdexcept>

namespace xpathdiff::docgen {

void DocGenConfig::validate() const {
  auto check = [](IntRange r, const char* what) {
    if (r.lo > r.hi) throw std::invalid_argument(std::string("empty range: ") + what);
  };
  check(node_count, "node_count");
  check(attr_count, "attr_count");
  check(string_length, "string_length");
  check(integer_range, "integer_range");
  if (node_count.lo < 1) throw std::invalid_argument("node_count must be at least 1");
  if (attr_count.lo < 0 || attr_count.hi > 26) throw std::invalid_argument("attr_count must lie in [0, 26]");
  if (string_length.lo < 0) throw std::invalid_argument("string_length must be nonnegative");
}

std::string template_tag(std::size_t i) {
  if (i < 26) return std::string(1, static_cast<char>('A' + i));
  i -= 26;
  if (i >= 26 * 26) throw std::out_of_range("template alphabet exhausted");
  return {static_cast<char>('A' + i / 26), static_cast<char>('A' + i % 26)};
}

std::string random_string(Rng& rng, IntRange length) {
  const auto n = static_cast<std::size_t>(rng.uniform(length.lo, length.hi));
  std::string s(n, ' ');
  for (std::size_t i = 0; i < n; ++i) {
    bool edge = i == 0 || i + 1 == n;
    s[i] = (!edge && rng.chance(0.15)) ? ' ' : static_cast<char>('a' + rng.index(26));
  }
  return s;
}

std::vector<NodeTemplate> generate_templates(Rng& rng, std::size_t count, const DocGenConfig& cfg) {
  if (count == 0) throw std::invalid_argument("generate_templates: count must be positive");

  std::vector<std::size_t> codes(std::max<std::size_t>(count, 26));
  std::iota(codes.begin(), codes.end(), 0);
  if (count <= 26) {
    // Partial Fisher-Yates over the single letters.
    for (std::size_t i = 0; i < count; ++i) std::swap(codes[i], codes[i + rng.index(26 - i)]);
  }

  // An attribute name keeps one kind across the whole template set, so the
  // same `@x` never mixes integers and strings within a document.
  std::map<char, ValueKind> name_kinds;
  std::vector<NodeTemplate> out;
  out.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    NodeTemplate tmpl;
    tmpl.tag = template_tag(codes[t]);
    auto k = static_cast<std::size_t>(rng.uniform(cfg.attr_count.lo, cfg.attr_count.hi));
    std::array<char, 26> letters{};
    std::iota(letters.begin(), letters.end(), 'a');
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(letters[i], letters[i + rng.index(26 - i)]);
      char name = letters[i];
      auto [it, fresh] = name_kinds.try_emplace(name, ValueKind::kInteger);
      if (fresh) it->second = rng.chance(0.5) ? ValueKind::kInteger : ValueKind::kString;
      tmpl.attributes.push_back({std::string(1, name), it->second});
    }
    tmpl.content = static_cast<ContentKind>(rng.index(4));
    out.push_back(std::move(tmpl));
  }
  return out;
}

xml::ElementNode instantiate_node(Rng& rng, const NodeTemplate& tmpl, xml::NodeId id, const DocGenConfig& cfg) {
  xml::ElementNode node;
  node.id = id;
  node.tag = tmpl.tag;
  node.attributes.push_back({"id", static_cast<std::int64_t>(id.value)});
  auto value_of = [&](ValueKind kind) -> xml::TypedValue {
    if (kind == ValueKind::kInteger) return rng.uniform(cfg.integer_range.lo, cfg.integer_range.hi);
    return random_string(rng, cfg.string_length);
  };
  for (const AttributeSpec& a : tmpl.attributes) node.attributes.push_back({a.name, value_of(a.kind)});
  if (tmpl.content == ContentKind::kInteger) node.text = value_of(ValueKind::kInteger);
  if (tmpl.content == ContentKind::kString) node.text = value_of(ValueKind::kString);
  return node;
}

GeneratedDocument generate_document_with_templates(Rng& rng, const DocGenConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(rng.uniform(cfg.node_count.lo, cfg.node_count.hi));
  std::vector<NodeTemplate> templates = generate_templates(rng, (n + 1) / 2, cfg);

  std::vector<std::size_t> containers;
  for (std::size_t t = 0; t < templates.size(); ++t) {
    if (templates[t].is_container()) containers.push_back(t);
  }
  if (n >= 2 && containers.empty()) {
    std::size_t t = rng.index(templates.size());
    templates[t].content = ContentKind::kChildren;
    containers.push_back(t);
  }

  std::vector<std::size_t> assignment(n);
  std::vector<xml::ElementNode> nodes;
  nodes.reserve(n);
  std::vector<std::size_t> open;  // indices of container nodes placed so far
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t t = (k == 0 && n >= 2) ? containers[rng.index(containers.size())] : rng.index(templates.size());
    assignment[k] = t;
    xml::ElementNode node = instantiate_node(rng, templates[t], xml::NodeId{static_cast<std::uint32_t>(k + 1)}, cfg);
    if (k > 0) {
      std::size_t parent = open[rng.index(open.size())];
      node.parent = nodes[parent].id;
      nodes[parent].children.push_back(node.id);
    }
    if (templates[t].is_container()) open.push_back(k);
    nodes.push_back(std::move(node));
  }
  return {xml::XmlDocument(std::move(nodes)), std::move(templates), std::move(assignment)};
}

}  // namespace xpathdiff::docgen
