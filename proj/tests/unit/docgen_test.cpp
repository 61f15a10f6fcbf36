#include <gtest/gtest.h>

#include <map>
#include <set>

#include "support.h"

using namespace xpathdiff;
using docgen::DocGenConfig;
using xml::NodeId;

namespace {

TEST(DocGen, TemplateTagsAndAttributeNames) {
  EXPECT_EQ(docgen::template_tag(0), "A");
  EXPECT_EQ(docgen::template_tag(25), "Z");
  EXPECT_EQ(docgen::template_tag(26), "AA");
  EXPECT_EQ(docgen::template_tag(27), "AB");
  Rng rng(5);
  auto templates = docgen::generate_templates(rng, 40);
  ASSERT_EQ(templates.size(), 40u);
  std::set<std::string> tags;
  for (const auto& t : templates) {
    EXPECT_TRUE(tags.insert(t.tag).second);
    std::set<std::string> names;
    for (const auto& a : t.attributes) {
      EXPECT_NE(a.name, "id");
      EXPECT_TRUE(names.insert(a.name).second);
    }
    EXPECT_LE(t.attributes.size(), 3u);
  }
  Rng one(1);
  EXPECT_EQ(docgen::generate_templates(one, 1).size(), 1u);
}

TEST(DocGen, SameSeedSameTemplatesAndDocuments) {
  Rng a(99), b(99);
  EXPECT_EQ(docgen::generate_templates(a, 5), docgen::generate_templates(b, 5));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(xml::serialize(testsupport::random_doc(seed)), xml::serialize(testsupport::random_doc(seed)));
  }
  EXPECT_NE(xml::serialize(testsupport::random_doc(1)), xml::serialize(testsupport::random_doc(2)));
}

TEST(DocGen, SingleNodeRange) {
  DocGenConfig cfg;
  cfg.node_count = {1, 1};
  xml::XmlDocument doc = testsupport::random_doc(3, cfg);
  EXPECT_EQ(doc.size(), 1u);
  EXPECT_EQ(doc.root(), NodeId{1});
}

TEST(DocGen, FiftyNodesIdsOneToFiftyAndAcyclic) {
  DocGenConfig cfg;
  cfg.node_count = {50, 50};
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed, cfg);
    ASSERT_EQ(doc.size(), 50u);
    std::set<std::uint32_t> ids;
    for (const auto& n : doc.nodes()) {
      ids.insert(n.id.value);
      std::size_t steps = 0;
      for (auto p = n.parent; p; p = doc.node(*p).parent) ASSERT_LT(++steps, 50u);
    }
    ASSERT_EQ(ids.size(), 50u);
    EXPECT_EQ(*ids.begin(), 1u);
    EXPECT_EQ(*ids.rbegin(), 50u);
    EXPECT_EQ(doc.root(), NodeId{1});
  }
}

TEST(DocGen, TreePartitionAndClosure) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    auto gen = docgen::generate_document_with_templates(rng, {});
    const auto& doc = gen.doc;
    // children of all nodes plus the root cover every node exactly once
    std::map<std::uint32_t, int> seen{{doc.root().value, 1}};
    for (const auto& n : doc.nodes()) {
      for (NodeId c : n.children) ++seen[c.value];
    }
    ASSERT_EQ(seen.size(), doc.size());
    for (const auto& [id, count] : seen) ASSERT_EQ(count, 1) << id;

    ASSERT_EQ(gen.assignment.size(), doc.size());
    EXPECT_EQ(gen.templates.size(), (doc.size() + 1) / 2);
    for (const auto& n : doc.nodes()) {
      std::size_t matches = 0;
      for (const auto& t : gen.templates) {
        if (t.tag != n.tag || t.attributes.size() + 1 != n.attributes.size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < t.attributes.size(); ++i) {
          const auto& a = n.attributes[i + 1];
          const bool is_int = std::holds_alternative<std::int64_t>(a.value);
          same = same && a.name == t.attributes[i].name && is_int == (t.attributes[i].kind == docgen::ValueKind::kInteger);
        }
        const bool content_ok = t.content == docgen::ContentKind::kInteger   ? n.text && std::holds_alternative<std::int64_t>(*n.text)
                                : t.content == docgen::ContentKind::kString ? n.text && std::holds_alternative<std::string>(*n.text)
                                                                             : !n.text.has_value();
        if (same && content_ok) ++matches;
      }
      EXPECT_EQ(matches, 1u) << "node " << n.id.value;
      // text and children never coexist
      EXPECT_FALSE(n.text.has_value() && !n.children.empty());
      const auto& parent_tmpl = n.parent ? gen.templates[gen.assignment[n.parent->value - 1]] : gen.templates[0];
      if (n.parent) {
        EXPECT_TRUE(parent_tmpl.is_container());
      }
    }
  }
}

TEST(DocGen, StructuralOverlapByPigeonhole) {
  DocGenConfig cfg;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto gen = docgen::generate_document_with_templates(rng, cfg);
    if (gen.doc.size() < 2 * gen.templates.size()) continue;
    std::map<std::size_t, int> uses;
    for (std::size_t t : gen.assignment) ++uses[t];
    int most = 0;
    for (const auto& [t, c] : uses) most = std::max(most, c);
    EXPECT_GE(most, 2);
  }
}

TEST(DocGen, ValuesStayInConfiguredRanges) {
  DocGenConfig cfg;
  cfg.integer_range = {-7, 9};
  cfg.string_length = {2, 4};
  std::size_t scanned = 0;
  for (std::uint64_t seed = 0; scanned < 10000; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed, cfg);
    for (const auto& n : doc.nodes()) {
      ++scanned;
      EXPECT_LE(n.attributes.size(), 4u);
      auto check = [&](const xml::TypedValue& v) {
        if (const auto* i = std::get_if<std::int64_t>(&v)) {
          EXPECT_GE(*i, -7);
          EXPECT_LE(*i, 9);
        } else {
          const auto& s = std::get<std::string>(v);
          EXPECT_GE(s.size(), 2u);
          EXPECT_LE(s.size(), 4u);
          EXPECT_NE(s.front(), ' ');
          EXPECT_NE(s.back(), ' ');
          for (char c : s) EXPECT_TRUE(c == ' ' || (c >= 'a' && c <= 'z'));
        }
      };
      for (std::size_t i = 1; i < n.attributes.size(); ++i) check(n.attributes[i].value);
      if (n.text) check(*n.text);
    }
  }
}

TEST(DocGen, InstantiateBareTemplate) {
  Rng rng(1);
  docgen::NodeTemplate t{"T", {}, docgen::ContentKind::kNone};
  xml::ElementNode n = docgen::instantiate_node(rng, t, NodeId{4});
  EXPECT_EQ(xml::serialize(xml::XmlDocument({n})), R"(<T id="4"/>)");
}

TEST(DocGen, RejectsEmptyRanges) {
  DocGenConfig cfg;
  cfg.node_count = {5, 2};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.node_count = {0, 2};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.string_length = {-1, 2};
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_NO_THROW(DocGenConfig{}.validate());
}

}  // namespace
