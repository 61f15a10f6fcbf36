#include <gtest/gtest.h>

#include "support.h"
#include "xpathdiff/eval/batch_evaluator.h"

using namespace xpathdiff;
using testsupport::raw;
using xml::Axis;
using xml::NodeId;

namespace {

constexpr const char* kBooks =
    R"(<Books id="1"><Book id="2" year="2020">A fairy tale</Book><Book id="3" year="1998"/><Book id="4"><Author id="5"/></Book></Books>)";

TEST(XmlDocument, NavigatesTheBooksTree) {
  xml::XmlDocument doc = xml::parse(kBooks);
  EXPECT_EQ(doc.root(), NodeId{1});
  EXPECT_EQ(doc.size(), 5u);
  EXPECT_EQ(raw(xml::navigate_axis(doc, NodeId{1}, Axis::kChild)), (std::vector<std::uint32_t>{2, 3, 4}));
  EXPECT_EQ(raw(xml::navigate_axis(doc, NodeId{5}, Axis::kAncestor)), (std::vector<std::uint32_t>{4, 1}));
  EXPECT_EQ(raw(xml::navigate_axis(doc, NodeId{4}, Axis::kPrecedingSibling)), (std::vector<std::uint32_t>{3, 2}));
  EXPECT_EQ(raw(xml::navigate_axis(doc, NodeId{2}, Axis::kFollowing)), (std::vector<std::uint32_t>{3, 4, 5}));
  EXPECT_EQ(raw(xml::navigate_axis(doc, xml::kDocumentOrigin, Axis::kChild)), (std::vector<std::uint32_t>{1}));
  EXPECT_TRUE(xml::navigate_axis(doc, xml::kDocumentOrigin, Axis::kParent).empty());
}

TEST(XmlDocument, StringValueConcatenatesDescendantText) {
  xml::XmlDocument doc = xml::parse(R"(<A id="1"><B id="2">ab</B><C id="3"><D id="4">12</D></C></A>)");
  EXPECT_EQ(doc.string_value(0), "ab12");
  EXPECT_EQ(doc.string_value(doc.order_of(NodeId{3})), "12");
}

TEST(XmlDocument, RejectsBrokenTrees) {
  auto node = [](std::uint32_t id, std::optional<std::uint32_t> parent, std::vector<std::uint32_t> children) {
    xml::ElementNode n;
    n.id = NodeId{id};
    n.tag = "T";
    n.attributes.push_back({"id", static_cast<std::int64_t>(id)});
    if (parent) n.parent = NodeId{*parent};
    for (auto c : children) n.children.push_back(NodeId{c});
    return n;
  };
  EXPECT_THROW(xml::XmlDocument({node(1, std::nullopt, {}), node(2, std::nullopt, {})}), xml::DocumentError);
  EXPECT_THROW(xml::XmlDocument({node(1, std::nullopt, {2}), node(2, 3, {})}), xml::DocumentError);
  EXPECT_THROW(xml::XmlDocument({node(1, std::nullopt, {1})}), xml::DocumentError);
  auto bad = node(1, std::nullopt, {});
  bad.attributes.front().value = std::int64_t{7};
  EXPECT_THROW(xml::XmlDocument({bad}), xml::DocumentError);
  EXPECT_THROW(xml::XmlDocument({}), xml::DocumentError);
}

TEST(XmlDocument, AxesMatchLinkOracleOnRandomDocuments) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed);
    testsupport::AxisOracle oracle(doc);
    std::vector<NodeId> contexts = oracle.preorder();
    contexts.push_back(xml::kDocumentOrigin);
    for (NodeId x : contexts) {
      for (Axis a : xml::kAllAxes) {
        ASSERT_EQ(xml::navigate_axis(doc, x, a), oracle.axis(x, a))
            << "seed " << seed << " node " << x.value << " axis " << xml::axis_name(a);
        std::vector<std::uint32_t> orders;
        const std::int32_t ctx = x == xml::kDocumentOrigin ? xml::XmlDocument::kOriginOrder
                                                           : static_cast<std::int32_t>(doc.order_of(x));
        eval::interval_axis(doc, ctx, a, orders);
        std::vector<NodeId> via_intervals;
        for (std::uint32_t o : orders) via_intervals.push_back(doc.at(o).id);
        ASSERT_EQ(via_intervals, oracle.axis(x, a)) << "interval encoding, axis " << xml::axis_name(a);
      }
    }
  }
}

TEST(XmlDocument, DocumentOrderDedupMatchesPreorderIndex) {
  EXPECT_TRUE(xml::document_order_dedup(xml::parse(kBooks), {}).empty());
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed);
    testsupport::AxisOracle oracle(doc);
    Rng rng(seed);
    std::vector<NodeId> bag;
    for (int i = 0; i < 30; ++i) bag.push_back(oracle.preorder()[rng.index(oracle.preorder().size())]);
    std::vector<NodeId> expected;
    for (NodeId n : oracle.preorder()) {
      if (std::find(bag.begin(), bag.end(), n) != bag.end()) expected.push_back(n);
    }
    EXPECT_EQ(xml::document_order_dedup(doc, bag), expected);
  }
}

TEST(Serialize, RoundTripsGeneratedDocuments) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed);
    std::string text = xml::serialize(doc);
    xml::XmlDocument back = xml::parse(text);
    ASSERT_TRUE(back == doc) << text;
    EXPECT_EQ(xml::serialize(back), text);
  }
}

TEST(Serialize, EscapesMetacharacters) {
  std::vector<xml::ElementNode> nodes(1);
  nodes[0].id = NodeId{1};
  nodes[0].tag = "T";
  nodes[0].attributes = {{"id", std::int64_t{1}}, {"a", std::string("<\"&'>\r")}};
  nodes[0].text = std::string("a<b&c>\r");
  xml::XmlDocument doc(std::move(nodes));
  std::string text = xml::serialize(doc);
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_EQ(text.find("<\""), std::string::npos);
  EXPECT_TRUE(xml::parse(text) == doc);
  EXPECT_EQ(xml::serialize(doc, {.xml_declaration = true}).rfind("<?xml", 0), 0u);
}

TEST(Serialize, ParsesIntegersAndEmptyText) {
  xml::XmlDocument doc = xml::parse(R"(<?xml version="1.0"?><A id="1" n="-5" s="x1"><B id="2"></B></A>)");
  const xml::ElementNode& a = doc.node(NodeId{1});
  EXPECT_EQ(std::get<std::int64_t>(a.find_attribute("n")->value), -5);
  EXPECT_EQ(std::get<std::string>(a.find_attribute("s")->value), "x1");
  ASSERT_TRUE(doc.node(NodeId{2}).text.has_value());
  EXPECT_EQ(xml::lexical(*doc.node(NodeId{2}).text), "");
}

TEST(Serialize, ReportsParseErrorOffsets) {
  EXPECT_THROW(xml::parse("<A id=\"1\">"), xml::ParseError);
  EXPECT_THROW(xml::parse("<A id=\"1\">x<B id=\"2\"/></A>"), xml::ParseError);
  EXPECT_THROW(xml::parse("<A></A>"), std::exception);
  try {
    xml::parse("<A id=\"1\"></B>");
    FAIL();
  } catch (const xml::ParseError& e) {
    EXPECT_GT(e.position(), 0u);
  }
}

}  // namespace
