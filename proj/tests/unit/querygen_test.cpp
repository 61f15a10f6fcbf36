#include <gtest/gtest.h>

#include <map>
#include <set>

#include "support.h"
#include "xpathdiff/eval/evaluator.h"
#include "xpathdiff/gen/query_gen.h"
#include "xpathdiff/xpath/render.h"

using namespace xpathdiff;
using namespace xpathdiff::xpath;
using gen::GenConfig;
using testsupport::raw;
using xml::Axis;
using xml::NodeId;

namespace {

bool holds(const xml::XmlDocument& doc, const gen::PredicateSite& site, const ExprNode& pred) {
  return eval::predicate_holds({&doc, site.target, site.position, site.size, site.standard}, pred);
}

void visit(const ExprNode& n, const std::function<void(const ExprNode&)>& f) {
  f(n);
  for (const auto& c : n.children) visit(c, f);
}

TEST(ApplicableAxes, SingleNodeDocumentHasSelfInclusiveAxes) {
  xml::XmlDocument doc = xml::parse(R"(<T id="1"/>)");
  std::vector<NodeId> ctx{NodeId{1}};
  auto axes = gen::applicable_axes(doc, ctx);
  // the self-inclusive axes are nonempty at any node
  EXPECT_EQ(std::set<Axis>(axes.begin(), axes.end()),
            (std::set<Axis>{Axis::kSelf, Axis::kAncestorOrSelf, Axis::kDescendantOrSelf}));
}

TEST(ApplicableAxes, MatchBruteForceOnRandomDocuments) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed);
    testsupport::AxisOracle oracle(doc);
    Rng rng(seed);
    std::vector<NodeId> all = oracle.preorder();
    all.push_back(xml::kDocumentOrigin);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<NodeId> ctx;
      const std::size_t n = 1 + rng.index(3);
      for (std::size_t i = 0; i < n; ++i) ctx.push_back(all[rng.index(all.size())]);
      std::set<Axis> expected;
      for (Axis a : xml::kAllAxes) {
        for (NodeId c : ctx) {
          if (!oracle.axis(c, a).empty()) expected.insert(a);
        }
      }
      auto got = gen::applicable_axes(doc, ctx);
      EXPECT_EQ(std::set<Axis>(got.begin(), got.end()), expected) << "seed " << seed;
    }
  }
}

TEST(ApplicableAxes, RootOfBooks) {
  xml::XmlDocument doc = xml::parse(R"(<Books id="1"><Book id="2"/><Book id="3"/></Books>)");
  std::vector<NodeId> ctx{NodeId{1}};
  auto axes = gen::applicable_axes(doc, ctx);
  std::set<Axis> got(axes.begin(), axes.end());
  for (Axis a : {Axis::kChild, Axis::kDescendant, Axis::kDescendantOrSelf, Axis::kSelf}) EXPECT_TRUE(got.contains(a));
  for (Axis a : {Axis::kParent, Axis::kAncestor, Axis::kFollowing, Axis::kPrecedingSibling}) {
    EXPECT_FALSE(got.contains(a));
  }
}

TEST(SectionPrefix, NonemptyAndTagFromAxisResult) {
  GenConfig cfg;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed % 200);
    Rng rng(seed);
    std::vector<NodeId> ctx = eval::initial_context();
    for (int depth = 0; depth < 3; ++depth) {
      auto choice = gen::generate_section_prefix(rng, doc, ctx, cfg);
      ASSERT_FALSE(choice.result.empty());
      EXPECT_EQ(choice.result, eval::merge_groups(doc, eval::expand_step(doc, ctx, choice.prefix)));
      if (choice.prefix.tag) {
        for (NodeId n : choice.result) EXPECT_EQ(doc.node(n).tag, *choice.prefix.tag);
      }
      ctx = choice.result;
    }
  }
}

TEST(SectionPrefix, WildcardDescendantFromOriginSelectsAll) {
  xml::XmlDocument doc = testsupport::random_doc(4);
  SectionPrefix p{StepKind::kDoubleSlash, Axis::kChild, std::nullopt};
  std::vector<NodeId> origin = eval::initial_context();
  EXPECT_EQ(eval::merge_groups(doc, eval::expand_step(doc, origin, p)), doc.document_order());
}

TEST(SelectTarget, UniformOverCandidates) {
  Rng rng(1);
  std::vector<NodeId> c{NodeId{1}, NodeId{2}, NodeId{3}, NodeId{4}, NodeId{5}};
  std::map<std::uint32_t, int> freq;
  for (int i = 0; i < 10000; ++i) ++freq[gen::select_target(rng, c).value];
  double chi = 0;
  for (const auto& [id, f] : freq) chi += (f - 2000.0) * (f - 2000.0) / 2000.0;
  EXPECT_LT(chi, 30.0);
  std::vector<NodeId> one{NodeId{7}};
  EXPECT_EQ(gen::select_target(rng, one), NodeId{7});
}

TEST(Predicate, EqualOperandOnIdHoldsAtTarget) {
  xml::XmlDocument doc = xml::parse(R"(<A id="1"><B id="3" t="5"/></A>)");
  GenConfig cfg;
  cfg.equal_operand_prob = 1.0;
  gen::PredicateSite site{NodeId{3}, 1, 1, Standard::kV1_0};
  int held = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    ExprNode p = gen::generate_predicate(rng, doc, site, cfg);
    EXPECT_LE(depth(p), cfg.max_depth);
    held += holds(doc, site, p) ? 1 : 0;
  }
  EXPECT_GT(held, 0);
}

TEST(Rectify, AlgorithmCases) {
  xml::XmlDocument doc = xml::parse(R"(<Book id="1"><Author id="2"/><Author id="3"/></Book>)");
  gen::PredicateSite site{NodeId{1}, 1, 1, Standard::kV1_0};
  auto count_le = ExprNode::binary(Operator::kLe, ExprNode::call(Function::kCount, {ExprNode::child_path("Author")}),
                                   ExprNode::integer(1));
  Rng rng(3);
  // never wraps in not(): the comparison gets its opposite operator
  ExprNode fixed = gen::rectify_predicate(rng, doc, count_le, site, 0.0);
  EXPECT_EQ(render(fixed), "count(Author) > 1");
  // already true: unchanged
  gen::RectifyStats stats;
  EXPECT_EQ(gen::rectify_predicate(rng, doc, fixed, site, 0.5, &stats), fixed);
  EXPECT_EQ(stats.calls, 1u);
  EXPECT_EQ(stats.rewritten, 0u);

  auto eq99 = ExprNode::binary(Operator::kEq, ExprNode::attribute("id"), ExprNode::integer(99));
  std::set<std::string> forms;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng r(s);
    ExprNode out = gen::rectify_predicate(r, doc, eq99, site, 0.5);
    EXPECT_TRUE(holds(doc, site, out));
    forms.insert(render(out));
  }
  EXPECT_EQ(forms, (std::set<std::string>{"not(@id = 99)", "@id != 99"}));
}

TEST(Rectify, FallbackWhenOppositeIsNotNegation) {
  // @t is missing, so both @t = 1 and @t != 1 are false
  xml::XmlDocument doc = xml::parse(R"(<T id="1"/>)");
  gen::PredicateSite site{NodeId{1}, 1, 1, Standard::kV1_0};
  auto eq = ExprNode::binary(Operator::kEq, ExprNode::attribute("t"), ExprNode::integer(1));
  Rng rng(1);
  gen::RectifyStats stats;
  ExprNode out = gen::rectify_predicate(rng, doc, eq, site, 0.0, &stats);
  EXPECT_TRUE(holds(doc, site, out));
  EXPECT_EQ(render(out), "not(@t = 1)");
  EXPECT_EQ(stats.fallbacks, 1u);
}

TEST(Rectify, PostConditionOnRandomPredicates) {
  GenConfig cfg;
  gen::RectifyStats stats;
  std::size_t checked = 0;
  for (Standard s : {Standard::kV1_0, Standard::kV3_0}) {
    cfg.standard = s;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
      xml::XmlDocument doc = testsupport::random_doc(seed);
      Rng rng(seed);
      for (int i = 0; i < 10; ++i) {
        std::vector<NodeId> nodes = doc.document_order();
        std::size_t size = 1 + rng.index(nodes.size());
        gen::PredicateSite site{nodes[rng.index(nodes.size())], 1 + rng.index(size), size, s};
        ExprNode p = gen::generate_untargeted_predicate(rng, doc, cfg);
        // the generator drops predicates that raise at the site
        try {
          holds(doc, site, p);
        } catch (const eval::EvalError&) {
          continue;
        }
        ExprNode r = gen::rectify_predicate(rng, doc, p, site, cfg.not_wrap_prob, &stats);
        ASSERT_TRUE(holds(doc, site, r)) << render(p) << " -> " << render(r);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 2000u);
  EXPECT_GT(stats.rewritten, 0u);
  EXPECT_LE(stats.fallbacks, stats.rewritten);
}

TEST(Positional, BodyEvaluatesToTargetPosition) {
  xml::XmlDocument doc = xml::parse(R"(<T id="1"/>)");
  Rng rng(9);
  for (int i = 0; i < 2000; ++i) {
    std::size_t size = 1 + rng.index(20);
    std::size_t pos = 1 + rng.index(size);
    Predicate p = gen::generate_positional_predicate(rng, pos, size);
    EXPECT_EQ(p.kind, PredicateKind::kPositional);
    auto v = eval::evaluate_subexpr({&doc, NodeId{1}, 1, 1, Standard::kV1_0}, p.body);
    ASSERT_TRUE(v.ok());
    ASSERT_EQ(v.value.size(), 1u);
    EXPECT_EQ(std::get<double>(v.value[0]), static_cast<double>(pos));
  }
  Rng one(1);
  EXPECT_EQ(render(gen::generate_positional_predicate(one, 1, 1).body), "1");
}

TEST(GenerateQuery, TargetedRectifiedGuarantees) {
  for (Standard s : {Standard::kV1_0, Standard::kV3_0}) {
    GenConfig cfg;
    cfg.standard = s;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      xml::XmlDocument doc = testsupport::random_doc(seed);
      Rng rng(seed);
      for (int i = 0; i < 30; ++i) {
        auto g = gen::generate_query(rng, doc, cfg);
        const auto& q = g.expr;
        ASSERT_EQ(q.standard, s);
        ASSERT_GE(q.sections.size(), 1u);
        ASSERT_LE(q.sections.size(), 7u);
        ASSERT_EQ(g.trace.sections.size(), q.sections.size());
        auto r = eval::evaluate(doc, q);
        ASSERT_TRUE(r.ok()) << render(q);
        ASSERT_FALSE(r.value.empty()) << render(q);
        EXPECT_EQ(eval::element_ids(r.value), g.trace.result);
        for (std::size_t k = 0; k < q.sections.size(); ++k) {
          const auto& st = g.trace.sections[k];
          ASSERT_TRUE(st.target.has_value());
          EXPECT_NE(std::find(st.candidates.begin(), st.candidates.end(), *st.target), st.candidates.end());
          EXPECT_NE(std::find(st.result.begin(), st.result.end(), *st.target), st.result.end()) << render(q);
          EXPECT_LE(q.sections[k].predicates.size(), cfg.max_predicates);
          const auto& target = doc.node(*st.target);
          for (const auto& p : q.sections[k].predicates) {
            EXPECT_LE(depth(p.body), cfg.max_depth);
            EXPECT_LE(subject_count(p.body), cfg.max_subjects);
            visit(p.body, [&](const ExprNode& n) {
              if (n.kind == NodeKind::kAttribute && n.name != "*") {
                EXPECT_NE(target.find_attribute(n.name), nullptr) << render(q) << " @" << n.name;
              }
              if (n.kind == NodeKind::kChildPath) {
                bool found = false;
                for (NodeId c : target.children) found = found || doc.node(c).tag == n.name;
                EXPECT_TRUE(found) << render(q) << " " << n.name;
              }
            });
          }
        }
      }
    }
  }
}

TEST(GenerateQuery, SingleNodeDocumentAlwaysReturnsIt) {
  xml::XmlDocument doc = xml::parse(R"(<T id="1" a="2">x</T>)");
  GenConfig cfg;
  cfg.standard = Standard::kV3_0;
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    auto q = gen::generate_query(rng, doc, cfg).expr;
    auto r = eval::evaluate(doc, q);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(raw(eval::element_ids(r.value)), std::vector<std::uint32_t>{1}) << render(q);
  }
}

TEST(GenerateQuery, DeterministicForSeedDocAndConfig) {
  xml::XmlDocument doc = testsupport::random_doc(12);
  for (gen::Mode m : {gen::Mode::kTargeted, gen::Mode::kUntargeted}) {
    GenConfig cfg;
    cfg.mode = m;
    Rng a(77), b(77);
    for (int i = 0; i < 50; ++i) {
      EXPECT_EQ(render(gen::generate_query(a, doc, cfg).expr), render(gen::generate_query(b, doc, cfg).expr));
    }
  }
}

TEST(GenerateQuery, UntargetedWithoutRectifyIsOftenEmpty) {
  GenConfig cfg;
  cfg.mode = gen::Mode::kUntargeted;
  cfg.rectify = false;
  std::size_t nonempty = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    xml::XmlDocument doc = testsupport::random_doc(seed);
    Rng rng(seed);
    for (int i = 0; i < 20; ++i) {
      auto r = eval::evaluate(doc, gen::generate_query(rng, doc, cfg).expr);
      ++total;
      nonempty += r.ok() && !r.value.empty();
    }
  }
  EXPECT_LT(nonempty, total);
}

TEST(GenConfig, ValidatesRangesAndProbabilities) {
  EXPECT_NO_THROW(GenConfig{}.validate());
  GenConfig c;
  c.max_sections = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.min_sections = 5;
  c.max_sections = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.not_wrap_prob = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(gen::mode_from_name(gen::mode_name(gen::Mode::kUntargeted)), gen::Mode::kUntargeted);
  EXPECT_FALSE(gen::mode_from_name("bogus").has_value());
}

}  // namespace
