#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "support.h"
#include "xpathdiff/campaign/campaign.h"

using namespace xpathdiff;
using namespace xpathdiff::campaign;
using harness::engine_from_token;
using harness::mutant_engine;
using xpath::Standard;

namespace {

CampaignConfig config(Standard s, std::vector<std::string> tokens, std::uint64_t cases, std::uint64_t seed = 1) {
  CampaignConfig cfg;
  cfg.query_gen.standard = s;
  for (const auto& t : tokens) cfg.engines.push_back(engine_from_token(t, s));
  cfg.cases = cases;
  cfg.seed = seed;
  cfg.query_gen.queries_per_doc = 50;
  return cfg;
}

TEST(Campaign, BuiltinsAgreeWithEachOther) {
  for (Standard s : {Standard::kV1_0, Standard::kV3_0}) {
    auto out = run_campaign(config(s, {"builtin_a", "builtin_b"}, 1000));
    EXPECT_EQ(out.report.cases, 1000u);
    EXPECT_EQ(out.report.documents, 20u);
    EXPECT_EQ(out.report.discrepancies, 0u);
    EXPECT_TRUE(out.records.empty());
    EXPECT_EQ(out.report.nonempty, out.report.cases);
  }
}

TEST(Campaign, OrTrueMutantIsCaught) {
  auto out = run_campaign(config(Standard::kV3_0, {"builtin_a", "mutant:or_true_rewrite"}, 3000));
  EXPECT_GE(out.report.discrepancies, 1u);
  EXPECT_EQ(out.report.discrepancies, out.records.size());
  EXPECT_EQ(out.report.logic + out.report.error, out.report.discrepancies);
  std::size_t logic = 0;
  for (const auto& r : out.records) logic += nlohmann::json::parse(r).at("klass") == "logic";
  EXPECT_EQ(logic, out.report.logic);
}

TEST(Campaign, SameSeedSameRecords) {
  auto cfg = config(Standard::kV3_0, {"builtin_a", "mutant:mul_compare_rewrite", "mutant:or_true_rewrite"}, 2000, 9);
  auto first = run_campaign(cfg);
  auto second = run_campaign(cfg);
  EXPECT_EQ(first.records, second.records);
  EXPECT_EQ(first.report.fingerprints, second.report.fingerprints);
  EXPECT_EQ(first.report.nonempty, second.report.nonempty);
}

TEST(Campaign, ParallelLanesMatchSerialReference) {
  auto cfg = config(Standard::kV3_0, {"builtin_a", "mutant:or_true_rewrite", "mutant:tail_subseq_off_by_one"}, 3000, 4);
  cfg.lanes = 4;
  cfg.parallel = false;
  auto serial = run_campaign(cfg);
  cfg.parallel = true;
  auto parallel = run_campaign(cfg);
  ASSERT_GT(serial.records.size(), 0u);
  EXPECT_EQ(serial.records, parallel.records);
  EXPECT_EQ(to_json(serial.report).at("totals"), to_json(parallel.report).at("totals"));
  std::uint32_t last_lane = 0;
  for (const auto& r : serial.records) {
    auto lane = nlohmann::json::parse(r).at("case").at("provenance").at("lane").get<std::uint32_t>();
    EXPECT_GE(lane, last_lane);
    last_lane = lane;
  }
}

TEST(Campaign, SuppressedFingerprintsAreCountedNotRecorded) {
  auto cfg = config(Standard::kV3_0, {"builtin_a", "mutant:or_true_rewrite"}, 3000);
  auto first = run_campaign(cfg);
  ASSERT_GT(first.report.discrepancies, 0u);
  cfg.suppress = first.report.fingerprints;
  auto again = run_campaign(cfg);
  EXPECT_EQ(again.report.discrepancies, 0u);
  EXPECT_TRUE(again.records.empty());
  EXPECT_EQ(again.report.suppressed, first.report.discrepancies);
}

TEST(Campaign, ReplayFromRecordAndProvenance) {
  auto cfg = config(Standard::kV3_0, {"builtin_a", "mutant:or_true_rewrite"}, 3000);
  auto out = run_campaign(cfg);
  ASSERT_GT(out.records.size(), 0u);
  auto rec = nlohmann::json::parse(out.records.front());

  auto rep = replay(rec, cfg.engines);
  ASSERT_TRUE(rep.discrepancy);
  EXPECT_EQ(rep.discrepancy->fingerprint, rec.at("fingerprint"));

  const auto& prov = rec.at("case").at("provenance");
  auto regenerated = regenerate_case(cfg, prov.at("doc"), prov.at("query"));
  EXPECT_EQ(regenerated.doc_text, rec.at("case").at("doc"));
  EXPECT_EQ(regenerated.query_text, rec.at("case").at("query"));

  auto by_provenance = rec;
  by_provenance["case"].erase("doc");
  by_provenance["case"].erase("query");
  by_provenance["case"].erase("query_ast");
  auto rep2 = replay(by_provenance, cfg.engines, cfg);
  ASSERT_TRUE(rep2.discrepancy);
  EXPECT_EQ(rep2.discrepancy->fingerprint, rec.at("fingerprint"));

  try {
    replay(rec, {engine_from_token("builtin_a", Standard::kV3_0), engine_from_token("builtin_b", Standard::kV3_0)});
    FAIL();
  } catch (const harness::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("mutant:or_true_rewrite"), std::string::npos);
  }
  auto v1 = cfg.engines;
  for (auto& e : v1) e.standard = Standard::kV1_0;
  EXPECT_THROW(replay(rec, v1), harness::ConfigError);
}

TEST(Campaign, HandshakeRejectsBrokenEngine) {
  EXPECT_NO_THROW(handshake({engine_from_token("builtin_a", Standard::kV3_0), engine_from_token("builtin_b", Standard::kV3_0)}));
  harness::EngineSpec wrong;
  wrong.name = "wrong";
  wrong.kind = harness::EngineKind::kSubprocess;
  wrong.command_template = "echo 'N 2' # {doc} {query}";
  auto cfg = config(Standard::kV3_0, {"builtin_a"}, 10);
  cfg.engines.push_back(wrong);
  try {
    run_campaign(cfg);
    FAIL();
  } catch (const harness::ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("wrong"), std::string::npos);
  }
  cfg.handshake = false;
  EXPECT_NO_THROW(run_campaign(cfg));
}

TEST(Campaign, ConfigValidationAndRoundTrip) {
  auto cfg = config(Standard::kV1_0, {"builtin_a", "mutant:or_true_rewrite"}, 123, 42);
  cfg.lanes = 3;
  cfg.suppress = {"abc"};
  cfg.query_gen.mode = gen::Mode::kUntargeted;
  cfg.query_gen.rectify = false;
  cfg.doc_gen.node_count = {2, 9};
  auto back = config_from_json(nlohmann::json::parse(to_json(cfg).dump()));
  EXPECT_EQ(to_json(back), to_json(cfg));
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.engines.size(), 2u);
  EXPECT_EQ(back.query_gen.standard, Standard::kV1_0);

  auto bad = cfg;
  bad.engines.pop_back();
  EXPECT_THROW(bad.validate(), harness::ConfigError);
  bad = cfg;
  bad.cases.reset();
  bad.duration_s.reset();
  EXPECT_ANY_THROW(bad.validate());
  bad = cfg;
  bad.lanes = 0;
  EXPECT_ANY_THROW(bad.validate());
  bad = cfg;
  bad.query_gen.standard = Standard::kV3_0;
  EXPECT_THROW(bad.validate(), harness::ConfigError);
}

TEST(Campaign, DurationBudgetStops) {
  auto cfg = config(Standard::kV3_0, {"builtin_a", "builtin_b"}, 0);
  cfg.cases.reset();
  cfg.duration_s = 0.3;
  auto out = run_campaign(cfg);
  EXPECT_GT(out.report.cases, 0u);
  EXPECT_LT(out.report.elapsed_s, 5.0);
}

TEST(Campaign, WritesOutputsAndStatsAggregate) {
  auto dir = std::filesystem::temp_directory_path() / ("xpathdiff-campaign-" + std::to_string(::getpid()));
  auto cfg = config(Standard::kV3_0, {"builtin_a", "mutant:or_true_rewrite"}, 2000);
  cfg.out_dir = dir.string();
  auto out = run_campaign(cfg);
  write_outputs(cfg, out);
  std::ifstream jsonl(dir / "discrepancies.jsonl");
  std::size_t lines = 0;
  for (std::string l; std::getline(jsonl, l);) ++lines;
  EXPECT_EQ(lines, out.report.discrepancies);
  std::ifstream rep(dir / "report.json");
  CampaignReport r = report_from_json(nlohmann::json::parse(rep));
  EXPECT_EQ(r.cases, out.report.cases);
  EXPECT_EQ(r.fingerprints, out.report.fingerprints);
  EXPECT_TRUE(std::filesystem::exists(dir / "config.json"));
  std::filesystem::remove_all(dir);

  EXPECT_TRUE(stats({}).empty());
  auto other = run_campaign(config(Standard::kV3_0, {"builtin_a", "mutant:or_true_rewrite"}, 2000, 2)).report;
  auto untargeted_cfg = config(Standard::kV3_0, {"builtin_a", "builtin_b"}, 500);
  untargeted_cfg.query_gen.mode = gen::Mode::kUntargeted;
  untargeted_cfg.query_gen.rectify = false;
  auto untargeted = run_campaign(untargeted_cfg).report;
  auto rows = stats({out.report, other, untargeted});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].label, "targeted+rectify");
  EXPECT_EQ(rows[0].runs, 2u);
  EXPECT_EQ(rows[0].cases, 4000u);
  std::set<std::string> uni = out.report.fingerprints;
  uni.insert(other.fingerprints.begin(), other.fingerprints.end());
  EXPECT_EQ(rows[0].unique, uni.size());
  EXPECT_EQ(rows[0].discrepancies, out.report.discrepancies + other.discrepancies);
  EXPECT_EQ(rows[1].label, "untargeted");
  EXPECT_LT(rows[1].nonempty_rate(), 1.0);
}

}  // namespace
