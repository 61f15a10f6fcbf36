// Acceptance suite: one PASS/FAIL line per criterion. Criterion 10 only warns.
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "xpathdiff/campaign/campaign.h"
#include "xpathdiff/docgen/doc_gen.h"
#include "xpathdiff/eval/batch_evaluator.h"
#include "xpathdiff/eval/evaluator.h"
#include "xpathdiff/gen/query_gen.h"
#include "xpathdiff/harness/harness.h"
#include "xpathdiff/reduce/reducer.h"
#include "xpathdiff/xml/serialize.h"
#include "xpathdiff/xpath/ast_json.h"

using namespace xpathdiff;
using xpath::Standard;

namespace {

// Pinned tolerances.
constexpr std::uint64_t kC1Cases = 10'000;
constexpr double kC1MinRate = 1.0;
constexpr std::uint64_t kC2CasesPerMode = 10'000;
constexpr double kC2UntargetedMax = 0.80;
constexpr std::uint64_t kC4Seeds = 10;
constexpr std::uint64_t kC4Cases = 5'000;
constexpr std::uint64_t kC5Cases = 100'000;
constexpr std::size_t kC6Docs = 1'000;
constexpr std::size_t kC7Predicates = 10'000;
constexpr std::uint64_t kC8Seeds = 10;
constexpr std::uint64_t kC8Cases = 5'000;
constexpr std::size_t kC8PerSeed = 12;
// 90% / 70% soft targets minus 15 points
constexpr double kC8MaxTwoSections = 0.75;
constexpr double kC8SingleNode = 0.55;
constexpr std::uint64_t kC9Cases = 5'000;
constexpr double kC10MinThroughput = 50.0;

const char* const kMutants[] = {"mutant:mul_compare_rewrite", "mutant:or_true_rewrite",
                                "mutant:tail_subseq_off_by_one"};

int failures = 0;

void report(int n, bool pass, const std::string& what, const std::string& detail, bool warn_only = false) {
  const char* tag = pass ? "PASS" : (warn_only ? "WARN" : "FAIL");
  std::printf("%s criterion %d: %s (%s)\n", tag, n, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass && !warn_only) ++failures;
}

std::string pct(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * r);
  return buf;
}

campaign::CampaignConfig base_config(Standard s, const std::vector<std::string>& engines, std::uint64_t cases,
                                     std::uint64_t seed) {
  campaign::CampaignConfig cfg;
  cfg.query_gen.standard = s;
  for (const auto& e : engines) cfg.engines.push_back(harness::engine_from_token(e, s));
  cfg.cases = cases;
  cfg.seed = seed;
  return cfg;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Targeted+rectify yields nonempty results for every case, both standards.
void criterion_1() {
  std::ostringstream detail;
  bool ok = true;
  for (Standard s : {Standard::kV1_0, Standard::kV3_0}) {
    auto r = campaign::run_campaign(base_config(s, {"builtin_a", "builtin_b"}, kC1Cases, 101)).report;
    ok = ok && r.cases == kC1Cases && r.nonempty_rate() >= kC1MinRate;
    detail << xpath::standard_name(s) << ": " << r.nonempty << "/" << r.cases << " nonempty; ";
  }
  report(1, ok, "targeted+rectify nonempty rate = 100%", detail.str());
}

// 2. Ablation ordering of nonempty rates.
void criterion_2() {
  auto rate = [](gen::Mode mode, bool rectify) {
    auto cfg = base_config(Standard::kV1_0, {"builtin_a", "builtin_b"}, kC2CasesPerMode, 202);
    cfg.query_gen.mode = mode;
    cfg.query_gen.rectify = rectify;
    return campaign::run_campaign(cfg).report.nonempty_rate();
  };
  const double tr = rate(gen::Mode::kTargeted, true);
  const double t = rate(gen::Mode::kTargeted, false);
  const double u = rate(gen::Mode::kUntargeted, false);
  const double ur = rate(gen::Mode::kUntargeted, true);
  const bool ok = tr == 1.0 && tr > t && t > u && u <= kC2UntargetedMax;
  report(2, ok, "nonempty ordering targeted+rectify > targeted > untargeted, untargeted <= 80%",
         "targeted+rectify " + pct(tr) + ", targeted " + pct(t) + ", untargeted " + pct(u) +
             ", untargeted+rectify " + pct(ur) + " (informational)");
}

// 3. Regression fixtures on both builtin strategies.
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t total = 0, passed = 0;
  std::vector<std::string> bad;
  for (const auto& entry : std::filesystem::directory_iterator(XPATHDIFF_FIXTURE_DIR)) {
    std::ifstream in(entry.path());
    auto j = nlohmann::json::parse(in);
    harness::TestCase c = harness::case_from_json(j.at("case"));
    harness::Outcome expected = harness::outcome_from_json(j.at("expected"));
    for (const char* e : {"builtin_a", "builtin_b"}) {
      ++total;
      auto r = harness::run_engine(harness::engine_from_token(e, c.standard), c);
      if (r.outcome == expected) {
        ++passed;
      } else {
        bad.push_back(entry.path().stem().string() + "@" + e);
      }
    }
  }
  const double secs = seconds_since(t0);
  std::string detail = std::to_string(passed) + "/" + std::to_string(total) + " engine runs match, " +
                       std::to_string(secs) + " s";
  for (const auto& b : bad) detail += "; mismatch " + b;
  report(3, passed == total && total >= 14 && secs < 1.0, "regression fixtures on builtin_a and builtin_b", detail);
}

bool flags(const harness::Results& results, const std::string& mutant, const harness::TestCase& c) {
  harness::Results pair{{"builtin_a", results.at("builtin_a")}, {mutant, results.at(mutant)}};
  return harness::compare(c, pair).has_value();
}

harness::Results results_from_record(const nlohmann::json& rec) {
  harness::Results out;
  for (const auto& [name, o] : rec.at("results").items()) out[name] = {harness::outcome_from_json(o), 0};
  return out;
}

// 4. Every mutant is flagged within 5000 cases on each of 10 seeds.
void criterion_4() {
  std::vector<std::string> engines{"builtin_a"};
  engines.insert(engines.end(), std::begin(kMutants), std::end(kMutants));
  std::map<std::string, std::size_t> seeds_flagged;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= kC4Seeds; ++seed) {
    auto out = campaign::run_campaign(base_config(Standard::kV3_0, engines, kC4Cases, seed));
    std::set<std::string> hit;
    for (const auto& line : out.records) {
      auto rec = nlohmann::json::parse(line);
      auto results = results_from_record(rec);
      auto c = harness::case_from_json(rec.at("case"));
      for (const char* m : kMutants) {
        if (flags(results, m, c)) hit.insert(m);
      }
    }
    for (const auto& m : hit) ++seeds_flagged[m];
  }
  bool ok = true;
  for (const char* m : kMutants) {
    ok = ok && seeds_flagged[m] == kC4Seeds;
    detail << m << " " << seeds_flagged[m] << "/" << kC4Seeds << " seeds; ";
  }
  report(4, ok, "each mutant flagged within 5000 targeted+rectify cases on 10/10 seeds", detail.str());
}

double c10_throughput = 0;

// 5. builtin_a vs builtin_b never disagree; also feeds criterion 10.
void criterion_5() {
  std::size_t cases = 0, disc = 0;
  double elapsed = 0;
  for (Standard s : {Standard::kV1_0, Standard::kV3_0}) {
    auto r = campaign::run_campaign(base_config(s, {"builtin_a", "builtin_b"}, kC5Cases / 2, 505)).report;
    cases += r.cases;
    disc += r.discrepancies + r.suppressed;
    elapsed += r.elapsed_s;
  }
  c10_throughput = elapsed > 0 ? static_cast<double>(cases) / elapsed : 0;
  report(5, cases == kC5Cases && disc == 0, "builtin_a vs builtin_b self-agreement over 100000 cases",
         std::to_string(disc) + " discrepancies in " + std::to_string(cases) + " cases");
}

// Brute force: an axis applies if it yields an element for some context node.
std::set<xml::Axis> brute_force_axes(const xml::XmlDocument& doc, const std::vector<xml::NodeId>& ctx) {
  std::set<xml::Axis> out;
  for (xml::Axis a : xml::kAllAxes) {
    for (xml::NodeId n : ctx) {
      if (!xml::navigate_axis(doc, n, a).empty()) {
        out.insert(a);
        break;
      }
    }
  }
  return out;
}

// 6. applicable_axes against brute force over every context set met while generating.
void criterion_6() {
  std::size_t sets = 0, mismatches = 0;
  gen::GenConfig cfg;
  for (std::size_t d = 0; d < kC6Docs; ++d) {
    Rng drng(derive_seed({606, d}));
    xml::XmlDocument doc = docgen::generate_document(drng, {});
    Rng rng(derive_seed({606, d, 1}));
    for (int q = 0; q < 10; ++q) {
      cfg.mode = q % 2 ? gen::Mode::kUntargeted : gen::Mode::kTargeted;
      auto g = gen::generate_query(rng, doc, cfg);
      std::vector<xml::NodeId> ctx = eval::initial_context();
      for (std::size_t k = 0; k < g.expr.sections.size() && !ctx.empty(); ++k) {
        for (auto step : {xpath::StepKind::kSlash, xpath::StepKind::kDoubleSlash}) {
          auto contexts = eval::step_contexts(doc, ctx, step);
          auto got = gen::applicable_axes(doc, contexts);
          ++sets;
          if (std::set<xml::Axis>(got.begin(), got.end()) != brute_force_axes(doc, contexts)) ++mismatches;
        }
        ctx = g.trace.sections[k].result;
      }
    }
  }
  report(6, mismatches == 0, "applicable_axes equals brute force on 1000 documents",
         std::to_string(mismatches) + " mismatches over " + std::to_string(sets) + " context sets");
}

// 7. Rectified predicates keep the targeted node; fallback path exercised.
void criterion_7() {
  gen::RectifyStats stats;
  std::size_t kept = 0, total = 0, erroring = 0;
  for (std::uint64_t d = 0; total < kC7Predicates; ++d) {
    Rng rng(derive_seed({707, d}));
    xml::XmlDocument doc = docgen::generate_document(rng, {});
    gen::GenConfig cfg;
    cfg.standard = d % 2 ? Standard::kV3_0 : Standard::kV1_0;
    std::vector<xml::NodeId> ctx = eval::initial_context();
    for (int depth = 0; depth < 3 && total < kC7Predicates; ++depth) {
      auto prefix = gen::generate_section_prefix(rng, doc, ctx, cfg);
      xml::NodeId target = gen::select_target(rng, prefix.result);
      auto site = gen::locate(prefix.groups, target, cfg.standard);
      if (!site) break;
      xpath::ExprNode pred = gen::generate_predicate(rng, doc, *site, cfg);
      try {
        eval::predicate_holds({&doc, site->target, site->position, site->size, cfg.standard}, pred);
      } catch (const eval::EvalError&) {
        continue;  // the generator drops these
      }
      xpath::ExprNode fixed = gen::rectify_predicate(rng, doc, pred, *site, cfg.not_wrap_prob, &stats);
      std::vector<xml::NodeId> filtered;
      try {
        filtered = eval::merge_groups(doc, eval::filter_groups(doc, prefix.groups, fixed, cfg.standard));
      } catch (const eval::EvalError&) {
        ++erroring;  // errors on another candidate; the generator drops these
        break;
      }
      ++total;
      if (std::find(filtered.begin(), filtered.end(), target) != filtered.end()) ++kept;
      ctx = filtered;
    }
  }
  report(7, kept == total && stats.fallbacks >= 1, "rectified predicates keep the targeted node, fallback used",
         std::to_string(kept) + "/" + std::to_string(total) + " kept, " + std::to_string(stats.rewritten) +
             " rewritten, " + std::to_string(stats.fallbacks) + " fallbacks, " + std::to_string(erroring) +
             " skipped for errors on other candidates");
}

// 8. Reduction of mutant-found discrepancies yields small cases.
void criterion_8() {
  std::vector<std::string> engines{"builtin_a"};
  engines.insert(engines.end(), std::begin(kMutants), std::end(kMutants));
  std::size_t reduced = 0, small_query = 0, single_node = 0, still = 0;
  std::size_t query_chars = 0;
  for (std::uint64_t seed = 1; seed <= kC8Seeds; ++seed) {
    auto cfg = base_config(Standard::kV3_0, engines, kC8Cases, 800 + seed);
    auto out = campaign::run_campaign(cfg);
    std::map<std::string, std::size_t> per_pair;
    for (const auto& line : out.records) {
      auto rec = nlohmann::json::parse(line);
      auto [first, second] = rec.at("pair").get<std::pair<std::string, std::string>>();
      if (per_pair[second] >= kC8PerSeed / 3) continue;
      ++per_pair[second];
      auto spec = [&](const std::string& n) {
        for (const auto& e : cfg.engines) {
          if (e.name == n) return e;
        }
        throw std::runtime_error("unknown engine " + n);
      };
      auto klass = *harness::klass_from_name(rec.at("klass").get<std::string>());
      auto check = reduce::same_discrepancy(spec(first), spec(second), klass);
      harness::TestCase r = reduce::reduce(harness::case_from_json(rec.at("case")), check);
      ++reduced;
      still += check(r);
      small_query += r.query->sections.size() <= 2;
      single_node += xml::parse(r.doc_text).size() == 1;
      query_chars += r.query_text.size();
    }
  }
  const double q = reduced ? static_cast<double>(small_query) / reduced : 0;
  const double n = reduced ? static_cast<double>(single_node) / reduced : 0;
  const bool ok = reduced > 0 && still == reduced && q >= kC8MaxTwoSections && n >= kC8SingleNode;
  report(8, ok, "reduced cases: <= 2 sections >= 75%, single-node document >= 55%",
         std::to_string(reduced) + " reductions, " + pct(q) + " <= 2 sections, " + pct(n) + " single-node, " +
             "mean query length " + std::to_string(reduced ? query_chars / reduced : 0) + " chars, " +
             std::to_string(still) + " still reproduce");
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 9. Identical config and seed give byte-identical JSONL, also across lane modes.
void criterion_9() {
  std::vector<std::string> engines{"builtin_a"};
  engines.insert(engines.end(), std::begin(kMutants), std::end(kMutants));
  auto root = std::filesystem::temp_directory_path() / ("xpathdiff-acceptance-" + std::to_string(::getpid()));
  std::vector<std::string> files;
  std::size_t records = 0;
  int run = 0;
  for (auto [lanes, parallel] : {std::pair{1u, true}, std::pair{1u, true}, std::pair{4u, false}, std::pair{4u, true}}) {
    auto cfg = base_config(Standard::kV3_0, engines, kC9Cases, 909);
    cfg.lanes = lanes;
    cfg.parallel = parallel;
    cfg.out_dir = (root / std::to_string(run++)).string();
    auto out = campaign::run_campaign(cfg);
    campaign::write_outputs(cfg, out);
    files.push_back(slurp(std::filesystem::path(cfg.out_dir) / "discrepancies.jsonl"));
    records = out.records.size();
  }
  std::filesystem::remove_all(root);
  const bool same_serial = files[0] == files[1];
  const bool same_lanes = files[2] == files[3];
  report(9, same_serial && same_lanes && records > 0, "byte-identical discrepancies.jsonl for identical config and seed",
         std::to_string(records) + " records; repeat run " + (same_serial ? "identical" : "DIFFERS") +
             "; 4 lanes serial vs parallel " + (same_lanes ? "identical" : "DIFFERS"));
}

void criterion_10() {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.0f cases/s", c10_throughput);
  report(10, c10_throughput >= kC10MinThroughput, "throughput >= 50 cases/s with two builtin engines", buf,
         /*warn_only=*/true);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, "aborted", e.what(), i + 1 == 10);
    }
    std::fprintf(stderr, "  criterion %zu took %.1f s\n", i + 1, seconds_since(t0));
  }
  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
