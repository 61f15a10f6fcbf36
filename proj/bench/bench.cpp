// Campaign lanes serial vs OpenMP, and strategy A vs B on generated cases.
#include <benchmark/benchmark.h>

#include <memory>
#include <vector>

#include "xpathdiff/campaign/campaign.h"
#include "xpathdiff/docgen/doc_gen.h"
#include "xpathdiff/eval/batch_evaluator.h"
#include "xpathdiff/eval/evaluator.h"
#include "xpathdiff/gen/query_gen.h"

using namespace xpathdiff;

namespace {

campaign::CampaignConfig lanes_config(unsigned lanes, bool parallel) {
  campaign::CampaignConfig cfg;
  cfg.query_gen.standard = xpath::Standard::kV3_0;
  cfg.query_gen.queries_per_doc = 50;
  for (const char* e : {"builtin_a", "builtin_b"}) cfg.engines.push_back(harness::engine_from_token(e, cfg.query_gen.standard));
  cfg.cases = 2000;
  cfg.lanes = lanes;
  cfg.parallel = parallel;
  cfg.handshake = false;
  return cfg;
}

void BM_CampaignLanes(benchmark::State& state) {
  auto cfg = lanes_config(static_cast<unsigned>(state.range(0)), state.range(1) != 0);
  std::size_t cases = 0;
  for (auto _ : state) {
    auto out = campaign::run_campaign(cfg);
    cases += out.report.cases;
    benchmark::DoNotOptimize(out.records);
  }
  state.counters["cases/s"] = benchmark::Counter(static_cast<double>(cases), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_CampaignLanes)
    ->ArgNames({"lanes", "parallel"})
    ->Args({1, 0})
    ->Args({4, 0})
    ->Args({4, 1})
    ->Unit(benchmark::kMillisecond)
    ->UseRealTime();

struct Corpus {
  std::vector<std::shared_ptr<xml::XmlDocument>> docs;
  std::vector<std::pair<std::size_t, xpath::XPathExpr>> queries;
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    gen::GenConfig cfg;
    cfg.standard = xpath::Standard::kV3_0;
    for (std::uint64_t d = 0; d < 20; ++d) {
      Rng rng(derive_seed({42, d}));
      out.docs.push_back(std::make_shared<xml::XmlDocument>(docgen::generate_document(rng, {})));
      for (int q = 0; q < 50; ++q) out.queries.emplace_back(d, gen::generate_query(rng, *out.docs.back(), cfg).expr);
    }
    return out;
  }();
  return c;
}

template <auto Evaluate>
void BM_Strategy(benchmark::State& state) {
  const Corpus& c = corpus();
  for (auto _ : state) {
    for (const auto& [d, q] : c.queries) benchmark::DoNotOptimize(Evaluate(*c.docs[d], q));
  }
  state.counters["queries/s"] = benchmark::Counter(static_cast<double>(state.iterations() * c.queries.size()),
                                                   benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Strategy<eval::evaluate>)->Name("BM_StrategyA")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Strategy<eval::evaluate_strategy_b>)->Name("BM_StrategyB")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
