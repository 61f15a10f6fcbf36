#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "xpathdiff/docgen/doc_gen.h"
#include "xpathdiff/gen/query_gen.h"
#include "xpathdiff/harness/harness.h"

namespace xpathdiff::campaign {

struct CampaignConfig {
  std::vector<harness::EngineSpec> engines;
  docgen::DocGenConfig doc_gen;
  gen::GenConfig query_gen;
  std::uint64_t seed = 1;
  /// Case budget; without one the campaign runs until `duration_s`.
  std::optional<std::uint64_t> cases;
  std::optional<double> duration_s;
  /// Empty: nothing is written.
  std::string out_dir;
  std::set<std::string> suppress;
  unsigned lanes = 1;
  /// OpenMP lanes; false runs the same lanes one after another.
  bool parallel = true;
  /// Finish the in-flight document when the time budget expires.
  bool drain = false;
  /// Run the handshake case before generating anything.
  bool handshake = true;

  /// Throws harness::ConfigError or std::invalid_argument.
  void validate() const;
};

/// Keys mirror the fields; engines are full EngineSpec objects. Missing keys
/// keep their defaults.
CampaignConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CampaignConfig& cfg);

struct EngineCounters {
  std::size_t errors = 0;
  std::size_t timeouts = 0;
};

struct CampaignReport {
  std::uint64_t seed = 0;
  gen::Mode mode = gen::Mode::kTargeted;
  bool rectify = true;
  xpath::Standard standard = xpath::Standard::kV3_0;
  std::size_t cases = 0;
  std::size_t documents = 0;
  std::size_t discrepancies = 0;
  std::size_t suppressed = 0;
  std::size_t logic = 0;
  std::size_t error = 0;
  std::size_t nonempty = 0;
  std::size_t generation_failures = 0;
  std::set<std::string> fingerprints;
  std::map<std::string, EngineCounters> engines;
  double elapsed_s = 0;

  double nonempty_rate() const { return cases ? static_cast<double>(nonempty) / static_cast<double>(cases) : 0.0; }
  double throughput() const { return elapsed_s > 0 ? static_cast<double>(cases) / elapsed_s : 0.0; }
};

nlohmann::json to_json(const CampaignReport& r);
CampaignReport report_from_json(const nlohmann::json& j);

/// "targeted+rectify", "targeted", "untargeted+rectify" or "untargeted".
std::string mode_label(gen::Mode mode, bool rectify);

struct CampaignOutput {
  CampaignReport report;
  /// discrepancies.jsonl lines in (lane, sequence) order, without newlines.
  std::vector<std::string> records;
};

/// Document `d` belongs to lane `d % lanes`; its queries use seeds derived
/// from (seed, d, q) only, so any case can be regenerated on its own.
CampaignOutput run_campaign(const CampaignConfig& cfg);

/// Writes discrepancies.jsonl, report.json and config.json into cfg.out_dir.
void write_outputs(const CampaignConfig& cfg, const CampaignOutput& out);

/// `<T id="1"/>` with `/T` must give [1] on every engine. Throws
/// harness::ConfigError naming the first engine that does not.
void handshake(const std::vector<harness::EngineSpec>& engines);

/// The case at (doc, query), exactly as run_campaign produced it. Throws
/// std::runtime_error if the generator fails there.
harness::TestCase regenerate_case(const CampaignConfig& cfg, std::uint64_t doc, std::uint64_t query);

struct ReplayResult {
  harness::Results results;
  std::optional<harness::Discrepancy> discrepancy;
};

/// Runs the configured engines that the record names. Throws
/// harness::ConfigError listing record engines missing from `engines`.
ReplayResult replay(const nlohmann::json& record, const std::vector<harness::EngineSpec>& engines,
                    const std::optional<CampaignConfig>& cfg = std::nullopt);

struct StatsRow {
  std::string label;
  std::size_t runs = 0;
  std::size_t cases = 0;
  std::size_t discrepancies = 0;
  std::size_t unique = 0;
  std::size_t nonempty = 0;
  double nonempty_rate() const { return cases ? static_cast<double>(nonempty) / static_cast<double>(cases) : 0.0; }
};

/// Aggregates reports per mode label, in label order.
std::vector<StatsRow> stats(const std::vector<CampaignReport>& reports);

}  // namespace xpathdiff::campaign
