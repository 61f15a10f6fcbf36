#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xpathdiff/campaign/campaign.h"
#include "xpathdiff/reduce/reducer.h"
#include "xpathdiff/util/rng.h"
#include "xpathdiff/xml/serialize.h"
#include "xpathdiff/xpath/ast_json.h"
#include "xpathdiff/xpath/render.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace xpathdiff;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> cases;
  std::optional<double> duration;
  std::string mode;
  bool rectify = false;
  bool no_rectify = false;
  std::string standard;
  std::string engines;
  std::string out;
  std::vector<std::string> suppress;
  std::optional<unsigned> lanes;
  bool serial = false;
  bool drain = false;
  bool no_handshake = false;
};

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  return json::parse(f);
}

std::vector<json> read_records(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  std::vector<json> out;
  // A single JSON document (fixture) or JSON lines (campaign records).
  try {
    json whole = json::parse(text);
    if (whole.is_array()) {
      for (json& j : whole) out.push_back(std::move(j));
    } else {
      out.push_back(std::move(whole));
    }
    return out;
  } catch (const json::parse_error&) {
  }
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(json::parse(line));
  }
  return out;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

campaign::CampaignConfig build_config(const CommonFlags& f) {
  campaign::CampaignConfig cfg;
  if (!f.config.empty()) cfg = campaign::config_from_json(read_json_file(f.config));
  if (!f.standard.empty()) {
    auto s = xpath::standard_from_name(f.standard);
    if (!s) throw harness::ConfigError("unknown standard '" + f.standard + "'");
    cfg.query_gen.standard = *s;
    for (harness::EngineSpec& e : cfg.engines) {
      if (e.kind != harness::EngineKind::kSubprocess) e.standard = *s;
    }
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.cases) {
    cfg.cases = *f.cases;
    if (!f.duration) cfg.duration_s.reset();
  }
  if (f.duration) {
    cfg.duration_s = *f.duration;
    if (!f.cases) cfg.cases.reset();
  }
  if (!f.mode.empty()) {
    auto m = gen::mode_from_name(f.mode);
    if (!m) throw harness::ConfigError("unknown mode '" + f.mode + "'");
    cfg.query_gen.mode = *m;
  }
  if (f.rectify) cfg.query_gen.rectify = true;
  if (f.no_rectify) cfg.query_gen.rectify = false;
  if (!f.engines.empty()) {
    cfg.engines.clear();
    for (const std::string& t : split_list(f.engines)) {
      cfg.engines.push_back(harness::engine_from_token(t, cfg.query_gen.standard));
    }
  }
  if (!f.out.empty()) cfg.out_dir = f.out;
  for (const std::string& s : f.suppress) {
    if (fs::is_regular_file(s)) {
      std::ifstream in(s);
      for (std::string line; std::getline(in, line);) {
        if (!line.empty()) cfg.suppress.insert(line);
      }
    } else {
      cfg.suppress.insert(s);
    }
  }
  if (f.lanes) cfg.lanes = *f.lanes;
  if (f.serial) cfg.parallel = false;
  if (f.drain) cfg.drain = true;
  if (f.no_handshake) cfg.handshake = false;
  return cfg;
}

void add_common(CLI::App* app, CommonFlags& f, bool run_flags) {
  app->add_option("--config", f.config, "Campaign config JSON");
  app->add_option("--seed", f.seed, "Campaign seed");
  app->add_option("--cases", f.cases, "Case budget");
  app->add_option("--mode", f.mode, "targeted or untargeted");
  app->add_flag("--rectify", f.rectify, "Rectify predicates");
  app->add_flag("--no-rectify", f.no_rectify, "Do not rectify predicates");
  app->add_option("--standard", f.standard, "XPath standard: 1.0 or 3.0");
  if (!run_flags) return;
  app->add_option("--duration", f.duration, "Time budget in seconds");
  app->add_option("--engines", f.engines, "Comma list: builtin_a, builtin_b, mutant:<id>");
  app->add_option("--suppress", f.suppress, "Fingerprint, or file with one fingerprint per line");
  app->add_option("--lanes", f.lanes, "Worker lanes");
  app->add_flag("--serial", f.serial, "Run lanes one after another");
  app->add_flag("--drain", f.drain, "Finish the in-flight document at the time limit");
  app->add_flag("--no-handshake", f.no_handshake, "Skip the startup handshake");
}

std::string describe(const harness::Outcome& o) {
  if (const auto* n = std::get_if<harness::NodeList>(&o)) {
    std::string s = "[";
    for (std::size_t i = 0; i < n->ids.size(); ++i) s += (i ? "," : "") + std::to_string(n->ids[i]);
    return s + "]";
  }
  if (const auto* e = std::get_if<harness::EngineError>(&o)) return "ERR " + e->klass;
  return "TIMEOUT";
}

int cmd_generate(const CommonFlags& f) {
  campaign::CampaignConfig cfg = build_config(f);
  cfg.doc_gen.validate();
  cfg.query_gen.validate();
  const std::uint64_t total = cfg.cases.value_or(cfg.query_gen.queries_per_doc);
  std::ofstream file;
  if (!f.out.empty()) {
    file.open(f.out, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + f.out);
  }
  std::ostream& out = f.out.empty() ? std::cout : file;
  const std::uint64_t per_doc = cfg.query_gen.queries_per_doc;
  for (std::uint64_t d = 0; d * per_doc < total; ++d) {
    Rng doc_rng(derive_seed({cfg.seed, d}));
    xml::XmlDocument doc = docgen::generate_document(doc_rng, cfg.doc_gen);
    json queries = json::array();
    for (std::uint64_t q = 0; q < per_doc && d * per_doc + q < total; ++q) {
      Rng query_rng(derive_seed({cfg.seed, d, q}));
      try {
        gen::GeneratedQuery g = gen::generate_query(query_rng, doc, cfg.query_gen);
        queries.push_back({{"query_index", q}, {"query", xpath::render(g.expr)}, {"query_ast", xpath::to_json(g.expr)}});
      } catch (const std::exception& e) {
        queries.push_back({{"query_index", q}, {"generation_error", e.what()}});
      }
    }
    out << json{{"seed", cfg.seed},
                {"doc_index", d},
                {"standard", xpath::standard_name(cfg.query_gen.standard)},
                {"doc", xml::serialize(doc)},
                {"queries", std::move(queries)}}
               .dump()
        << '\n';
  }
  return 0;
}

int cmd_run(const CommonFlags& f) {
  campaign::CampaignConfig cfg = build_config(f);
  if (cfg.engines.empty()) {
    cfg.engines.push_back(harness::engine_from_token("builtin_a", cfg.query_gen.standard));
    cfg.engines.push_back(harness::engine_from_token("builtin_b", cfg.query_gen.standard));
  }
  if (!cfg.cases && !cfg.duration_s) cfg.cases = 1000;
  if (cfg.out_dir.empty()) cfg.out_dir = "xpathdiff-out";
  campaign::CampaignOutput out = campaign::run_campaign(cfg);
  campaign::write_outputs(cfg, out);
  const campaign::CampaignReport& r = out.report;
  std::printf("cases %zu  documents %zu  discrepancies %zu (logic %zu, error %zu, suppressed %zu)  unique %zu\n",
              r.cases, r.documents, r.discrepancies, r.logic, r.error, r.suppressed, r.fingerprints.size());
  std::printf("nonempty %.2f%%  generation failures %zu  %.1f cases/s\n", 100.0 * r.nonempty_rate(),
              r.generation_failures, r.throughput());
  for (const auto& [name, c] : r.engines) {
    std::printf("  %-32s errors %zu  timeouts %zu\n", name.c_str(), c.errors, c.timeouts);
  }
  std::printf("output: %s\n", cfg.out_dir.c_str());
  return 0;
}

struct ReplayFlags {
  std::string file;
  std::optional<std::size_t> record;
  std::string out;
};

std::vector<harness::EngineSpec> replay_engines(const CommonFlags& f, const json& record,
                                                std::optional<campaign::CampaignConfig>& cfg_out) {
  std::optional<xpath::Standard> standard;
  const json& cj = record.contains("case") ? record.at("case") : record;
  if (cj.contains("standard")) standard = xpath::standard_from_name(cj.at("standard").get<std::string>());
  CommonFlags g = f;
  if (g.standard.empty() && standard) g.standard = std::string(xpath::standard_name(*standard));
  campaign::CampaignConfig cfg = build_config(g);
  std::vector<harness::EngineSpec> engines = cfg.engines;
  if (engines.empty()) {
    // Default to the builtin engines the record mentions, or both strategies.
    std::vector<std::string> names;
    if (record.contains("results")) {
      for (const auto& [name, _] : record.at("results").items()) names.push_back(name);
    } else {
      names = {"builtin_a", "builtin_b"};
    }
    for (const std::string& n : names) {
      try {
        engines.push_back(harness::engine_from_token(n, cfg.query_gen.standard));
      } catch (const harness::ConfigError&) {
      }
    }
  }
  if (!f.config.empty()) cfg_out = cfg;
  return engines;
}

std::vector<json> select_records(const ReplayFlags& r) {
  std::vector<json> records = read_records(r.file);
  if (r.record) {
    if (*r.record >= records.size()) throw std::runtime_error("record index out of range");
    return {records[*r.record]};
  }
  return records;
}

int cmd_replay(const CommonFlags& f, const ReplayFlags& rf) {
  int status = 0;
  std::size_t index = 0;
  for (const json& record : select_records(rf)) {
    std::optional<campaign::CampaignConfig> cfg;
    std::vector<harness::EngineSpec> engines = replay_engines(f, record, cfg);
    campaign::ReplayResult res = campaign::replay(record, engines, cfg);
    std::string title = record.value("name", "record " + std::to_string(rf.record.value_or(index)));
    std::printf("%s\n", title.c_str());
    for (const auto& [name, r] : res.results) {
      std::printf("  %-32s %s\n", name.c_str(), describe(r.outcome).c_str());
    }
    if (res.discrepancy) {
      std::printf("  discrepancy %s fingerprint %s", std::string(harness::klass_name(res.discrepancy->klass)).c_str(),
                  res.discrepancy->fingerprint.c_str());
      if (record.contains("fingerprint")) {
        const bool same = record.value("klass", "") == harness::klass_name(res.discrepancy->klass) &&
                          record.value("fingerprint", "") == res.discrepancy->fingerprint;
        std::printf(" (%s)", same ? "persists" : "changed");
      }
      std::printf("\n");
    } else {
      std::printf("  no discrepancy%s\n", record.contains("fingerprint") ? " (no longer reproduces)" : "");
    }
    if (record.contains("expected")) {
      harness::Outcome expected = harness::outcome_from_json(record.at("expected"));
      bool ok = true;
      for (const auto& [name, r] : res.results) ok = ok && r.outcome == expected;
      std::printf("  expected %s: %s\n", describe(expected).c_str(), ok ? "PASS" : "FAIL");
      if (!ok) status = 1;
    }
    ++index;
  }
  return status;
}

int cmd_reduce(const CommonFlags& f, const ReplayFlags& rf) {
  std::ofstream file;
  if (!rf.out.empty()) {
    file.open(rf.out, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + rf.out);
  }
  std::ostream& out = rf.out.empty() ? std::cout : file;
  for (const json& record : select_records(rf)) {
    std::optional<campaign::CampaignConfig> cfg;
    std::vector<harness::EngineSpec> engines = replay_engines(f, record, cfg);
    campaign::ReplayResult res = campaign::replay(record, engines, cfg);
    if (!res.discrepancy) {
      std::cerr << "record does not reproduce; skipped\n";
      continue;
    }
    auto find = [&](const std::string& name) {
      for (const harness::EngineSpec& e : engines) {
        if (e.name == name) return e;
      }
      throw harness::ConfigError("engine '" + name + "' is not configured");
    };
    const harness::Discrepancy& d = *res.discrepancy;
    reduce::ReduceStats st;
    harness::TestCase small =
        reduce::reduce(d.test, reduce::same_discrepancy(find(d.pair.first), find(d.pair.second), d.klass), &st);
    harness::Results results;
    for (const auto& [name, _] : d.results) results.emplace(name, harness::run_engine(find(name), small));
    auto reduced = harness::compare(small, results);
    if (!reduced) throw std::logic_error("reduced case lost its discrepancy");
    json j = harness::to_json(*reduced);
    j["reduction"] = {{"attempts", st.attempts}, {"accepted", st.accepted}, {"passes", st.passes}};
    out << j.dump() << '\n';
    std::cerr << "reduced to " << small.query_text << " on " << small.doc_text << "\n";
  }
  return 0;
}

int cmd_stats(const std::vector<std::string>& paths) {
  std::vector<campaign::CampaignReport> reports;
  for (const std::string& p : paths) {
    fs::path file = fs::is_directory(p) ? fs::path(p) / "report.json" : fs::path(p);
    reports.push_back(campaign::report_from_json(read_json_file(file.string())));
  }
  std::printf("%-22s %5s %10s %12s %8s %10s\n", "mode", "runs", "cases", "differences", "unique", "nonempty");
  for (const campaign::StatsRow& row : campaign::stats(reports)) {
    std::printf("%-22s %5zu %10zu %12zu %8zu %9.2f%%\n", row.label.c_str(), row.runs, row.cases, row.discrepancies,
                row.unique, 100.0 * row.nonempty_rate());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differential testing for XPath engines"};
  app.require_subcommand(1);

  CommonFlags gen_flags;
  auto* generate = app.add_subcommand("generate", "Emit documents and queries without running engines");
  add_common(generate, gen_flags, false);
  generate->add_option("--out", gen_flags.out, "Output JSONL file (default stdout)");

  CommonFlags run_flags;
  auto* run = app.add_subcommand("run", "Run a campaign");
  add_common(run, run_flags, true);
  run->add_option("--out", run_flags.out, "Output directory");

  CommonFlags replay_flags;
  ReplayFlags replay_file;
  auto* replay = app.add_subcommand("replay", "Re-execute recorded cases or regression fixtures");
  add_common(replay, replay_flags, true);
  replay->add_option("file", replay_file.file, "discrepancies.jsonl or fixture JSON")->required();
  replay->add_option("--record", replay_file.record, "Zero-based record index");

  CommonFlags reduce_flags;
  ReplayFlags reduce_file;
  auto* reduce = app.add_subcommand("reduce", "Minimize recorded discrepancies");
  add_common(reduce, reduce_flags, true);
  reduce->add_option("file", reduce_file.file, "discrepancies.jsonl")->required();
  reduce->add_option("--record", reduce_file.record, "Zero-based record index");
  reduce->add_option("--out", reduce_file.out, "Output JSONL file (default stdout)");

  std::vector<std::string> stat_paths;
  auto* stat = app.add_subcommand("stats", "Summarize campaign reports per mode");
  stat->add_option("reports", stat_paths, "report.json files or campaign output directories");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*generate) return cmd_generate(gen_flags);
    if (*run) return cmd_run(run_flags);
    if (*replay) return cmd_replay(replay_flags, replay_file);
    if (*reduce) return cmd_reduce(reduce_flags, reduce_file);
    if (*stat) return cmd_stats(stat_paths);
  } catch (const harness::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
