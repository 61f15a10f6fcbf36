#include "xpathdiff/campaign/campaign.h"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "xpathdiff/eval/evaluator.h"
#include "xpathdiff/util/rng.h"
#include "xpathdiff/xml/serialize.h"
#include "xpathdiff/xpath/render.h"

namespace xpathdiff::campaign {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

json range_json(docgen::IntRange r) { return json::array({r.lo, r.hi}); }

docgen::IntRange range_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("range must be [lo, hi]");
  return {j[0].get<std::int64_t>(), j[1].get<std::int64_t>()};
}

xpath::Standard standard_from(const json& j) {
  auto s = xpath::standard_from_name(j.get<std::string>());
  if (!s) throw harness::ConfigError("unknown standard '" + j.get<std::string>() + "'");
  return *s;
}

struct LaneResult {
  CampaignReport counts;
  std::vector<std::string> records;
};

void add_counts(CampaignReport& into, const CampaignReport& from) {
  into.cases += from.cases;
  into.documents += from.documents;
  into.discrepancies += from.discrepancies;
  into.suppressed += from.suppressed;
  into.logic += from.logic;
  into.error += from.error;
  into.nonempty += from.nonempty;
  into.generation_failures += from.generation_failures;
  into.fingerprints.insert(from.fingerprints.begin(), from.fingerprints.end());
  for (const auto& [name, c] : from.engines) {
    into.engines[name].errors += c.errors;
    into.engines[name].timeouts += c.timeouts;
  }
}

/// Cases of document `d` under a case budget; 0 past the end.
std::uint64_t budget_cases(const CampaignConfig& cfg, std::uint64_t d) {
  const std::uint64_t per_doc = cfg.query_gen.queries_per_doc;
  const std::uint64_t start = d * per_doc;
  if (start >= *cfg.cases) return 0;
  return std::min(per_doc, *cfg.cases - start);
}

LaneResult run_lane(const CampaignConfig& cfg, unsigned lane, Clock::time_point deadline) {
  LaneResult out;
  const bool timed = !cfg.cases.has_value();
  const harness::EngineSpec* designated = nullptr;
  for (const harness::EngineSpec& e : cfg.engines) {
    if (e.kind == harness::EngineKind::kBuiltinA) {
      designated = &e;
      break;
    }
  }
  for (const harness::EngineSpec& e : cfg.engines) out.counts.engines[e.name];

  for (std::uint64_t d = lane;; d += cfg.lanes) {
    std::uint64_t n = timed ? cfg.query_gen.queries_per_doc : budget_cases(cfg, d);
    if (n == 0) break;
    if (timed && Clock::now() >= deadline) break;
    Rng doc_rng(derive_seed({cfg.seed, d}));
    auto doc = std::make_shared<const xml::XmlDocument>(docgen::generate_document(doc_rng, cfg.doc_gen));
    const std::string doc_text = xml::serialize(*doc);
    ++out.counts.documents;
    for (std::uint64_t q = 0; q < n; ++q) {
      if (timed && !cfg.drain && Clock::now() >= deadline) break;
      Rng query_rng(derive_seed({cfg.seed, d, q}));
      gen::GeneratedQuery g;
      try {
        g = gen::generate_query(query_rng, *doc, cfg.query_gen);
      } catch (const std::exception&) {
        ++out.counts.generation_failures;
        continue;
      }
      harness::TestCase c;
      c.doc_text = doc_text;
      c.doc = doc;
      c.query_text = xpath::render(g.expr);
      c.standard = cfg.query_gen.standard;
      c.provenance = harness::Provenance{cfg.seed, d, q, lane};
      c.query = std::move(g.expr);

      harness::Results results;
      for (const harness::EngineSpec& e : cfg.engines) {
        harness::EngineResult r = harness::run_engine(e, c);
        if (std::holds_alternative<harness::EngineError>(r.outcome)) ++out.counts.engines[e.name].errors;
        if (std::holds_alternative<harness::Timeout>(r.outcome)) ++out.counts.engines[e.name].timeouts;
        results.emplace(e.name, std::move(r));
      }
      ++out.counts.cases;
      if (designated) {
        const auto* nodes = std::get_if<harness::NodeList>(&results.at(designated->name).outcome);
        if (nodes && !nodes->ids.empty()) ++out.counts.nonempty;
      } else {
        eval::EvalResult r = eval::evaluate(*doc, *c.query);
        if (r.ok() && !r.value.empty()) ++out.counts.nonempty;
      }
      auto disc = harness::compare(c, results);
      if (!disc) continue;
      if (cfg.suppress.contains(disc->fingerprint)) {
        ++out.counts.suppressed;
        continue;
      }
      ++out.counts.discrepancies;
      ++(disc->klass == harness::Klass::kLogic ? out.counts.logic : out.counts.error);
      out.counts.fingerprints.insert(disc->fingerprint);
      out.records.push_back(harness::to_json(*disc).dump());
    }
  }
  return out;
}

}  // namespace

void CampaignConfig::validate() const {
  harness::validate_engines(engines);
  for (const harness::EngineSpec& e : engines) {
    if (e.standard != query_gen.standard) {
      throw harness::ConfigError("engine '" + e.name + "' does not implement XPath " +
                                 std::string(xpath::standard_name(query_gen.standard)));
    }
  }
  doc_gen.validate();
  query_gen.validate();
  if (lanes == 0) throw std::invalid_argument("lanes must be positive");
  if (!cases && !duration_s) throw std::invalid_argument("a case budget or a duration is required");
  if (duration_s && *duration_s <= 0) throw std::invalid_argument("duration must be positive");
}

CampaignConfig config_from_json(const json& j) {
  CampaignConfig cfg;
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  if (j.contains("standard")) cfg.query_gen.standard = standard_from(j.at("standard"));
  cfg.seed = j.value("seed", cfg.seed);
  if (j.contains("cases")) cfg.cases = j.at("cases").get<std::uint64_t>();
  if (j.contains("duration_s")) cfg.duration_s = j.at("duration_s").get<double>();
  cfg.out_dir = j.value("out", cfg.out_dir);
  cfg.lanes = j.value("lanes", cfg.lanes);
  cfg.parallel = j.value("parallel", cfg.parallel);
  cfg.drain = j.value("drain", cfg.drain);
  cfg.handshake = j.value("handshake", cfg.handshake);
  if (j.contains("suppress")) {
    for (const json& f : j.at("suppress")) cfg.suppress.insert(f.get<std::string>());
  }
  if (j.contains("engines")) {
    for (const json& e : j.at("engines")) {
      cfg.engines.push_back(e.is_string() ? harness::engine_from_token(e.get<std::string>(), cfg.query_gen.standard)
                                          : harness::engine_from_json(e, cfg.query_gen.standard));
    }
  }
  if (j.contains("doc_gen")) {
    const json& d = j.at("doc_gen");
    if (d.contains("node_count")) cfg.doc_gen.node_count = range_from(d.at("node_count"));
    if (d.contains("attr_count")) cfg.doc_gen.attr_count = range_from(d.at("attr_count"));
    if (d.contains("string_length")) cfg.doc_gen.string_length = range_from(d.at("string_length"));
    if (d.contains("integer_range")) cfg.doc_gen.integer_range = range_from(d.at("integer_range"));
  }
  if (j.contains("query_gen")) {
    const json& q = j.at("query_gen");
    gen::GenConfig& g = cfg.query_gen;
    if (q.contains("sections")) {
      auto r = range_from(q.at("sections"));
      g.min_sections = static_cast<std::size_t>(r.lo);
      g.max_sections = static_cast<std::size_t>(r.hi);
    }
    if (q.contains("predicates")) {
      auto r = range_from(q.at("predicates"));
      g.min_predicates = static_cast<std::size_t>(r.lo);
      g.max_predicates = static_cast<std::size_t>(r.hi);
    }
    g.max_subjects = q.value("max_subjects", g.max_subjects);
    g.max_depth = q.value("max_depth", g.max_depth);
    g.queries_per_doc = q.value("queries_per_doc", g.queries_per_doc);
    if (q.contains("mode")) {
      auto m = gen::mode_from_name(q.at("mode").get<std::string>());
      if (!m) throw std::invalid_argument("unknown mode");
      g.mode = *m;
    }
    g.rectify = q.value("rectify", g.rectify);
    g.wildcard_prob = q.value("wildcard_prob", g.wildcard_prob);
    g.equal_operand_prob = q.value("equal_operand_prob", g.equal_operand_prob);
    g.not_wrap_prob = q.value("not_wrap_prob", g.not_wrap_prob);
    g.positional_prob = q.value("positional_prob", g.positional_prob);
    g.subject_kind_prob = q.value("subject_kind_prob", g.subject_kind_prob);
    g.enable_has_children = q.value("enable_has_children", g.enable_has_children);
    g.enable_child_paths = q.value("enable_child_paths", g.enable_child_paths);
    g.predicate_attempts = q.value("predicate_attempts", g.predicate_attempts);
  }
  return cfg;
}

json to_json(const CampaignConfig& cfg) {
  const gen::GenConfig& g = cfg.query_gen;
  json engines = json::array();
  for (const harness::EngineSpec& e : cfg.engines) engines.push_back(harness::to_json(e));
  json j = {
      {"seed", cfg.seed},
      {"standard", xpath::standard_name(g.standard)},
      {"lanes", cfg.lanes},
      {"parallel", cfg.parallel},
      {"drain", cfg.drain},
      {"handshake", cfg.handshake},
      {"out", cfg.out_dir},
      {"suppress", cfg.suppress},
      {"engines", std::move(engines)},
      {"doc_gen",
       {{"node_count", range_json(cfg.doc_gen.node_count)},
        {"attr_count", range_json(cfg.doc_gen.attr_count)},
        {"string_length", range_json(cfg.doc_gen.string_length)},
        {"integer_range", range_json(cfg.doc_gen.integer_range)}}},
      {"query_gen",
       {{"sections", {g.min_sections, g.max_sections}},
        {"predicates", {g.min_predicates, g.max_predicates}},
        {"max_subjects", g.max_subjects},
        {"max_depth", g.max_depth},
        {"queries_per_doc", g.queries_per_doc},
        {"mode", gen::mode_name(g.mode)},
        {"rectify", g.rectify},
        {"wildcard_prob", g.wildcard_prob},
        {"equal_operand_prob", g.equal_operand_prob},
        {"not_wrap_prob", g.not_wrap_prob},
        {"positional_prob", g.positional_prob},
        {"subject_kind_prob", g.subject_kind_prob},
        {"enable_has_children", g.enable_has_children},
        {"enable_child_paths", g.enable_child_paths},
        {"predicate_attempts", g.predicate_attempts}}},
  };
  if (cfg.cases) j["cases"] = *cfg.cases;
  if (cfg.duration_s) j["duration_s"] = *cfg.duration_s;
  return j;
}

std::string mode_label(gen::Mode mode, bool rectify) {
  return std::string(gen::mode_name(mode)) + (rectify ? "+rectify" : "");
}

json to_json(const CampaignReport& r) {
  json engines = json::object();
  for (const auto& [name, c] : r.engines) engines[name] = {{"errors", c.errors}, {"timeouts", c.timeouts}};
  return {{"seed", r.seed},
          {"mode", gen::mode_name(r.mode)},
          {"rectify", r.rectify},
          {"label", mode_label(r.mode, r.rectify)},
          {"standard", xpath::standard_name(r.standard)},
          {"totals",
           {{"cases", r.cases},
            {"documents", r.documents},
            {"discrepancies", r.discrepancies},
            {"logic", r.logic},
            {"error", r.error},
            {"suppressed", r.suppressed},
            {"unique_fingerprints", r.fingerprints.size()},
            {"nonempty", r.nonempty},
            {"nonempty_rate", r.nonempty_rate()},
            {"generation_failures", r.generation_failures}}},
          {"fingerprints", r.fingerprints},
          {"engines", std::move(engines)},
          {"elapsed_s", r.elapsed_s},
          {"throughput", r.throughput()}};
}

CampaignReport report_from_json(const json& j) {
  CampaignReport r;
  r.seed = j.value("seed", std::uint64_t{0});
  auto m = gen::mode_from_name(j.value("mode", "targeted"));
  if (!m) throw std::invalid_argument("report has an unknown mode");
  r.mode = *m;
  r.rectify = j.value("rectify", true);
  if (j.contains("standard")) r.standard = standard_from(j.at("standard"));
  const json& t = j.at("totals");
  r.cases = t.value("cases", std::size_t{0});
  r.documents = t.value("documents", std::size_t{0});
  r.discrepancies = t.value("discrepancies", std::size_t{0});
  r.logic = t.value("logic", std::size_t{0});
  r.error = t.value("error", std::size_t{0});
  r.suppressed = t.value("suppressed", std::size_t{0});
  r.nonempty = t.value("nonempty", std::size_t{0});
  r.generation_failures = t.value("generation_failures", std::size_t{0});
  if (j.contains("fingerprints")) r.fingerprints = j.at("fingerprints").get<std::set<std::string>>();
  if (j.contains("engines")) {
    for (const auto& [name, c] : j.at("engines").items()) {
      r.engines[name] = {c.value("errors", std::size_t{0}), c.value("timeouts", std::size_t{0})};
    }
  }
  r.elapsed_s = j.value("elapsed_s", 0.0);
  return r;
}

void handshake(const std::vector<harness::EngineSpec>& engines) {
  auto doc = std::make_shared<const xml::XmlDocument>(xml::parse(R"(<T id="1"/>)"));
  for (const harness::EngineSpec& e : engines) {
    xpath::XPathExpr expr;
    expr.standard = e.standard;
    expr.sections.push_back({{xpath::StepKind::kSlash, xml::Axis::kChild, "T"}, {}});
    harness::TestCase c = harness::make_case(doc, expr);
    harness::EngineResult r = harness::run_engine(e, c);
    const auto* nodes = std::get_if<harness::NodeList>(&r.outcome);
    if (!nodes || nodes->ids != std::vector<std::uint32_t>{1}) {
      throw harness::ConfigError("engine '" + e.name + "' failed the handshake (<T id=\"1\"/>, /T): got " +
                                 harness::to_json(r.outcome).dump());
    }
  }
}

CampaignOutput run_campaign(const CampaignConfig& cfg) {
  cfg.validate();
  if (cfg.handshake) handshake(cfg.engines);
  const auto start = Clock::now();
  const auto deadline =
      cfg.duration_s ? start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*cfg.duration_s))
                     : Clock::time_point::max();
  std::vector<LaneResult> lanes(cfg.lanes);
  if (cfg.parallel && cfg.lanes > 1) {
#pragma omp parallel for schedule(static, 1) num_threads(static_cast<int>(cfg.lanes))
    for (int lane = 0; lane < static_cast<int>(cfg.lanes); ++lane) {
      lanes[static_cast<std::size_t>(lane)] = run_lane(cfg, static_cast<unsigned>(lane), deadline);
    }
  } else {
    for (unsigned lane = 0; lane < cfg.lanes; ++lane) lanes[lane] = run_lane(cfg, lane, deadline);
  }

  CampaignOutput out;
  out.report.seed = cfg.seed;
  out.report.mode = cfg.query_gen.mode;
  out.report.rectify = cfg.query_gen.rectify;
  out.report.standard = cfg.query_gen.standard;
  for (LaneResult& l : lanes) {
    add_counts(out.report, l.counts);
    for (std::string& r : l.records) out.records.push_back(std::move(r));
  }
  out.report.elapsed_s = std::chrono::duration<double>(Clock::now() - start).count();
  return out;
}

void write_outputs(const CampaignConfig& cfg, const CampaignOutput& out) {
  if (cfg.out_dir.empty()) return;
  std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "discrepancies.jsonl", std::ios::binary | std::ios::trunc);
    for (const std::string& r : out.records) f << r << '\n';
    if (!f) throw std::runtime_error("cannot write " + (dir / "discrepancies.jsonl").string());
  }
  {
    std::ofstream f(dir / "report.json", std::ios::binary | std::ios::trunc);
    f << to_json(out.report).dump(2) << '\n';
  }
  {
    std::ofstream f(dir / "config.json", std::ios::binary | std::ios::trunc);
    f << to_json(cfg).dump(2) << '\n';
  }
}

harness::TestCase regenerate_case(const CampaignConfig& cfg, std::uint64_t d, std::uint64_t q) {
  Rng doc_rng(derive_seed({cfg.seed, d}));
  auto doc = std::make_shared<const xml::XmlDocument>(docgen::generate_document(doc_rng, cfg.doc_gen));
  Rng query_rng(derive_seed({cfg.seed, d, q}));
  gen::GeneratedQuery g;
  try {
    g = gen::generate_query(query_rng, *doc, cfg.query_gen);
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("generation failed at this case: ") + e.what());
  }
  const unsigned lane = static_cast<unsigned>(d % cfg.lanes);
  return harness::make_case(doc, std::move(g.expr), harness::Provenance{cfg.seed, d, q, lane});
}

ReplayResult replay(const json& record, const std::vector<harness::EngineSpec>& engines,
                    const std::optional<CampaignConfig>& cfg) {
  const json& cj = record.contains("case") ? record.at("case") : record;
  harness::TestCase c;
  if (cj.contains("doc")) {
    c = harness::case_from_json(cj);
  } else {
    if (!cfg) throw harness::ConfigError("record has no inline case; a campaign config is needed to regenerate it");
    const json& p = cj.at("provenance");
    CampaignConfig at_seed = *cfg;
    at_seed.seed = p.at("seed").get<std::uint64_t>();
    c = regenerate_case(at_seed, p.at("doc").get<std::uint64_t>(), p.at("query").get<std::uint64_t>());
  }

  std::vector<const harness::EngineSpec*> chosen;
  if (record.contains("results")) {
    std::vector<std::string> missing;
    for (const auto& [name, _] : record.at("results").items()) {
      auto it = std::find_if(engines.begin(), engines.end(), [&](const auto& e) { return e.name == name; });
      if (it == engines.end()) {
        missing.push_back(name);
      } else {
        chosen.push_back(&*it);
      }
    }
    if (!missing.empty()) {
      std::string list;
      for (const std::string& m : missing) list += (list.empty() ? "" : ", ") + m;
      throw harness::ConfigError("engines named by the record are not configured: " + list);
    }
  } else {
    for (const harness::EngineSpec& e : engines) chosen.push_back(&e);
  }

  ReplayResult out;
  for (const harness::EngineSpec* e : chosen) {
    if (e->standard != c.standard) {
      throw harness::ConfigError("engine '" + e->name + "' does not implement XPath " +
                                 std::string(xpath::standard_name(c.standard)));
    }
    out.results.emplace(e->name, harness::run_engine(*e, c));
  }
  if (out.results.size() >= 2) out.discrepancy = harness::compare(c, out.results);
  return out;
}

std::vector<StatsRow> stats(const std::vector<CampaignReport>& reports) {
  std::map<std::string, StatsRow> rows;
  std::map<std::string, std::set<std::string>> prints;
  for (const CampaignReport& r : reports) {
    const std::string label = mode_label(r.mode, r.rectify);
    StatsRow& row = rows[label];
    row.label = label;
    ++row.runs;
    row.cases += r.cases;
    row.discrepancies += r.discrepancies;
    row.nonempty += r.nonempty;
    prints[label].insert(r.fingerprints.begin(), r.fingerprints.end());
  }
  std::vector<StatsRow> out;
  for (auto& [label, row] : rows) {
    row.unique = prints[label].size();
    out.push_back(row);
  }
  return out;
}

}  // namespace xpathdiff::campaign
