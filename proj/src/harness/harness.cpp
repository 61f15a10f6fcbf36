#include "xpathdiff/harness/harness.h"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <regex>
#include <set>

#include "xpathdiff/eval/batch_evaluator.h"
#include "xpathdiff/eval/evaluator.h"
#include "xpathdiff/harness/subprocess.h"
#include "xpathdiff/util/hash.h"
#include "xpathdiff/xml/serialize.h"
#include "xpathdiff/xpath/ast_json.h"
#include "xpathdiff/xpath/catalog.h"
#include "xpathdiff/xpath/render.h"

namespace xpathdiff::harness {

using nlohmann::json;

namespace {

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

xpath::Standard standard_or_throw(std::string_view name) {
  auto s = xpath::standard_from_name(name);
  if (!s) throw ConfigError("unknown standard '" + std::string(name) + "'");
  return *s;
}

std::string substitute(const std::string& tmpl, const std::string& doc_path, const std::string& query) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size();) {
    if (tmpl.compare(i, 5, "{doc}") == 0) {
      out += shell_quote(doc_path);
      i += 5;
    } else if (tmpl.compare(i, 7, "{query}") == 0) {
      out += shell_quote(query);
      i += 7;
    } else {
      out += tmpl[i++];
    }
  }
  return out;
}

class TempFile {
 public:
  explicit TempFile(const std::string& contents) {
    const char* dir = std::getenv("TMPDIR");
    path_ = std::string(dir && *dir ? dir : "/tmp") + "/xpathdiff-XXXXXX.xml";
    int fd = ::mkstemps(path_.data(), 4);
    if (fd < 0) {
      path_.clear();
      return;
    }
    std::size_t done = 0;
    while (done < contents.size()) {
      ssize_t n = ::write(fd, contents.data() + done, contents.size() - done);
      if (n <= 0) break;
      done += static_cast<std::size_t>(n);
    }
    ::close(fd);
    ok_ = done == contents.size();
  }
  ~TempFile() {
    if (!path_.empty()) ::unlink(path_.c_str());
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  bool ok() const { return ok_; }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  bool ok_ = false;
};

Outcome run_builtin(const EngineSpec& spec, const TestCase& c) {
  if (!c.query) return EngineError{"no-ast"};
  std::shared_ptr<const xml::XmlDocument> doc = c.doc;
  if (!doc) {
    try {
      doc = std::make_shared<const xml::XmlDocument>(xml::parse(c.doc_text));
    } catch (const std::exception&) {
      return EngineError{"parse"};
    }
  }
  xpath::XPathExpr expr = *c.query;
  expr.standard = spec.standard;
  eval::EvalResult r;
  switch (spec.kind) {
    case EngineKind::kBuiltinA: r = eval::evaluate(*doc, expr); break;
    case EngineKind::kBuiltinB: r = eval::evaluate_strategy_b(*doc, expr); break;
    case EngineKind::kBuiltinMutant: r = eval::evaluate(*doc, eval::apply_mutation(*spec.mutation, expr)); break;
    case EngineKind::kSubprocess: break;
  }
  if (r.error) return EngineError{std::string(eval::error_class_name(r.error->klass()))};
  if (!eval::is_node_set(r.value)) return EngineError{"non-node-result"};
  NodeList out;
  for (xml::NodeId id : eval::element_ids(r.value)) out.ids.push_back(id.value);
  return out;
}

Outcome run_subprocess(const EngineSpec& spec, const TestCase& c) {
  TempFile file(c.doc_text);
  if (!file.ok()) return EngineError{"spawn"};
  CommandResult r = run_command(substitute(spec.command_template, file.path(), c.query_text), spec.timeout_ms);
  switch (r.status) {
    case CommandResult::Status::kSpawnFailed: return EngineError{"spawn"};
    case CommandResult::Status::kTimedOut: return Timeout{};
    case CommandResult::Status::kSignaled: return EngineError{"adapter"};
    case CommandResult::Status::kExited: break;
  }
  if (r.exit_code != 0) return EngineError{"adapter"};
  return parse_wire_output(r.out);
}

void collect_names(const xpath::ExprNode& n, std::vector<std::string>& out) {
  switch (n.kind) {
    case xpath::NodeKind::kCall:
    case xpath::NodeKind::kBinary:
    case xpath::NodeKind::kRange:
      out.emplace_back(xpath::entry_of(n)->name);
      break;
    case xpath::NodeKind::kUnary:
      out.emplace_back(n.op == xpath::Operator::kNegate ? "neg" : "not");
      break;
    default:
      break;
  }
  for (const xpath::ExprNode& c : n.children) collect_names(c, out);
}

}  // namespace

std::string_view engine_kind_name(EngineKind k) {
  switch (k) {
    case EngineKind::kBuiltinA: return "builtin_a";
    case EngineKind::kBuiltinB: return "builtin_b";
    case EngineKind::kBuiltinMutant: return "builtin_mutant";
    case EngineKind::kSubprocess: return "subprocess";
  }
  return "?";
}

std::optional<EngineKind> engine_kind_from_name(std::string_view name) {
  for (EngineKind k : {EngineKind::kBuiltinA, EngineKind::kBuiltinB, EngineKind::kBuiltinMutant,
                       EngineKind::kSubprocess}) {
    if (engine_kind_name(k) == name) return k;
  }
  return std::nullopt;
}

void validate(const EngineSpec& spec) {
  if (spec.name.empty()) throw ConfigError("engine name must not be empty");
  if (spec.timeout_ms <= 0) throw ConfigError("engine '" + spec.name + "': timeout must be positive");
  if (spec.kind == EngineKind::kBuiltinMutant && !spec.mutation) {
    throw ConfigError("engine '" + spec.name + "': mutant without mutation id");
  }
  if (spec.kind == EngineKind::kSubprocess) {
    if (count_occurrences(spec.command_template, "{doc}") != 1 ||
        count_occurrences(spec.command_template, "{query}") != 1) {
      throw ConfigError("engine '" + spec.name + "': command must contain {doc} and {query} exactly once");
    }
  }
}

void validate_engines(const std::vector<EngineSpec>& engines) {
  if (engines.size() < 2) throw ConfigError("at least two engines are required");
  std::set<std::string> names;
  for (const EngineSpec& e : engines) {
    validate(e);
    if (!names.insert(e.name).second) throw ConfigError("duplicate engine name '" + e.name + "'");
    if (e.standard != engines.front().standard) {
      throw ConfigError("engines '" + engines.front().name + "' and '" + e.name +
                        "' implement different XPath standards");
    }
  }
}

EngineSpec mutant_engine(std::string_view mutation_id, xpath::Standard standard) {
  auto m = eval::mutation_from_name(mutation_id);
  if (!m) throw ConfigError("unknown mutation '" + std::string(mutation_id) + "'");
  EngineSpec spec;
  spec.name = "mutant:" + std::string(mutation_id);
  spec.kind = EngineKind::kBuiltinMutant;
  spec.mutation = m;
  spec.standard = standard;
  return spec;
}

EngineSpec engine_from_token(std::string_view token, xpath::Standard standard) {
  if (token.starts_with("mutant:")) return mutant_engine(token.substr(7), standard);
  EngineSpec spec;
  spec.name = std::string(token);
  spec.standard = standard;
  if (token == "builtin_a") {
    spec.kind = EngineKind::kBuiltinA;
  } else if (token == "builtin_b") {
    spec.kind = EngineKind::kBuiltinB;
  } else {
    throw ConfigError("unknown engine '" + std::string(token) + "' (expected builtin_a, builtin_b or mutant:<id>)");
  }
  return spec;
}

json to_json(const EngineSpec& spec) {
  json j = {{"name", spec.name},
            {"kind", engine_kind_name(spec.kind)},
            {"standard", xpath::standard_name(spec.standard)}};
  if (spec.mutation) j["mutation"] = eval::mutation_name(*spec.mutation);
  if (spec.kind == EngineKind::kSubprocess) {
    j["command"] = spec.command_template;
    j["timeout_ms"] = spec.timeout_ms;
  }
  return j;
}

EngineSpec engine_from_json(const json& j, xpath::Standard standard) {
  if (!j.is_object()) throw ConfigError("engine entry must be an object");
  EngineSpec spec;
  auto kind = engine_kind_from_name(j.value("kind", ""));
  if (!kind) throw ConfigError("engine entry has an unknown kind");
  spec.kind = *kind;
  spec.standard = j.contains("standard") ? standard_or_throw(j.at("standard").get<std::string>()) : standard;
  if (spec.kind == EngineKind::kBuiltinMutant) {
    auto m = eval::mutation_from_name(j.value("mutation", ""));
    if (!m) throw ConfigError("engine entry has an unknown mutation");
    spec.mutation = m;
  }
  spec.command_template = j.value("command", "");
  spec.timeout_ms = j.value("timeout_ms", 10000);
  spec.name = j.value("name", std::string(engine_kind_name(spec.kind)));
  validate(spec);
  return spec;
}

std::string_view outcome_shape(const Outcome& o) {
  if (const auto* n = std::get_if<NodeList>(&o)) return n->ids.empty() ? "empty" : "nonempty";
  if (std::holds_alternative<EngineError>(o)) return "error";
  return "timeout";
}

json to_json(const Outcome& o) {
  if (const auto* n = std::get_if<NodeList>(&o)) return {{"kind", "nodes"}, {"ids", n->ids}};
  if (const auto* e = std::get_if<EngineError>(&o)) return {{"kind", "error"}, {"class", e->klass}};
  return {{"kind", "timeout"}};
}

Outcome outcome_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "nodes") return NodeList{j.at("ids").get<std::vector<std::uint32_t>>()};
  if (kind == "error") return EngineError{j.at("class").get<std::string>()};
  if (kind == "timeout") return Timeout{};
  throw std::invalid_argument("unknown outcome kind '" + kind + "'");
}

TestCase make_case(std::shared_ptr<const xml::XmlDocument> doc, xpath::XPathExpr expr,
                   std::optional<Provenance> provenance) {
  TestCase c;
  c.doc_text = xml::serialize(*doc);
  c.query_text = xpath::render(expr);
  c.standard = expr.standard;
  c.query = std::move(expr);
  c.provenance = provenance;
  c.doc = std::move(doc);
  return c;
}

json to_json(const TestCase& c) {
  json j = {{"doc", c.doc_text}, {"query", c.query_text}, {"standard", xpath::standard_name(c.standard)}};
  if (c.query) j["query_ast"] = xpath::to_json(*c.query);
  if (c.provenance) {
    j["provenance"] = {{"seed", c.provenance->seed},
                       {"doc", c.provenance->doc},
                       {"query", c.provenance->query},
                       {"lane", c.provenance->lane}};
  }
  return j;
}

TestCase case_from_json(const json& j) {
  TestCase c;
  c.doc_text = j.at("doc").get<std::string>();
  c.standard = standard_or_throw(j.at("standard").get<std::string>());
  if (j.contains("query_ast")) {
    c.query = xpath::xpath_from_json(j.at("query_ast"));
    c.query->standard = c.standard;
  }
  if (j.contains("query")) {
    c.query_text = j.at("query").get<std::string>();
  } else if (c.query) {
    c.query_text = xpath::render(*c.query);
  } else {
    throw std::invalid_argument("case needs a query or query_ast");
  }
  if (j.contains("provenance")) {
    const json& p = j.at("provenance");
    c.provenance = Provenance{p.at("seed").get<std::uint64_t>(), p.at("doc").get<std::uint64_t>(),
                              p.at("query").get<std::uint64_t>(), p.value("lane", 0u)};
  }
  return c;
}

EngineResult run_engine(const EngineSpec& spec, const TestCase& c) {
  if (spec.standard != c.standard) {
    throw std::invalid_argument("engine '" + spec.name + "' does not implement XPath " +
                                std::string(xpath::standard_name(c.standard)));
  }
  const auto start = std::chrono::steady_clock::now();
  EngineResult r;
  r.outcome = spec.kind == EngineKind::kSubprocess ? run_subprocess(spec, c) : run_builtin(spec, c);
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Outcome parse_wire_output(std::string_view out) {
  std::vector<std::string_view> lines;
  while (!out.empty()) {
    std::size_t nl = out.find('\n');
    std::string_view line = out.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    out.remove_prefix(nl + 1);
  }
  if (lines.size() == 1 && lines[0].starts_with("ERR ") && lines[0].size() > 4) {
    return EngineError{std::string(lines[0].substr(4))};
  }
  NodeList result;
  for (std::string_view line : lines) {
    if (!line.starts_with("N ") || line.size() < 3) return EngineError{"adapter"};
    std::string_view digits = line.substr(2);
    std::uint32_t id = 0;
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc() || p != digits.data() + digits.size()) return EngineError{"adapter"};
    result.ids.push_back(id);
  }
  return result;
}

std::string_view klass_name(Klass k) { return k == Klass::kLogic ? "logic" : "error"; }

std::optional<Klass> klass_from_name(std::string_view name) {
  if (name == "logic") return Klass::kLogic;
  if (name == "error") return Klass::kError;
  return std::nullopt;
}

std::optional<Discrepancy> compare(const TestCase& c, const Results& results) {
  if (results.size() < 2) throw std::invalid_argument("compare needs at least two results");
  const std::string* first_ok = nullptr;
  const std::string* first_failed = nullptr;
  std::optional<std::pair<std::string, std::string>> logic;
  for (const auto& [name, r] : results) {
    if (!succeeded(r.outcome)) {
      if (!first_failed) first_failed = &name;
      continue;
    }
    if (!first_ok) {
      first_ok = &name;
    } else if (!logic && std::get<NodeList>(r.outcome) != std::get<NodeList>(results.at(*first_ok).outcome)) {
      logic = std::pair{*first_ok, name};
    }
  }
  Discrepancy d;
  if (logic) {
    d.klass = Klass::kLogic;
    d.pair = *logic;
  } else if (first_ok && first_failed) {
    d.klass = Klass::kError;
    d.pair = {*first_ok, *first_failed};
  } else {
    return std::nullopt;
  }
  d.test = c;
  d.results = results;
  d.fingerprint = fingerprint(d);
  return d;
}

std::string fingerprint(const Discrepancy& d) {
  std::string key(klass_name(d.klass));
  key += '|';
  if (d.test.query) {
    std::vector<std::string> names;
    for (const xpath::Section& s : d.test.query->sections) {
      for (const xpath::Predicate& p : s.predicates) collect_names(p.body, names);
    }
    std::sort(names.begin(), names.end());
    for (const std::string& n : names) key += n + ',';
  } else {
    static const std::regex literals(R"("[^"]*"|'[^']*'|\d+(\.\d+)?)");
    key += std::regex_replace(d.test.query_text, literals, "#");
  }
  key += '|';
  for (const auto& [name, r] : d.results) {
    key += name;
    key += '=';
    key += outcome_shape(r.outcome);
    key += ';';
  }
  return to_hex(fnv1a64(key));
}

json to_json(const Discrepancy& d) {
  json results = json::object();
  for (const auto& [name, r] : d.results) results[name] = to_json(r.outcome);
  return {{"case", to_json(d.test)},
          {"results", std::move(results)},
          {"klass", klass_name(d.klass)},
          {"fingerprint", d.fingerprint},
          {"pair", {d.pair.first, d.pair.second}}};
}

}  // namespace xpathdiff::harness
