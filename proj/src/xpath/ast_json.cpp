#include "xpathdiff/xpath/ast_json.h"

#include <stdexcept>

#include "xpathdiff/xpath/catalog.h"

namespace xpathdiff::xpath {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument("query AST: " + what); }

json children_json(const ExprNode& n) {
  json a = json::array();
  for (const ExprNode& c : n.children) a.push_back(to_json(c));
  return a;
}

std::vector<ExprNode> children_from(const json& j, std::size_t arity) {
  if (!j.contains("args") || !j["args"].is_array()) bad("missing args");
  std::vector<ExprNode> out;
  for (const json& c : j["args"]) out.push_back(expr_node_from_json(c));
  if (out.size() != arity) bad("wrong argument count");
  return out;
}

}  // namespace

json to_json(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::kLiteral:
      if (const auto* i = std::get_if<std::int64_t>(&n.literal)) return {{"k", "int"}, {"v", *i}};
      if (const auto* d = std::get_if<double>(&n.literal)) return {{"k", "dbl"}, {"v", *d}};
      if (const auto* s = std::get_if<std::string>(&n.literal)) return {{"k", "str"}, {"v", *s}};
      return {{"k", "bool"}, {"v", std::get<bool>(n.literal)}};
    case NodeKind::kContextItem: return {{"k", "ctx"}};
    case NodeKind::kAttribute: return {{"k", "attr"}, {"name", n.name}};
    case NodeKind::kChildPath: return {{"k", "child"}, {"name", n.name}};
    case NodeKind::kText: return {{"k", "text"}};
    case NodeKind::kCall:
      return {{"k", "call"}, {"fn", entry_for(n.function).name}, {"args", children_json(n)}};
    case NodeKind::kBinary:
      return {{"k", "bin"}, {"op", entry_for(n.op).name}, {"args", children_json(n)}};
    case NodeKind::kUnary:
      return {{"k", "un"}, {"op", entry_for(n.op).name}, {"args", children_json(n)}};
    case NodeKind::kRange: return {{"k", "range"}, {"args", children_json(n)}};
  }
  return {};
}

ExprNode expr_node_from_json(const json& j) {
  if (!j.is_object() || !j.contains("k")) bad("node without kind");
  const std::string k = j["k"].get<std::string>();
  if (k == "int") return ExprNode::integer(j.at("v").get<std::int64_t>());
  if (k == "dbl") return ExprNode::lit(j.at("v").get<double>());
  if (k == "str") return ExprNode::lit(j.at("v").get<std::string>());
  if (k == "bool") return ExprNode::lit(j.at("v").get<bool>());
  if (k == "ctx") return ExprNode::context_item();
  if (k == "attr") return ExprNode::attribute(j.at("name").get<std::string>());
  if (k == "child") return ExprNode::child_path(j.at("name").get<std::string>());
  if (k == "text") return ExprNode::text();
  if (k == "call") {
    const CatalogEntry* e = find_entry(j.at("fn").get<std::string>(), EntryForm::kFunction);
    if (!e) bad("unknown function " + j["fn"].get<std::string>());
    return ExprNode::call(e->function, children_from(j, e->params.size()));
  }
  if (k == "bin") {
    const CatalogEntry* e = find_entry(j.at("op").get<std::string>(), EntryForm::kBinary);
    if (!e) bad("unknown operator " + j["op"].get<std::string>());
    auto args = children_from(j, 2);
    return ExprNode::binary(e->op, std::move(args[0]), std::move(args[1]));
  }
  if (k == "un") {
    const CatalogEntry* e = find_entry(j.at("op").get<std::string>(), EntryForm::kUnary);
    if (!e) bad("unknown unary operator " + j["op"].get<std::string>());
    auto args = children_from(j, 1);
    return ExprNode::unary(e->op, std::move(args[0]));
  }
  if (k == "range") {
    auto args = children_from(j, 2);
    return ExprNode::range(std::move(args[0]), std::move(args[1]));
  }
  bad("unknown node kind " + k);
}

json to_json(const XPathExpr& expr) {
  json sections = json::array();
  for (const Section& s : expr.sections) {
    json preds = json::array();
    for (const Predicate& p : s.predicates) {
      preds.push_back({{"kind", p.kind == PredicateKind::kPositional ? "positional" : "boolean"},
                       {"body", to_json(p.body)}});
    }
    sections.push_back({{"step", s.prefix.step == StepKind::kSlash ? "/" : "//"},
                        {"axis", xml::axis_name(s.prefix.axis)},
                        {"name", s.prefix.tag ? *s.prefix.tag : "*"},
                        {"predicates", std::move(preds)}});
  }
  return {{"standard", standard_name(expr.standard)}, {"sections", std::move(sections)}};
}

XPathExpr xpath_from_json(const json& j) {
  XPathExpr out;
  try {
    auto std_name = standard_from_name(j.at("standard").get<std::string>());
    if (!std_name) bad("unknown standard");
    out.standard = *std_name;
    for (const json& s : j.at("sections")) {
      Section sec;
      const std::string step = s.at("step").get<std::string>();
      if (step == "/") {
        sec.prefix.step = StepKind::kSlash;
      } else if (step == "//") {
        sec.prefix.step = StepKind::kDoubleSlash;
      } else {
        bad("bad step " + step);
      }
      auto axis = xml::axis_from_name(s.value("axis", "child"));
      if (!axis) bad("unknown axis");
      sec.prefix.axis = *axis;
      std::string name = s.at("name").get<std::string>();
      if (name != "*") sec.prefix.tag = std::move(name);
      for (const json& p : s.value("predicates", json::array())) {
        Predicate pred;
        pred.kind = p.value("kind", "boolean") == "positional" ? PredicateKind::kPositional : PredicateKind::kBoolean;
        pred.body = expr_node_from_json(p.at("body"));
        sec.predicates.push_back(std::move(pred));
      }
      out.sections.push_back(std::move(sec));
    }
  } catch (const json::exception& e) {
    bad(e.what());
  }
  if (out.sections.empty()) bad("no sections");
  return out;
}

}  // namespace xpathdiff::xpath
