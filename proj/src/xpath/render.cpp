#include "xpathdiff/xpath/render.h"

#include <charconv>
#include <cmath>
#include <stdexcept>

#include "xpathdiff/xpath/catalog.h"

namespace xpathdiff::xpath {

namespace {

bool needs_parens(const ExprNode& operand) {
  switch (operand.kind) {
    case NodeKind::kBinary:
    case NodeKind::kUnary:
    case NodeKind::kRange:
      return true;
    default:
      return false;
  }
}

std::string quote(const std::string& s) {
  if (s.find('"') == std::string::npos) return '"' + s + '"';
  if (s.find('\'') == std::string::npos) return '\'' + s + '\'';
  // Neither quote is free; 1.0 has no escape syntax, so split into pieces.
  std::string out = "concat(";
  std::string piece;
  bool first = true;
  auto flush = [&](const std::string& lit) {
    if (!first) out += ", ";
    out += lit;
    first = false;
  };
  for (char c : s) {
    if (c == '"') {
      if (!piece.empty()) flush('"' + piece + '"');
      piece.clear();
      flush("'\"'");
    } else {
      piece += c;
    }
  }
  if (!piece.empty()) flush('"' + piece + '"');
  if (first) flush("\"\"");
  // concat() needs at least two arguments.
  if (out.find(", ") == std::string::npos) out += ", \"\"";
  return out + ")";
}

void render_into(const ExprNode& n, std::string& out);

void operand_into(const ExprNode& n, std::string& out) {
  if (needs_parens(n)) {
    out += '(';
    render_into(n, out);
    out += ')';
  } else {
    render_into(n, out);
  }
}

void render_into(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case NodeKind::kLiteral:
      if (const auto* i = std::get_if<std::int64_t>(&n.literal)) {
        out += std::to_string(*i);
      } else if (const auto* d = std::get_if<double>(&n.literal)) {
        out += format_number(*d);
      } else if (const auto* s = std::get_if<std::string>(&n.literal)) {
        out += quote(*s);
      } else {
        out += std::get<bool>(n.literal) ? "true()" : "false()";
      }
      return;
    case NodeKind::kContextItem:
      out += '.';
      return;
    case NodeKind::kAttribute:
      out += '@';
      out += n.name;
      return;
    case NodeKind::kChildPath:
      out += n.name;
      return;
    case NodeKind::kText:
      out += "text()";
      return;
    case NodeKind::kCall: {
      out += entry_for(n.function).name;
      out += '(';
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) out += ", ";
        render_into(n.children[i], out);
      }
      out += ')';
      return;
    }
    case NodeKind::kBinary:
      operand_into(n.children[0], out);
      out += ' ';
      out += entry_for(n.op).name;
      out += ' ';
      operand_into(n.children[1], out);
      return;
    case NodeKind::kUnary:
      if (n.op == Operator::kNot) {
        out += "not(";
        render_into(n.children[0], out);
        out += ')';
      } else {
        out += '-';
        const ExprNode& arg = n.children[0];
        bool negative_literal = arg.kind == NodeKind::kLiteral &&
                                ((std::holds_alternative<std::int64_t>(arg.literal) &&
                                  std::get<std::int64_t>(arg.literal) < 0) ||
                                 (std::holds_alternative<double>(arg.literal) &&
                                  std::signbit(std::get<double>(arg.literal))));
        if (negative_literal) {
          out += '(';
          render_into(arg, out);
          out += ')';
        } else {
          operand_into(arg, out);
        }
      }
      return;
    case NodeKind::kRange:
      operand_into(n.children[0], out);
      out += " to ";
      operand_into(n.children[1], out);
      return;
  }
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) throw std::invalid_argument("non-finite numeric literal");
  if (v == 0) return "0";
  char buf[400];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  if (ec != std::errc{}) throw std::runtime_error("format_number failed");
  return std::string(buf, ptr);
}

std::string render(const ExprNode& node) {
  std::string out;
  render_into(node, out);
  return out;
}

std::string render(const SectionPrefix& prefix) {
  std::string out = prefix.step == StepKind::kSlash ? "/" : "//";
  if (prefix.axis != xml::Axis::kChild) {
    out += xml::axis_name(prefix.axis);
    out += "::";
  }
  out += prefix.tag ? *prefix.tag : "*";
  return out;
}

std::string render(const XPathExpr& expr) {
  std::string out;
  for (const Section& s : expr.sections) {
    out += render(s.prefix);
    for (const Predicate& p : s.predicates) {
      out += '[';
      render_into(p.body, out);
      out += ']';
    }
  }
  return out;
}

}  // namespace xpathdiff::xpath
