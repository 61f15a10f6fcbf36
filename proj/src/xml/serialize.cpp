#include "xpathdiff/xml/serialize.h"

#include <algorithm>
#include <charconv>
#include <optional>
#include <unordered_set>
#include <vector>

namespace xpathdiff::xml {

namespace {

void escape_into(std::string& out, std::string_view s, bool attribute) {
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      case '\t': out += attribute ? "&#9;" : "\t"; break;
      case '\n': out += attribute ? "&#10;" : "\n"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
}

void write_element(const XmlDocument& doc, std::uint32_t order, std::string& out) {
  const ElementNode& n = doc.at(order);
  out += '<';
  out += n.tag;
  for (const Attribute& a : n.attributes) {
    out += ' ';
    out += a.name;
    out += "=\"";
    escape_into(out, lexical(a.value), true);
    out += '"';
  }
  auto kids = doc.child_orders(order);
  if (kids.empty() && !n.text) {
    out += "/>";
    return;
  }
  out += '>';
  if (n.text) escape_into(out, lexical(*n.text), false);
  for (std::uint32_t c : kids) write_element(doc, c, out);
  out += "</";
  out += n.tag;
  out += '>';
}

bool is_name_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) { return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.'; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::optional<std::int64_t> as_integer(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i == s.size()) return std::nullopt;
  // Leading zeros and "-0" would not survive a round trip.
  if (s[i] == '0' && (s.size() - i > 1 || i == 1)) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

TypedValue typed(std::string s) {
  if (auto i = as_integer(s)) return *i;
  return s;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  XmlDocument run() {
    skip_space();
    if (s_.substr(pos_, 5) == "<?xml") {
      auto end = s_.find("?>", pos_);
      if (end == std::string_view::npos) fail("unterminated XML declaration");
      pos_ = end + 2;
    }
    skip_space();
    if (peek() != '<') fail("expected root element");
    element(std::nullopt);
    skip_space();
    if (pos_ != s_.size()) fail("content after the root element");
    try {
      return XmlDocument(std::move(nodes_));
    } catch (const DocumentError& e) {
      fail(e.what());
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(pos_, what); }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_space() {
    while (pos_ < s_.size() && is_space(s_[pos_])) ++pos_;
  }

  std::string name() {
    if (!is_name_start(peek())) fail("expected a name");
    std::size_t start = pos_;
    while (pos_ < s_.size() && is_name_char(s_[pos_])) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void reference(std::string& out) {
    std::size_t start = pos_;
    ++pos_;  // '&'
    auto semi = s_.find(';', pos_);
    if (semi == std::string_view::npos) fail("unterminated entity reference");
    std::string_view ent = s_.substr(pos_, semi - pos_);
    pos_ = semi + 1;
    if (ent == "lt") {
      out += '<';
    } else if (ent == "gt") {
      out += '>';
    } else if (ent == "amp") {
      out += '&';
    } else if (ent == "quot") {
      out += '"';
    } else if (ent == "apos") {
      out += '\'';
    } else if (ent.size() > 1 && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent[1] == 'x';
      std::string_view digits = ent.substr(hex ? 2 : 1);
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size() || cp == 0 || cp > 0x10FFFF) {
        pos_ = start;
        fail("bad character reference");
      }
      append_utf8(out, cp);
    } else {
      pos_ = start;
      fail("unknown entity '" + std::string(ent) + "'");
    }
  }

  std::string attribute_value() {
    char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected quoted attribute value");
    ++pos_;
    std::string out;
    while (true) {
      char c = peek();
      if (c == '\0') fail("unterminated attribute value");
      if (c == quote) break;
      if (c == '<') fail("'<' in attribute value");
      if (c == '&') {
        reference(out);
      } else {
        // Attribute-value normalization for literal whitespace.
        out += (c == '\t' || c == '\n' || c == '\r') ? ' ' : c;
        ++pos_;
      }
    }
    ++pos_;
    return out;
  }

  NodeId element(std::optional<NodeId> parent) {
    std::size_t open_pos = pos_;
    expect('<');
    std::string tag = name();
    std::vector<Attribute> attrs;
    while (true) {
      std::size_t before = pos_;
      skip_space();
      char c = peek();
      if (c == '/' || c == '>') break;
      if (before == pos_) fail("expected whitespace before attribute");
      std::string an = name();
      skip_space();
      expect('=');
      skip_space();
      std::string av = attribute_value();
      for (const Attribute& a : attrs) {
        if (a.name == an) fail("duplicate attribute '" + an + "'");
      }
      attrs.push_back({std::move(an), typed(std::move(av))});
    }

    // Move `id` to the front and adopt it as the NodeId.
    auto id_it = std::find_if(attrs.begin(), attrs.end(), [](const Attribute& a) { return a.name == "id"; });
    if (id_it == attrs.end()) {
      pos_ = open_pos;
      fail("element <" + tag + "> has no id attribute");
    }
    const auto* idv = std::get_if<std::int64_t>(&id_it->value);
    if (!idv || *idv <= 0 || *idv > static_cast<std::int64_t>(UINT32_MAX)) {
      pos_ = open_pos;
      fail("id attribute is not a positive integer");
    }
    NodeId id{static_cast<std::uint32_t>(*idv)};
    if (!seen_ids_.insert(id.value).second) {
      pos_ = open_pos;
      fail("duplicate id " + std::to_string(id.value));
    }
    std::rotate(attrs.begin(), id_it, id_it + 1);

    std::size_t slot = nodes_.size();
    nodes_.push_back(ElementNode{id, tag, std::move(attrs), std::nullopt, {}, parent});

    if (peek() == '/') {
      ++pos_;
      expect('>');
      return id;
    }
    expect('>');

    std::string text;
    bool has_children = false;
    while (true) {
      char c = peek();
      if (c == '\0') fail("unterminated element <" + tag + ">");
      if (c == '<') {
        if (s_.substr(pos_, 2) == "</") break;
        if (s_.substr(pos_, 4) == "<!--" || s_.substr(pos_, 2) == "<?" || s_.substr(pos_, 2) == "<!") {
          fail("comments, processing instructions and CDATA are not supported");
        }
        NodeId child = element(id);
        nodes_[slot].children.push_back(child);
        has_children = true;
        continue;
      }
      if (c == '&') {
        reference(text);
      } else {
        text += c;
        ++pos_;
      }
    }
    pos_ += 2;
    std::string close = name();
    if (close != tag) fail("mismatched closing tag </" + close + "> for <" + tag + ">");
    skip_space();
    expect('>');

    if (has_children) {
      bool blank = std::all_of(text.begin(), text.end(), is_space);
      if (!blank) fail("mixed content in <" + tag + ">");
    } else {
      // `<T></T>` keeps an explicit empty text so that it round-trips.
      nodes_[slot].text = typed(std::move(text));
    }
    return id;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<ElementNode> nodes_;
  std::unordered_set<std::uint32_t> seen_ids_;
};

}  // namespace

std::string serialize(const XmlDocument& doc, SerializeOptions options) {
  std::string out;
  if (options.xml_declaration) out += "<?xml version=\"1.0\"?>";
  write_element(doc, 0, out);
  return out;
}

XmlDocument parse(std::string_view text) { return Parser(text).run(); }

}  // namespace xpathdiff::xml
