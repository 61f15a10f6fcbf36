#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "xpathdiff/xml/document.h"

namespace xpathdiff::xml {

struct SerializeOptions {
  bool xml_declaration = false;
};

/// Compact single-line XML. Attributes keep their stored order; no whitespace
/// is inserted between elements, so no text nodes appear that the model lacks.
std::string serialize(const XmlDocument& doc, SerializeOptions options = {});

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : std::runtime_error("offset " + std::to_string(position) + ": " + what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Parses the subset produced by serialize(): elements, attributes, text,
/// character and predefined entity references, an optional XML declaration.
/// Whitespace-only text between child elements is ignored; any other mixed
/// content is rejected. Values that look like decimal integers become integer
/// TypedValues.
XmlDocument parse(std::string_view text);

}  // namespace xpathdiff::xml
