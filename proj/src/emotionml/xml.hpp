#pragma once

// Minimal non-validating XML reader: elements, attributes, character data,
// predefined and numeric entities, comments, processing instructions, CDATA
// and a DOCTYPE without internal subset. Enough to check well-formedness of
// EmotionML documents; namespaces are not resolved.

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace asc::xml {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, const std::string& what);
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Element>> children;
  std::string text;

  // Name without a namespace prefix.
  std::string_view local_name() const;
  std::optional<std::string_view> attribute(std::string_view name) const;
};

// Throws ParseError for anything that is not a well-formed document.
std::unique_ptr<Element> parse(std::string_view document);

// True if text is valid UTF-8 made only of XML characters.
bool is_valid_text(std::string_view text);

// Escapes &, <, >, " for attribute and text content.
std::string escape(std::string_view text);

}  // namespace asc::xml
