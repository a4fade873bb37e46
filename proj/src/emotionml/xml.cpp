#include "xml.hpp"

#include <cstdint>

namespace asc::xml {
namespace {

constexpr std::size_t kMaxDepth = 256;

bool is_name_start(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_' || c == ':' || c >= 0x80;
}

bool is_name_char(unsigned char c) {
  return is_name_start(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

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

// Returns offset of the first invalid sequence, or npos.
std::size_t find_invalid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      // C0 controls other than tab/CR/LF are not XML characters.
      if (c < 0x20 && c != '\t' && c != '\n' && c != '\r') return i;
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      len = 2;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      len = 4;
      cp = c & 0x07;
    } else {
      return i;
    }
    if (i + len > s.size()) return i;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return i;
      cp = (cp << 6) | (cc & 0x3F);
    }
    const bool overlong = (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000);
    if (overlong || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return i;
    i += len;
  }
  return std::string_view::npos;
}

class Reader {
 public:
  explicit Reader(std::string_view doc) : doc_(doc) {}

  std::unique_ptr<Element> document() {
    if (auto bad = find_invalid_utf8(doc_); bad != std::string_view::npos) {
      fail(bad, "invalid character or UTF-8 sequence");
    }
    if (starts_with("\xEF\xBB\xBF")) pos_ += 3;
    skip_misc(true);
    if (!starts_with("<") || pos_ + 1 >= doc_.size() || !is_name_start(doc_[pos_ + 1])) {
      fail(pos_, "expected root element");
    }
    auto root = element_tree();
    skip_misc(false);
    if (pos_ != doc_.size()) fail(pos_, "content after root element");
    return root;
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& what) { throw ParseError(at, what); }

  bool starts_with(std::string_view s) const { return doc_.substr(pos_).starts_with(s); }

  void skip_spaces() {
    while (pos_ < doc_.size() && is_space(doc_[pos_])) ++pos_;
  }

  void skip_past(std::string_view terminator, const char* what) {
    const auto end = doc_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(pos_, std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Prolog/epilog: whitespace, comments, PIs and (prolog only) a DOCTYPE.
  void skip_misc(bool prolog) {
    bool doctype_seen = false;
    for (;;) {
      skip_spaces();
      if (starts_with("<!--")) {
        comment();
      } else if (starts_with("<?")) {
        processing_instruction();
      } else if (prolog && !doctype_seen && starts_with("<!DOCTYPE")) {
        const auto end = doc_.find('>', pos_);
        if (end == std::string_view::npos) fail(pos_, "unterminated DOCTYPE");
        if (doc_.substr(pos_, end - pos_).find('[') != std::string_view::npos) {
          fail(pos_, "DOCTYPE internal subset not supported");
        }
        pos_ = end + 1;
        doctype_seen = true;
      } else {
        return;
      }
    }
  }

  void comment() {
    const auto start = pos_;
    pos_ += 4;
    const auto end = doc_.find("--", pos_);
    if (end == std::string_view::npos) fail(start, "unterminated comment");
    if (end + 2 >= doc_.size() || doc_[end + 2] != '>') fail(end, "'--' inside comment");
    pos_ = end + 3;
  }

  void processing_instruction() {
    const auto start = pos_;
    pos_ += 2;
    const auto target = name();
    if (target.empty()) fail(start, "processing instruction without target");
    skip_past("?>", "processing instruction");
  }

  std::string name() {
    const auto start = pos_;
    if (pos_ >= doc_.size() || !is_name_start(static_cast<unsigned char>(doc_[pos_]))) return {};
    while (pos_ < doc_.size() && is_name_char(static_cast<unsigned char>(doc_[pos_]))) ++pos_;
    return std::string(doc_.substr(start, pos_ - start));
  }

  std::string require_name(const char* what) {
    auto n = name();
    if (n.empty()) fail(pos_, std::string("expected ") + what);
    return n;
  }

  // Reads an entity reference starting at '&' and appends its expansion.
  void entity(std::string& out) {
    const auto start = pos_;
    const auto semi = doc_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) fail(start, "bad entity reference");
    const auto body = doc_.substr(pos_ + 1, semi - pos_ - 1);
    pos_ = semi + 1;
    if (body == "lt") { out += '<'; return; }
    if (body == "gt") { out += '>'; return; }
    if (body == "amp") { out += '&'; return; }
    if (body == "quot") { out += '"'; return; }
    if (body == "apos") { out += '\''; return; }
    if (body.size() >= 2 && body[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = body[1] == 'x';
      const auto digits = body.substr(hex ? 2 : 1);
      if (digits.empty()) fail(start, "empty character reference");
      for (char c : digits) {
        std::uint32_t d = 0;
        if (c >= '0' && c <= '9') d = static_cast<std::uint32_t>(c - '0');
        else if (hex && c >= 'a' && c <= 'f') d = static_cast<std::uint32_t>(c - 'a' + 10);
        else if (hex && c >= 'A' && c <= 'F') d = static_cast<std::uint32_t>(c - 'A' + 10);
        else fail(start, "bad character reference");
        cp = cp * (hex ? 16 : 10) + d;
        if (cp > 0x10FFFF) fail(start, "character reference out of range");
      }
      const bool legal = cp == 0x9 || cp == 0xA || cp == 0xD || (cp >= 0x20 && cp <= 0xD7FF) ||
                         (cp >= 0xE000 && cp <= 0xFFFD) || cp >= 0x10000;
      if (!legal) fail(start, "character reference to illegal character");
      append_utf8(out, cp);
      return;
    }
    fail(start, "undefined entity");
  }

  std::string attribute_value() {
    if (pos_ >= doc_.size() || (doc_[pos_] != '"' && doc_[pos_] != '\'')) {
      fail(pos_, "expected quoted attribute value");
    }
    const char quote = doc_[pos_++];
    std::string value;
    for (;;) {
      if (pos_ >= doc_.size()) fail(pos_, "unterminated attribute value");
      const char c = doc_[pos_];
      if (c == quote) {
        ++pos_;
        return value;
      }
      if (c == '<') fail(pos_, "'<' in attribute value");
      if (c == '&') {
        entity(value);
      } else {
        value += c;
        ++pos_;
      }
    }
  }

  // Parses "<name attrs>" or "<name attrs/>"; returns true if self-closing.
  bool start_tag(Element& e) {
    ++pos_;  // '<'
    e.name = require_name("element name");
    for (;;) {
      const auto before = pos_;
      skip_spaces();
      if (pos_ >= doc_.size()) fail(pos_, "unterminated start tag");
      if (doc_[pos_] == '>') {
        ++pos_;
        return false;
      }
      if (starts_with("/>")) {
        pos_ += 2;
        return true;
      }
      if (before == pos_) fail(pos_, "expected whitespace before attribute");
      auto attr = require_name("attribute name");
      skip_spaces();
      if (pos_ >= doc_.size() || doc_[pos_] != '=') fail(pos_, "expected '='");
      ++pos_;
      skip_spaces();
      auto value = attribute_value();
      for (const auto& [k, v] : e.attributes) {
        if (k == attr) fail(pos_, "duplicate attribute '" + attr + "'");
      }
      e.attributes.emplace_back(std::move(attr), std::move(value));
    }
  }

  std::unique_ptr<Element> element_tree() {
    auto root = std::make_unique<Element>();
    if (start_tag(*root)) return root;
    std::vector<Element*> open{root.get()};
    while (!open.empty()) {
      if (pos_ >= doc_.size()) fail(pos_, "unclosed element '" + open.back()->name + "'");
      Element& current = *open.back();
      const char c = doc_[pos_];
      if (c == '<') {
        if (starts_with("</")) {
          pos_ += 2;
          const auto closing = require_name("closing tag name");
          if (closing != current.name) {
            fail(pos_, "mismatched closing tag '" + closing + "' for '" + current.name + "'");
          }
          skip_spaces();
          if (pos_ >= doc_.size() || doc_[pos_] != '>') fail(pos_, "expected '>'");
          ++pos_;
          open.pop_back();
        } else if (starts_with("<!--")) {
          comment();
        } else if (starts_with("<![CDATA[")) {
          pos_ += 9;
          const auto end = doc_.find("]]>", pos_);
          if (end == std::string_view::npos) fail(pos_, "unterminated CDATA section");
          current.text.append(doc_.substr(pos_, end - pos_));
          pos_ = end + 3;
        } else if (starts_with("<?")) {
          processing_instruction();
        } else {
          if (open.size() >= kMaxDepth) fail(pos_, "element nesting too deep");
          auto child = std::make_unique<Element>();
          const bool empty = start_tag(*child);
          Element* raw = child.get();
          current.children.push_back(std::move(child));
          if (!empty) open.push_back(raw);
        }
      } else if (c == '&') {
        entity(current.text);
      } else {
        if (c == '>' && starts_with("]]>")) fail(pos_, "']]>' in character data");
        current.text += c;
        ++pos_;
      }
    }
    return root;
  }

  std::string_view doc_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseError::ParseError(std::size_t offset, const std::string& what)
    : std::runtime_error("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

std::string_view Element::local_name() const {
  std::string_view n = name;
  const auto colon = n.rfind(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

std::optional<std::string_view> Element::attribute(std::string_view attr) const {
  for (const auto& [k, v] : attributes) {
    if (k == attr) return std::string_view(v);
  }
  return std::nullopt;
}

bool is_valid_text(std::string_view text) {
  return find_invalid_utf8(text) == std::string_view::npos;
}

std::unique_ptr<Element> parse(std::string_view document) { return Reader(document).document(); }

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\t': out += "&#9;"; break;
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace asc::xml
