#include "asc/keyvalue.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace asc {

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw KeyValueError("cannot format number");
  return std::string(buf, end);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw KeyValueError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_doubles(std::string_view text) {
  std::vector<double> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find_first_of(", \t", pos);
    if (next == std::string_view::npos) next = text.size();
    auto token = trim(text.substr(pos, next - pos));
    if (!token.empty()) values.push_back(parse_double(token));
    pos = next + 1;
  }
  return values;
}

KeyValueFile KeyValueFile::parse(std::string_view text) {
  KeyValueFile file;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw KeyValueError("line " + std::to_string(line_no) + ": expected 'key: value'");
    }
    auto key = trim(line.substr(0, colon));
    if (key.empty()) throw KeyValueError("line " + std::to_string(line_no) + ": empty key");
    file.set(std::string(key), std::string(trim(line.substr(colon + 1))));
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw KeyValueError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const KeyValueError& e) {
    throw KeyValueError(path.string() + ": " + e.what());
  }
}

void KeyValueFile::set(std::string key, std::string value) {
  entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValueFile::get(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) return it->second;
  }
  return std::nullopt;
}

std::string KeyValueFile::require(std::string_view key) const {
  auto value = get(key);
  if (!value) throw KeyValueError("missing key '" + std::string(key) + "'");
  return *value;
}

double KeyValueFile::require_double(std::string_view key) const {
  return parse_double(require(key));
}

double KeyValueFile::get_double(std::string_view key, double fallback) const {
  auto value = get(key);
  return value ? parse_double(*value) : fallback;
}

long long KeyValueFile::get_int(std::string_view key, long long fallback) const {
  auto value = get(key);
  if (!value) return fallback;
  long long out = 0;
  auto text = trim(*value);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw KeyValueError("key '" + std::string(key) + "' is not an integer");
  }
  return out;
}

std::vector<double> KeyValueFile::require_doubles(std::string_view key) const {
  return parse_doubles(require(key));
}

std::string KeyValueFile::serialize() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    out += k;
    out += ": ";
    out += v;
    out += '\n';
  }
  return out;
}

void KeyValueFile::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw KeyValueError("cannot write " + path.string());
  out << serialize();
}

}  // namespace asc
