#pragma once

// Flat "key: value" text used for configuration, model files and sidecars.
// Blank lines and lines starting with '#' are skipped; the first ':' splits
// key from value and both sides are trimmed.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace asc {

class KeyValueError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class KeyValueFile {
 public:
  KeyValueFile() = default;

  static KeyValueFile parse(std::string_view text);
  static KeyValueFile load(const std::filesystem::path& path);

  // Later entries win on lookup.
  void set(std::string key, std::string value);
  std::optional<std::string> get(std::string_view key) const;
  bool contains(std::string_view key) const { return get(key).has_value(); }

  std::string require(std::string_view key) const;
  double require_double(std::string_view key) const;
  double get_double(std::string_view key, double fallback) const;
  long long get_int(std::string_view key, long long fallback) const;
  std::vector<double> require_doubles(std::string_view key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

// Round-trippable decimal rendering of a double.
std::string format_double(double value);
double parse_double(std::string_view text);
std::vector<double> parse_doubles(std::string_view text);
std::string_view trim(std::string_view text);

}  // namespace asc
