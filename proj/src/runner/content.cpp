#include "asc/runner/content.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "asc/keyvalue.hpp"

namespace asc::runner {
namespace {

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

std::optional<long long> integer(std::string_view text) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

}  // namespace

BadRow::BadRow(std::size_t line, const std::string& why)
    : std::runtime_error("BadRow: line " + std::to_string(line) + ": " + why), line_(line) {}

std::vector<ContentScore> validate_content(std::string_view csv) {
  std::vector<ContentScore> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t row = 0;
  std::size_t first_line = 0;
  while (pos < csv.size()) {
    auto end = csv.find('\n', pos);
    if (end == std::string_view::npos) end = csv.size();
    const auto line = trim(csv.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (first_line == 0) first_line = line_no;
    const auto f = fields(line);
    if (f.size() != 3 && f.size() != 4) throw BadRow(line_no, "expected 3 or 4 fields");
    const std::size_t off = f.size() - 3;
    const bool first = line_no == first_line;
    if (first && !integer(f[off])) continue;  // header
    ++row;
    const auto correct = integer(f[off]);
    const auto n = integer(f[off + 1]);
    const auto k = integer(f[off + 2]);
    if (!correct || !n || !k) throw BadRow(line_no, "counts must be integers");
    ContentScore s;
    s.id = off ? std::string(f[0]) : std::to_string(row);
    if (s.id.empty()) throw BadRow(line_no, "empty stimulus id");
    s.correct = *correct;
    s.n = *n;
    s.k = *k;
    try {
      s.score = platform::chance_corrected_score(s.correct, s.n, s.k);
    } catch (const platform::Error& e) {
      throw BadRow(line_no, e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ContentScore> validate_content_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadRow(0, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return validate_content(buf.str());
}

std::string format_report(const std::vector<ContentScore>& scores) {
  std::string out = "id,correct,n,k,cc_percent,eligible\n";
  for (const auto& s : scores) {
    out += s.id + ',' + std::to_string(s.correct) + ',' + std::to_string(s.n) + ',' + std::to_string(s.k) + ',' +
           format_double(s.score.percent) + ',' + (s.score.eligible ? "yes" : "no") + '\n';
  }
  return out;
}

}  // namespace asc::runner
