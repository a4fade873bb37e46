#pragma once

// Survey-based stimulus screening.
//
// Input CSV rows are `id,correct,n,k` or `correct,n,k` (ids are then the
// 1-based row numbers). The first row is taken as a header when its
// `correct` column is not a number.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "asc/platform/game.hpp"

namespace asc::runner {

class BadRow : public std::runtime_error {
 public:
  BadRow(std::size_t line, const std::string& why);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ContentScore {
  std::string id;
  long long correct = 0;
  long long n = 0;
  long long k = 0;
  platform::ChanceCorrected score;
};

std::vector<ContentScore> validate_content(std::string_view csv);
std::vector<ContentScore> validate_content_file(const std::filesystem::path& path);

// `id,correct,n,k,cc_percent,eligible` with a header row.
std::string format_report(const std::vector<ContentScore>& scores);

}  // namespace asc::runner
