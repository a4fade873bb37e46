#pragma once

// Shared helpers for the test programs.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "asc/voice/voice.hpp"

namespace asc::test {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "asc") {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline voice::AudioClip sine(double hz, double seconds, double amplitude = 0.5, double phase = 0.0,
                             int rate = 16000) {
  voice::AudioClip clip;
  clip.sample_rate_hz = rate;
  const auto n = static_cast<std::size_t>(seconds * rate);
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / rate + phase);
  }
  return clip;
}

inline voice::AudioClip silence(double seconds, int rate = 16000) {
  voice::AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.assign(static_cast<std::size_t>(seconds * rate), 0.0);
  return clip;
}

}  // namespace asc::test
