#pragma once

// Prosodic and energy descriptors of a spoken attempt, and their comparison
// with prototype utterances.

#include <array>
#include <cstddef>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "asc/affect.hpp"

namespace asc::voice {

enum class Errc { too_short, rate_too_low, empty_library, invalid_clip, bad_wav, bad_library };

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

struct AudioClip {
  std::vector<double> samples;  // normalized to [-1, 1]
  int sample_rate_hz = 16000;
};

// Throws Error(invalid_clip) if empty, non-finite or rate <= 0.
void validate(const AudioClip& clip);

struct FrameSet {
  int sample_rate_hz = 0;
  std::size_t frame_length = 0;
  std::size_t hop_length = 0;
  double hop_ms = 0.0;
  std::size_t count = 0;
  std::vector<double> raw;       // count x frame_length, unwindowed
  std::vector<double> windowed;  // count x frame_length, Hann

  std::span<const double> raw_frame(std::size_t i) const {
    return {raw.data() + i * frame_length, frame_length};
  }
  std::span<const double> windowed_frame(std::size_t i) const {
    return {windowed.data() + i * frame_length, frame_length};
  }
};

// count = 1 + floor((N - frame) / hop). Throws Error(too_short).
FrameSet frame_signal(const AudioClip& clip, double frame_ms = 25.0, double hop_ms = 10.0);

double rms_energy(std::span<const double> frame);

inline constexpr std::size_t kBandCount = 8;
inline constexpr std::array<double, kBandCount + 1> kBandEdgesHz{20, 50, 125, 315, 800, 1600, 3200, 5000, 8000};
using BandEnergies = std::array<double, kBandCount>;

// Magnitude-squared DFT of the frame summed per band. Bin k (frequency
// k * rate / N) belongs to band b when edge[b] <= f < edge[b+1]; the last
// band also takes f == 8 kHz. Throws Error(rate_too_low) below 16 kHz.
BandEnergies band_energies(std::span<const double> frame, int sample_rate_hz);

// Per-frame F0 in Hz, 0 for unvoiced frames. Normalized autocorrelation of
// the unwindowed samples over lags for 50-600 Hz; voiced iff the chosen peak
// is >= 0.45 and the frame RMS is >= 0.01.
std::vector<double> f0_contour(const FrameSet& frames);

inline constexpr double kMinF0Hz = 50.0;
inline constexpr double kMaxF0Hz = 600.0;
inline constexpr double kVoicingThreshold = 0.45;
inline constexpr double kVoicingMinRms = 0.01;

// Duration of the first run of voiced frames.
double f0_onset_length(std::span<const double> contour, double hop_ms);

struct VoiceParams {
  double mean_rms = 0.0;
  BandEnergies band_energies{};
  double f0_mean_hz = 0.0;
  double f0_std_hz = 0.0;
  double f0_onset_len_ms = 0.0;
  double voiced_ratio = 0.0;

  friend bool operator==(const VoiceParams&, const VoiceParams&) = default;
};

VoiceParams summarize(const AudioClip& clip);

// The five compared parameters, in feedback order.
inline constexpr std::size_t kComparedCount = 5;
inline constexpr std::array<std::string_view, kComparedCount> kComparedNames{
    "mean_rms", "f0_mean_hz", "f0_std_hz", "f0_onset_len_ms", "voiced_ratio"};
inline constexpr std::array<double, kComparedCount> kComparisonScales{0.1, 100.0, 50.0, 200.0, 0.5};

std::array<double, kComparedCount> compared_values(const VoiceParams& p);

enum class Light { green, yellow, red };

std::string_view to_string(Light l);
// green iff d <= 0.25, yellow iff 0.25 < d <= 0.5, red otherwise.
Light light_for(double distance);

struct PrototypeEntry {
  std::string label;
  VoiceParams reference;
  AVPoint canonical;
  std::filesystem::path clip_path;
};

struct TrafficFeedback {
  std::array<double, kComparedCount> distances{};
  std::array<Light, kComparedCount> lights{};
  double overall = 0.0;
  Light overall_light = Light::green;
};

TrafficFeedback compare_to_prototype(const VoiceParams& p, const PrototypeEntry& ref);

struct Estimate {
  std::string label;
  AVPoint point;
  double distance = 0.0;
};

// Nearest prototype by overall distance (ties: smallest label). The point is
// the winner's canonical point scaled toward neutral by 1 - min(D, 1).
Estimate estimate_emotion(const VoiceParams& p, std::span<const PrototypeEntry> library);

}  // namespace asc::voice
