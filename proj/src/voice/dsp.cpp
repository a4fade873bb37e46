#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>

#include "asc/simd/kernels.hpp"
#include "asc/voice/voice.hpp"

namespace asc::voice {
namespace {

std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::too_short: return "TooShort";
    case Errc::rate_too_low: return "RateTooLow";
    case Errc::empty_library: return "EmptyLibrary";
    case Errc::invalid_clip: return "InvalidClip";
    case Errc::bad_wav: return "BadWav";
    case Errc::bad_library: return "BadLibrary";
  }
  return "?";
}

// Real DFT basis for one frame length: rows k = 0..N/2 of cos and sin.
struct DftBasis {
  std::size_t n = 0;
  std::size_t bins = 0;
  std::vector<double> cos_rows;
  std::vector<double> sin_rows;

  explicit DftBasis(std::size_t length) : n(length), bins(length / 2 + 1) {
    cos_rows.resize(bins * n);
    sin_rows.resize(bins * n);
    for (std::size_t k = 0; k < bins; ++k) {
      for (std::size_t t = 0; t < n; ++t) {
        // Reduce k*t mod n first so the angle stays accurate.
        const auto phase = static_cast<double>((k * t) % n);
        const double angle = 2.0 * std::numbers::pi * phase / static_cast<double>(n);
        cos_rows[k * n + t] = std::cos(angle);
        sin_rows[k * n + t] = std::sin(angle);
      }
    }
  }
};

const DftBasis& basis_for(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<DftBasis>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<DftBasis>(n);
  return *slot;
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) return w;
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  return w;
}

// Normalized autocorrelation of x at lag tau over the overlapping part.
double normalized_acf(std::span<const double> x, std::size_t tau) {
  const std::size_t m = x.size() - tau;
  const auto head = x.subspan(0, m);
  const auto tail = x.subspan(tau, m);
  const double num = simd::dot(head, tail);
  const double den = std::sqrt(simd::sum_squares(head) * simd::sum_squares(tail));
  return den > 0.0 ? num / den : 0.0;
}

double frame_f0(std::span<const double> x, int rate) {
  if (rms_energy(x) < kVoicingMinRms) return 0.0;
  const auto min_lag = static_cast<std::size_t>(std::floor(rate / kMaxF0Hz));
  auto max_lag = static_cast<std::size_t>(std::ceil(rate / kMinF0Hz));
  // Keep at least a quarter of the frame overlapping.
  max_lag = std::min(max_lag, x.size() - x.size() / 4);
  if (max_lag <= min_lag + 2) return 0.0;

  std::vector<double> r(max_lag + 2, 0.0);
  for (std::size_t tau = min_lag; tau <= max_lag + 1 && tau < x.size(); ++tau) {
    r[tau] = normalized_acf(x, tau);
  }
  double best = -1.0;
  for (std::size_t tau = min_lag + 1; tau <= max_lag; ++tau) best = std::max(best, r[tau]);
  if (best < kVoicingThreshold) return 0.0;

  // First interior local maximum close to the global best; later peaks at
  // multiples of the period score almost as high.
  for (std::size_t tau = min_lag + 1; tau <= max_lag; ++tau) {
    const bool local_max = r[tau] >= r[tau - 1] && r[tau] >= r[tau + 1];
    if (!local_max || r[tau] < 0.9 * best || r[tau] < kVoicingThreshold) continue;
    const double denom = r[tau - 1] - 2.0 * r[tau] + r[tau + 1];
    double offset = 0.0;
    if (denom < 0.0) offset = std::clamp(0.5 * (r[tau - 1] - r[tau + 1]) / denom, -0.5, 0.5);
    const double f0 = rate / (static_cast<double>(tau) + offset);
    return (f0 >= kMinF0Hz && f0 <= kMaxF0Hz) ? f0 : 0.0;
  }
  return 0.0;
}

}  // namespace

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

void validate(const AudioClip& clip) {
  if (clip.sample_rate_hz <= 0) throw Error(Errc::invalid_clip, "sample rate must be positive");
  if (clip.samples.empty()) throw Error(Errc::invalid_clip, "empty clip");
  for (double s : clip.samples) {
    if (!std::isfinite(s)) throw Error(Errc::invalid_clip, "non-finite sample");
  }
}

FrameSet frame_signal(const AudioClip& clip, double frame_ms, double hop_ms) {
  validate(clip);
  FrameSet fs;
  fs.sample_rate_hz = clip.sample_rate_hz;
  fs.frame_length = static_cast<std::size_t>(std::lround(clip.sample_rate_hz * frame_ms / 1000.0));
  fs.hop_length = static_cast<std::size_t>(std::lround(clip.sample_rate_hz * hop_ms / 1000.0));
  fs.hop_ms = hop_ms;
  if (fs.frame_length == 0 || fs.hop_length == 0) throw Error(Errc::too_short, "frame or hop rounds to zero samples");
  const std::size_t n = clip.samples.size();
  if (n < fs.frame_length) {
    throw Error(Errc::too_short, std::to_string(n) + " samples, need at least " + std::to_string(fs.frame_length));
  }
  fs.count = 1 + (n - fs.frame_length) / fs.hop_length;
  fs.raw.resize(fs.count * fs.frame_length);
  fs.windowed.resize(fs.raw.size());
  const auto window = hann(fs.frame_length);
  for (std::size_t i = 0; i < fs.count; ++i) {
    const double* src = clip.samples.data() + i * fs.hop_length;
    double* raw = fs.raw.data() + i * fs.frame_length;
    std::copy(src, src + fs.frame_length, raw);
    simd::multiply({raw, fs.frame_length}, window, {fs.windowed.data() + i * fs.frame_length, fs.frame_length});
  }
  return fs;
}

double rms_energy(std::span<const double> frame) {
  if (frame.empty()) return 0.0;
  return std::sqrt(simd::sum_squares(frame) / static_cast<double>(frame.size()));
}

BandEnergies band_energies(std::span<const double> frame, int sample_rate_hz) {
  if (sample_rate_hz < 16000) {
    throw Error(Errc::rate_too_low, std::to_string(sample_rate_hz) + " Hz < 16000 Hz");
  }
  BandEnergies bands{};
  if (frame.empty()) return bands;
  const auto& basis = basis_for(frame.size());
  const double bin_hz = static_cast<double>(sample_rate_hz) / static_cast<double>(frame.size());
  for (std::size_t k = 0; k < basis.bins; ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    if (f < kBandEdgesHz.front() || f > kBandEdgesHz.back()) continue;
    std::size_t band = kBandCount - 1;
    for (std::size_t b = 0; b < kBandCount; ++b) {
      if (f < kBandEdgesHz[b + 1]) {
        band = b;
        break;
      }
    }
    const double re = simd::dot(frame, {basis.cos_rows.data() + k * basis.n, basis.n});
    const double im = simd::dot(frame, {basis.sin_rows.data() + k * basis.n, basis.n});
    bands[band] += re * re + im * im;
  }
  return bands;
}

std::vector<double> f0_contour(const FrameSet& frames) {
  std::vector<double> contour(frames.count, 0.0);
  for (std::size_t i = 0; i < frames.count; ++i) {
    contour[i] = frame_f0(frames.raw_frame(i), frames.sample_rate_hz);
  }
  return contour;
}

double f0_onset_length(std::span<const double> contour, double hop_ms) {
  auto first = std::find_if(contour.begin(), contour.end(), [](double f) { return f > 0.0; });
  auto end = std::find_if(first, contour.end(), [](double f) { return f <= 0.0; });
  return static_cast<double>(std::distance(first, end)) * hop_ms;
}

VoiceParams summarize(const AudioClip& clip) {
  const auto frames = frame_signal(clip);
  VoiceParams p;
  double rms_sum = 0.0;
  for (std::size_t i = 0; i < frames.count; ++i) {
    rms_sum += rms_energy(frames.raw_frame(i));
    const auto bands = band_energies(frames.windowed_frame(i), frames.sample_rate_hz);
    for (std::size_t b = 0; b < kBandCount; ++b) p.band_energies[b] += bands[b];
  }
  const auto count = static_cast<double>(frames.count);
  p.mean_rms = rms_sum / count;
  for (auto& e : p.band_energies) e /= count;

  const auto contour = f0_contour(frames);
  std::vector<double> voiced;
  std::copy_if(contour.begin(), contour.end(), std::back_inserter(voiced), [](double f) { return f > 0.0; });
  p.voiced_ratio = static_cast<double>(voiced.size()) / count;
  if (!voiced.empty()) {
    const double mean = std::accumulate(voiced.begin(), voiced.end(), 0.0) / static_cast<double>(voiced.size());
    double var = 0.0;
    for (double f : voiced) var += (f - mean) * (f - mean);
    p.f0_mean_hz = mean;
    p.f0_std_hz = std::sqrt(var / static_cast<double>(voiced.size()));
  }
  p.f0_onset_len_ms = f0_onset_length(contour, frames.hop_ms);
  return p;
}

std::array<double, kComparedCount> compared_values(const VoiceParams& p) {
  return {p.mean_rms, p.f0_mean_hz, p.f0_std_hz, p.f0_onset_len_ms, p.voiced_ratio};
}

std::string_view to_string(Light l) {
  switch (l) {
    case Light::green: return "green";
    case Light::yellow: return "yellow";
    case Light::red: return "red";
  }
  return "?";
}

Light light_for(double d) {
  if (d <= 0.25) return Light::green;
  if (d <= 0.5) return Light::yellow;
  return Light::red;
}

TrafficFeedback compare_to_prototype(const VoiceParams& p, const PrototypeEntry& ref) {
  const auto x = compared_values(p);
  const auto r = compared_values(ref.reference);
  TrafficFeedback fb;
  double sum = 0.0;
  for (std::size_t i = 0; i < kComparedCount; ++i) {
    fb.distances[i] = std::abs(x[i] - r[i]) / kComparisonScales[i];
    fb.lights[i] = light_for(fb.distances[i]);
    sum += fb.distances[i];
  }
  fb.overall = sum / static_cast<double>(kComparedCount);
  fb.overall_light = light_for(fb.overall);
  return fb;
}

Estimate estimate_emotion(const VoiceParams& p, std::span<const PrototypeEntry> library) {
  if (library.empty()) throw Error(Errc::empty_library, "no prototypes loaded");
  const PrototypeEntry* best = nullptr;
  double best_d = 0.0;
  for (const auto& entry : library) {
    const double d = compare_to_prototype(p, entry).overall;
    if (!best || d < best_d || (d == best_d && entry.label < best->label)) {
      best = &entry;
      best_d = d;
    }
  }
  const double keep = 1.0 - std::min(best_d, 1.0);
  return {best->label, AVPoint{best->canonical.arousal * keep, best->canonical.valence * keep}, best_d};
}

}  // namespace asc::voice
