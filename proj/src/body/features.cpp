#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "asc/body/body.hpp"

namespace asc::body {
namespace {

constexpr double kMinPathMeters = 1e-3;
constexpr double kZeroAcceleration = 1e-9;
constexpr double kMinShoulderWidth = 1e-6;

constexpr std::array<Joint, 2> kHands{Joint::l_hand, Joint::r_hand};
constexpr std::array<Joint, 1> kHead{Joint::head};
constexpr std::array<Joint, 9> kUpperBody{Joint::head,    Joint::neck,    Joint::l_shoulder,
                                          Joint::r_shoulder, Joint::l_elbow, Joint::r_elbow,
                                          Joint::l_hand,  Joint::r_hand,  Joint::torso};

Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator/(const Vec3& a, double s) { return {a.x / s, a.y / s, a.z / s}; }
double norm2(const Vec3& v) { return v.x * v.x + v.y * v.y + v.z * v.z; }
double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::too_few_frames: return "TooFewFrames";
    case Errc::non_monotone_timestamps: return "NonMonotoneTimestamps";
    case Errc::missing_label: return "MissingLabel";
    case Errc::unknown_label: return "UnknownLabel";
    case Errc::untrained_model: return "UntrainedModel";
    case Errc::bad_trace: return "BadTrace";
    case Errc::bad_model: return "BadModel";
  }
  return "?";
}

void check_timestamps(std::span<const SkeletonFrame> trace) {
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (!(trace[i].timestamp_ms > trace[i - 1].timestamp_ms)) {
      throw Error(Errc::non_monotone_timestamps,
                  "timestamp " + std::to_string(trace[i].timestamp_ms) + " does not increase");
    }
  }
}

std::vector<double> seconds(std::span<const SkeletonFrame> trace) {
  std::vector<double> t(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) t[i] = trace[i].timestamp_ms / 1000.0;
  return t;
}

// Central differences inside, one-sided at the ends.
std::vector<Vec3> differentiate(std::span<const Vec3> p, std::span<const double> t) {
  const std::size_t n = p.size();
  std::vector<Vec3> d(n);
  if (n < 2) return d;
  d[0] = (p[1] - p[0]) / (t[1] - t[0]);
  d[n - 1] = (p[n - 1] - p[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (p[i + 1] - p[i - 1]) / (t[i + 1] - t[i - 1]);
  return d;
}

std::vector<Vec3> track(std::span<const SkeletonFrame> trace, Joint j) {
  std::vector<Vec3> out(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) out[i] = trace[i][j];
  return out;
}

double path_length(std::span<const Vec3> p) {
  double len = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) len += norm(p[i] - p[i - 1]);
  return len;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Largest single-sided DFT amplitude (k >= 1) of a mean-removed series.
double dominant_amplitude(std::vector<double> series) {
  const std::size_t n = series.size();
  if (n < 3) return 0.0;
  // Relative to the first sample, so a still series is exactly zero.
  const double origin = series.front();
  for (auto& v : series) v -= origin;
  const double m = mean_of(series);
  for (auto& v : series) v -= m;
  double best = 0.0;
  for (std::size_t k = 1; k <= n / 2; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += series[t] * std::polar(1.0, angle);
    }
    // Nyquist bin is not mirrored.
    const double scale = (2 * k == n) ? 1.0 : 2.0;
    best = std::max(best, scale * std::abs(acc) / static_cast<double>(n));
  }
  return best;
}

template <std::size_t N>
double group_kinetic_energy(const std::array<std::vector<Vec3>, kJointCount>& velocity,
                            const std::array<Joint, N>& group) {
  double total = 0.0;
  std::size_t count = 0;
  for (Joint j : group) {
    for (const auto& v : velocity[static_cast<std::size_t>(j)]) {
      total += 0.5 * norm2(v);
      ++count;
    }
  }
  return count ? total / static_cast<double>(count) : 0.0;
}

}  // namespace

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

std::string_view to_string(Joint j) {
  static constexpr std::array<std::string_view, kJointCount> names{
      "head", "neck", "l_shoulder", "r_shoulder", "l_elbow", "r_elbow",
      "l_hand", "r_hand", "torso", "l_hip", "r_hip"};
  return names[static_cast<std::size_t>(j)];
}

std::optional<Joint> parse_joint(std::string_view name) {
  for (std::size_t i = 0; i < kJointCount; ++i) {
    if (to_string(static_cast<Joint>(i)) == name) return static_cast<Joint>(i);
  }
  return std::nullopt;
}

std::array<double, kFeatureCount> BodyFeatures::to_array() const {
  return {ke_hands, ke_head, ke_upper, symmetry, lean_angle, directness, impulsivity, fluidity, openness, sway};
}

BodyFeatures BodyFeatures::from_array(std::span<const double, kFeatureCount> v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9]};
}

BodyFeatures extract_features(std::span<const SkeletonFrame> trace) {
  if (trace.size() < 3) throw Error(Errc::too_few_frames, "need at least 3 frames");
  check_timestamps(trace);
  if (trace.back().timestamp_ms - trace.front().timestamp_ms < 200.0) {
    throw Error(Errc::too_few_frames, "trace spans less than 200 ms");
  }
  const auto t = seconds(trace);
  const double duration = t.back() - t.front();

  std::array<std::vector<Vec3>, kJointCount> velocity;
  for (std::size_t j = 0; j < kJointCount; ++j) {
    velocity[j] = differentiate(track(trace, static_cast<Joint>(j)), t);
  }

  BodyFeatures f;
  f.ke_hands = group_kinetic_energy(velocity, kHands);
  f.ke_head = group_kinetic_energy(velocity, kHead);
  f.ke_upper = group_kinetic_energy(velocity, kUpperBody);

  double shoulder_width = 0.0;
  for (const auto& fr : trace) shoulder_width += norm(fr[Joint::l_shoulder] - fr[Joint::r_shoulder]);
  shoulder_width /= static_cast<double>(trace.size());
  if (shoulder_width < kMinShoulderWidth) shoulder_width = 1.0;

  // Left hand against the right hand mirrored through the torso's sagittal
  // plane (x = torso.x).
  double mirror_gap = 0.0;
  double span = 0.0;
  double lean = 0.0;
  for (const auto& fr : trace) {
    const Vec3& torso = fr[Joint::torso];
    const Vec3& r = fr[Joint::r_hand];
    const Vec3 mirrored{2.0 * torso.x - r.x, r.y, r.z};
    mirror_gap += norm(fr[Joint::l_hand] - mirrored);
    span += 0.5 * (norm(fr[Joint::l_hand] - torso) + norm(fr[Joint::r_hand] - torso));
    const Vec3 up = fr[Joint::neck] - torso;
    lean += std::atan2(up.z, up.y);
  }
  const auto n = static_cast<double>(trace.size());
  f.symmetry = 1.0 - std::min(1.0, (mirror_gap / n) / shoulder_width);
  f.openness = std::clamp((span / n) / shoulder_width / 3.0, 0.0, 1.0);
  f.lean_angle = lean / n;

  const auto left = track(trace, Joint::l_hand);
  const auto right = track(trace, Joint::r_hand);
  const double left_path = path_length(left);
  const double right_path = path_length(right);
  const bool right_dominant = right_path >= left_path;
  const auto& hand = right_dominant ? right : left;
  const double path = right_dominant ? right_path : left_path;
  const auto& hand_velocity = velocity[static_cast<std::size_t>(right_dominant ? Joint::r_hand : Joint::l_hand)];

  f.directness = path < kMinPathMeters ? 1.0 : norm(hand.back() - hand.front()) / path;

  const auto accel = differentiate(hand_velocity, t);
  const auto jerk = differentiate(accel, t);
  double accel_max = 0.0;
  double accel_sum = 0.0;
  for (const auto& a : accel) {
    const double m = norm(a);
    accel_max = std::max(accel_max, m);
    accel_sum += m;
  }
  const double accel_mean = accel_sum / n;
  f.impulsivity = accel_mean < kZeroAcceleration ? 1.0 : accel_max / accel_mean;

  double jerk_mean = 0.0;
  for (const auto& j : jerk) jerk_mean += norm(j);
  jerk_mean /= n;
  // Dimensionless: jerk * duration^3 / path length.
  const double normalized_jerk = path < kMinPathMeters ? 0.0 : jerk_mean * duration * duration * duration / path;
  f.fluidity = 1.0 / (1.0 + normalized_jerk);

  std::vector<double> sway_x(trace.size());
  std::vector<double> sway_z(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    sway_x[i] = trace[i][Joint::torso].x;
    sway_z[i] = trace[i][Joint::torso].z;
  }
  f.sway = std::max(dominant_amplitude(std::move(sway_x)), dominant_amplitude(std::move(sway_z)));
  return f;
}

std::vector<double> kinetic_energy_profile(std::span<const SkeletonFrame> trace) {
  std::vector<double> energy(trace.size(), 0.0);
  if (trace.size() < 2) return energy;
  check_timestamps(trace);
  const auto t = seconds(trace);
  for (std::size_t j = 0; j < kJointCount; ++j) {
    const auto v = differentiate(track(trace, static_cast<Joint>(j)), t);
    for (std::size_t i = 0; i < v.size(); ++i) energy[i] += 0.5 * norm2(v[i]);
  }
  return energy;
}

std::vector<Segment> segment_gestures(std::span<const SkeletonFrame> trace, const SegmentationOptions& options) {
  std::vector<Segment> segments;
  if (trace.size() < 2) return segments;
  const auto energy = kinetic_energy_profile(trace);
  const double first = trace.front().timestamp_ms;
  const double last = trace.back().timestamp_ms;
  std::size_t i = 0;
  while (i < energy.size()) {
    if (energy[i] <= options.energy_threshold) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < energy.size() && energy[j + 1] > options.energy_threshold) ++j;
    const double start = trace[i].timestamp_ms;
    const double end = trace[j].timestamp_ms;
    if (end - start >= options.min_duration_ms) {
      Segment s{std::max(first, start - options.padding_ms), std::min(last, end + options.padding_ms)};
      if (!segments.empty() && s.start_ms <= segments.back().end_ms) {
        segments.back().end_ms = std::max(segments.back().end_ms, s.end_ms);
      } else {
        segments.push_back(s);
      }
    }
    i = j + 1;
  }
  return segments;
}

Trace slice(std::span<const SkeletonFrame> trace, const Segment& segment) {
  Trace out;
  for (const auto& fr : trace) {
    if (fr.timestamp_ms >= segment.start_ms && fr.timestamp_ms <= segment.end_ms) out.push_back(fr);
  }
  return out;
}

}  // namespace asc::body
