#pragma once

// Expressive full-body features from skeleton traces, gesture segmentation
// and a nearest-centroid classifier over the six basic emotions.
//
// Coordinates are meters in the subject's frame: +x to the subject's right,
// +y up, +z in the direction the subject faces.

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "asc/affect.hpp"

namespace asc::body {

enum class Errc {
  too_few_frames,
  non_monotone_timestamps,
  missing_label,
  unknown_label,
  untrained_model,
  bad_trace,
  bad_model,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

enum class Joint {
  head,
  neck,
  l_shoulder,
  r_shoulder,
  l_elbow,
  r_elbow,
  l_hand,
  r_hand,
  torso,
  l_hip,
  r_hip,
};

inline constexpr std::size_t kJointCount = 11;
std::string_view to_string(Joint j);
std::optional<Joint> parse_joint(std::string_view name);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

struct SkeletonFrame {
  double timestamp_ms = 0.0;
  std::array<Vec3, kJointCount> joints{};

  Vec3& operator[](Joint j) { return joints[static_cast<std::size_t>(j)]; }
  const Vec3& operator[](Joint j) const { return joints[static_cast<std::size_t>(j)]; }

  friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

using Trace = std::vector<SkeletonFrame>;

inline constexpr std::size_t kFeatureCount = 10;

struct BodyFeatures {
  double ke_hands = 0.0;
  double ke_head = 0.0;
  double ke_upper = 0.0;
  double symmetry = 1.0;
  double lean_angle = 0.0;
  double directness = 1.0;
  double impulsivity = 1.0;
  double fluidity = 1.0;
  double openness = 0.0;
  double sway = 0.0;

  std::array<double, kFeatureCount> to_array() const;
  static BodyFeatures from_array(std::span<const double, kFeatureCount> v);
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "ke_hands", "ke_head", "ke_upper", "symmetry", "lean_angle",
    "directness", "impulsivity", "fluidity", "openness", "sway"};

// Needs >= 3 frames spanning >= 200 ms with strictly increasing timestamps.
BodyFeatures extract_features(std::span<const SkeletonFrame> trace);

// Whole-body kinetic energy per frame (unit masses, sum over all joints).
std::vector<double> kinetic_energy_profile(std::span<const SkeletonFrame> trace);

struct Segment {
  double start_ms = 0.0;
  double end_ms = 0.0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct SegmentationOptions {
  double energy_threshold = 0.01;
  double min_duration_ms = 300.0;
  double padding_ms = 100.0;
};

// Runs of frames whose energy exceeds the threshold for at least the minimum
// duration, padded and clamped to the stream. Overlapping padded segments
// are merged, so the output is ordered and disjoint.
std::vector<Segment> segment_gestures(std::span<const SkeletonFrame> trace,
                                      const SegmentationOptions& options = {});

// Frames whose timestamps fall inside the segment.
Trace slice(std::span<const SkeletonFrame> trace, const Segment& segment);

struct LabeledFeatures {
  std::string label;  // one of kBasicEmotions
  BodyFeatures features;
};

class EmotionCentroidModel {
 public:
  bool trained() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::array<double, kFeatureCount>>& centroids() const { return centroids_; }
  const std::array<double, kFeatureCount>& mean() const { return mean_; }
  const std::array<double, kFeatureCount>& scale() const { return scale_; }

  std::array<double, kFeatureCount> scaled(const BodyFeatures& f) const;

  void save(const std::filesystem::path& path) const;
  static EmotionCentroidModel load(const std::filesystem::path& path);

  friend EmotionCentroidModel train_centroids(std::span<const LabeledFeatures> samples);
  friend bool operator==(const EmotionCentroidModel&, const EmotionCentroidModel&) = default;

 private:
  std::vector<std::string> labels_;  // sorted
  std::vector<std::array<double, kFeatureCount>> centroids_;
  std::array<double, kFeatureCount> mean_{};
  std::array<double, kFeatureCount> scale_{};
};

// Per-feature z-scaling over all samples (population std, 1 where constant),
// centroid = mean scaled vector per label. Throws Error(missing_label) unless
// all six basic emotions are present.
EmotionCentroidModel train_centroids(std::span<const LabeledFeatures> samples);

struct Classification {
  std::string label;             // basic emotion
  std::string vocabulary_label;  // platform emotion
  double confidence = 0.5;       // d2 / (d1 + d2)
  AVPoint point;
};

Classification classify(const BodyFeatures& features, const EmotionCentroidModel& model,
                        const EmotionVocabulary& vocabulary = EmotionVocabulary::standard());

// CSV with header `t_ms,joint,x,y,z`, one row per joint per frame.
Trace parse_trace_csv(std::string_view text);
Trace read_trace(const std::filesystem::path& path);
std::string format_trace_csv(std::span<const SkeletonFrame> trace);

}  // namespace asc::body
