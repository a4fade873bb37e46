#pragma once

// Facial feature streams regressed onto the arousal/valence plane.
//
// Slot layout of the 34 features (1-based, as in the CSV headers):
//   1-28   per-frame expression descriptors
//   29-31  head pose yaw, pitch, roll
//   32-34  standard deviation of yaw, pitch, roll over the recent window

#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "asc/affect.hpp"

namespace asc::face {

enum class Errc {
  window_too_small,
  dimension_mismatch,
  degenerate_system,
  untrained_model,
  bad_stream,
  bad_model,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline constexpr std::size_t kFeatureCount = 34;
inline constexpr std::size_t kPoseSlot = 28;      // 0-based yaw index
inline constexpr std::size_t kPoseStdSlot = 31;   // 0-based std(yaw) index
inline constexpr std::size_t kPoseWindow = 30;

using FeatureVector = std::array<double, kFeatureCount>;

struct FaceFeatureFrame {
  double timestamp_ms = 0.0;
  FeatureVector features{};

  friend bool operator==(const FaceFeatureFrame&, const FaceFeatureFrame&) = default;
};

struct PoseVariation {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

// Sample (n - 1) standard deviation of the pose slots over the last `window`
// frames. Throws Error(window_too_small) with fewer than 2 frames.
PoseVariation pose_variation(std::span<const FaceFeatureFrame> frames, std::size_t window = kPoseWindow);

struct LinearAVModel {
  FeatureVector valence_weights{};
  FeatureVector arousal_weights{};
  double valence_bias = 0.0;
  double arousal_bias = 0.0;
  double lambda = 1.0;
  bool trained = false;

  // Raw affine outputs before clamping.
  AVPoint raw(const FeatureVector& x) const;

  void save(const std::filesystem::path& path) const;
  static LinearAVModel load(const std::filesystem::path& path);

  friend bool operator==(const LinearAVModel&, const LinearAVModel&) = default;
};

struct TrainingRow {
  FeatureVector features{};
  double valence = 0.0;
  double arousal = 0.0;
};

// Ridge regression per output with an unpenalized bias, fitted on centered
// data. lambda = 0 requires a full-rank centered design.
LinearAVModel train_model(std::span<const TrainingRow> rows, double lambda = 1.0);

// Generic form used by train_model: X is n x d row-major, y has n entries.
// Returns d weights followed by the bias.
std::vector<double> ridge_fit(std::span<const double> X, std::size_t d, std::span<const double> y, double lambda);

// Clamp then exponential smoothing, one instance per stream.
class AVPredictor {
 public:
  static constexpr double kAlpha = 0.3;

  explicit AVPredictor(const LinearAVModel& model);

  AVPoint predict(const FaceFeatureFrame& frame);
  void reset() { last_.reset(); }

 private:
  const LinearAVModel* model_;
  std::optional<AVPoint> last_;
};

// Stateless first-frame prediction: clamp(w.x + b).
AVPoint predict_once(const FeatureVector& x, const LinearAVModel& model);

// Keeps the recent pose window and overwrites slots 32-34 of each incoming
// frame (zeros until two frames are seen).
class StreamProcessor {
 public:
  FaceFeatureFrame push(FaceFeatureFrame frame);
  const std::deque<FaceFeatureFrame>& window() const { return window_; }

 private:
  std::deque<FaceFeatureFrame> window_;
};

// CSV: header `t_ms,f1,...,f34`. Timestamps must increase strictly.
std::vector<FaceFeatureFrame> parse_stream_csv(std::string_view text);
std::vector<FaceFeatureFrame> read_stream(const std::filesystem::path& path);
std::string format_stream_csv(std::span<const FaceFeatureFrame> frames);

// CSV: header `f1,...,f34,valence,arousal`.
std::vector<TrainingRow> parse_training_csv(std::string_view text);
std::vector<TrainingRow> read_training(const std::filesystem::path& path);
std::string format_training_csv(std::span<const TrainingRow> rows);

}  // namespace asc::face
