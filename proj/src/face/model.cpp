#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "asc/face/face.hpp"
#include "asc/keyvalue.hpp"
#include "asc/simd/kernels.hpp"

namespace asc::face {
namespace {

std::string_view errc_name(Errc e) {
  switch (e) {
    case Errc::window_too_small: return "WindowTooSmall";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::degenerate_system: return "DegenerateSystem";
    case Errc::untrained_model: return "UntrainedModel";
    case Errc::bad_stream: return "BadStream";
    case Errc::bad_model: return "BadModel";
  }
  return "?";
}

std::string join(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

FeatureVector weights_from(const KeyValueFile& kv, const std::string& key) {
  const auto v = kv.require_doubles(key);
  if (v.size() != kFeatureCount) throw Error(Errc::bad_model, key + " needs 34 values");
  FeatureVector w{};
  std::copy(v.begin(), v.end(), w.begin());
  for (double x : w) {
    if (!std::isfinite(x)) throw Error(Errc::bad_model, key + " has a non-finite weight");
  }
  return w;
}

}  // namespace

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

PoseVariation pose_variation(std::span<const FaceFeatureFrame> frames, std::size_t window) {
  const std::size_t n = std::min(frames.size(), window);
  if (n < 2) throw Error(Errc::window_too_small, "pose variation needs at least 2 frames");
  const auto recent = frames.last(n);
  std::array<double, 3> mean{};
  for (const auto& f : recent) {
    for (std::size_t a = 0; a < 3; ++a) mean[a] += f.features[kPoseSlot + a];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  std::array<double, 3> ss{};
  for (const auto& f : recent) {
    for (std::size_t a = 0; a < 3; ++a) {
      const double d = f.features[kPoseSlot + a] - mean[a];
      ss[a] += d * d;
    }
  }
  const double denom = static_cast<double>(n - 1);
  return {std::sqrt(ss[0] / denom), std::sqrt(ss[1] / denom), std::sqrt(ss[2] / denom)};
}

std::vector<double> ridge_fit(std::span<const double> X, std::size_t d, std::span<const double> y, double lambda) {
  const std::size_t n = y.size();
  if (n == 0) throw Error(Errc::dimension_mismatch, "no training rows");
  if (d == 0 || X.size() != n * d) throw Error(Errc::dimension_mismatch, "design matrix is not n x d");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(Errc::dimension_mismatch, "lambda must be >= 0");
  for (double v : X) {
    if (!std::isfinite(v)) throw Error(Errc::dimension_mismatch, "non-finite feature");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw Error(Errc::dimension_mismatch, "non-finite target");
  }

  using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const Matrix> Xm(X.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::Map<const Eigen::VectorXd> ym(y.data(), static_cast<Eigen::Index>(n));

  const Eigen::RowVectorXd x_mean = Xm.colwise().mean();
  const double y_mean = ym.mean();
  const Eigen::MatrixXd Xc = Xm.rowwise() - x_mean;
  const Eigen::VectorXd yc = ym.array() - y_mean;

  Eigen::VectorXd w;
  if (lambda == 0.0) {
    // Solve the least-squares problem directly; squaring the condition number
    // through the normal equations costs digits we need.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xc);
    if (qr.rank() < static_cast<Eigen::Index>(d)) {
      throw Error(Errc::degenerate_system, "centered design has rank " + std::to_string(qr.rank()) + " < " +
                                               std::to_string(d) + " and lambda is 0");
    }
    w = qr.solve(yc);
  } else {
    Eigen::MatrixXd A = Xc.transpose() * Xc;
    A.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) throw Error(Errc::degenerate_system, "normal equations not positive definite");
    w = llt.solve(Xc.transpose() * yc);
  }

  std::vector<double> out(w.data(), w.data() + d);
  out.push_back(y_mean - x_mean.dot(w));
  return out;
}

LinearAVModel train_model(std::span<const TrainingRow> rows, double lambda) {
  if (rows.empty()) throw Error(Errc::dimension_mismatch, "no training rows");
  std::vector<double> X;
  X.reserve(rows.size() * kFeatureCount);
  std::vector<double> valence;
  std::vector<double> arousal;
  for (const auto& r : rows) {
    X.insert(X.end(), r.features.begin(), r.features.end());
    valence.push_back(r.valence);
    arousal.push_back(r.arousal);
  }
  const auto wv = ridge_fit(X, kFeatureCount, valence, lambda);
  const auto wa = ridge_fit(X, kFeatureCount, arousal, lambda);
  LinearAVModel m;
  std::copy_n(wv.begin(), kFeatureCount, m.valence_weights.begin());
  std::copy_n(wa.begin(), kFeatureCount, m.arousal_weights.begin());
  m.valence_bias = wv.back();
  m.arousal_bias = wa.back();
  m.lambda = lambda;
  m.trained = true;
  return m;
}

AVPoint LinearAVModel::raw(const FeatureVector& x) const {
  return {simd::dot(arousal_weights, x) + arousal_bias, simd::dot(valence_weights, x) + valence_bias};
}

void LinearAVModel::save(const std::filesystem::path& path) const {
  if (!trained) throw Error(Errc::untrained_model, "nothing to save");
  KeyValueFile kv;
  kv.set("kind", "face-linear-av");
  kv.set("lambda", format_double(lambda));
  kv.set("valence_weights", join(valence_weights));
  kv.set("valence_bias", format_double(valence_bias));
  kv.set("arousal_weights", join(arousal_weights));
  kv.set("arousal_bias", format_double(arousal_bias));
  kv.save(path);
}

LinearAVModel LinearAVModel::load(const std::filesystem::path& path) {
  LinearAVModel m;
  try {
    const auto kv = KeyValueFile::load(path);
    if (kv.get("kind") != "face-linear-av") throw Error(Errc::bad_model, "not a face model");
    m.lambda = kv.get_double("lambda", 1.0);
    m.valence_weights = weights_from(kv, "valence_weights");
    m.arousal_weights = weights_from(kv, "arousal_weights");
    m.valence_bias = kv.require_double("valence_bias");
    m.arousal_bias = kv.require_double("arousal_bias");
    if (!std::isfinite(m.valence_bias) || !std::isfinite(m.arousal_bias)) {
      throw Error(Errc::bad_model, "non-finite bias");
    }
  } catch (const KeyValueError& e) {
    throw Error(Errc::bad_model, e.what());
  }
  m.trained = true;
  return m;
}

AVPoint predict_once(const FeatureVector& x, const LinearAVModel& model) {
  if (!model.trained) throw Error(Errc::untrained_model, "model is not trained");
  return clamp_unit(model.raw(x));
}

AVPredictor::AVPredictor(const LinearAVModel& model) : model_(&model) {}

AVPoint AVPredictor::predict(const FaceFeatureFrame& frame) {
  const AVPoint now = predict_once(frame.features, *model_);
  if (!last_) {
    last_ = now;
    return now;
  }
  const AVPoint smoothed{kAlpha * now.arousal + (1.0 - kAlpha) * last_->arousal,
                         kAlpha * now.valence + (1.0 - kAlpha) * last_->valence};
  last_ = smoothed;
  return smoothed;
}

}  // namespace asc::face
