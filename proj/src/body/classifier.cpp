#include <algorithm>
#include <cmath>
#include <map>

#include "asc/body/body.hpp"
#include "asc/keyvalue.hpp"
#include "asc/simd/kernels.hpp"

namespace asc::body {
namespace {

constexpr double kConstantFeature = 1e-12;

std::string join(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

std::array<double, kFeatureCount> fixed(const std::vector<double>& v, const std::string& key) {
  if (v.size() != kFeatureCount) {
    throw Error(Errc::bad_model, key + " needs " + std::to_string(kFeatureCount) + " values");
  }
  std::array<double, kFeatureCount> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

std::array<double, kFeatureCount> EmotionCentroidModel::scaled(const BodyFeatures& f) const {
  auto v = f.to_array();
  for (std::size_t i = 0; i < kFeatureCount; ++i) v[i] = (v[i] - mean_[i]) / scale_[i];
  return v;
}

EmotionCentroidModel train_centroids(std::span<const LabeledFeatures> samples) {
  std::map<std::string, std::vector<std::array<double, kFeatureCount>>> by_label;
  for (const auto& s : samples) {
    if (std::find(kBasicEmotions.begin(), kBasicEmotions.end(), s.label) == kBasicEmotions.end()) {
      throw Error(Errc::unknown_label, "'" + s.label + "' is not a basic emotion");
    }
    by_label[s.label].push_back(s.features.to_array());
  }
  for (auto label : kBasicEmotions) {
    if (!by_label.count(std::string(label))) {
      throw Error(Errc::missing_label, "no training sample for '" + std::string(label) + "'");
    }
  }

  EmotionCentroidModel model;
  const auto n = static_cast<double>(samples.size());
  for (const auto& s : samples) {
    const auto v = s.features.to_array();
    for (std::size_t i = 0; i < kFeatureCount; ++i) model.mean_[i] += v[i];
  }
  for (auto& m : model.mean_) m /= n;
  std::array<double, kFeatureCount> var{};
  for (const auto& s : samples) {
    const auto v = s.features.to_array();
    for (std::size_t i = 0; i < kFeatureCount; ++i) var[i] += (v[i] - model.mean_[i]) * (v[i] - model.mean_[i]);
  }
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    const double sd = std::sqrt(var[i] / n);
    model.scale_[i] = sd > kConstantFeature ? sd : 1.0;
  }

  for (const auto& [label, vectors] : by_label) {  // std::map: sorted labels
    std::array<double, kFeatureCount> centroid{};
    for (const auto& v : vectors) {
      for (std::size_t i = 0; i < kFeatureCount; ++i) centroid[i] += (v[i] - model.mean_[i]) / model.scale_[i];
    }
    for (auto& c : centroid) c /= static_cast<double>(vectors.size());
    model.labels_.push_back(label);
    model.centroids_.push_back(centroid);
  }
  return model;
}

Classification classify(const BodyFeatures& features, const EmotionCentroidModel& model,
                        const EmotionVocabulary& vocabulary) {
  if (!model.trained()) throw Error(Errc::untrained_model, "model has no centroids");
  const auto x = model.scaled(features);
  double d1 = INFINITY;
  double d2 = INFINITY;
  std::size_t best = 0;
  for (std::size_t k = 0; k < model.labels().size(); ++k) {
    const double d = std::sqrt(simd::squared_distance(x, model.centroids()[k]));
    // Labels are sorted, so strict comparison keeps the smallest label on ties.
    if (d < d1) {
      d2 = d1;
      d1 = d;
      best = k;
    } else if (d < d2) {
      d2 = d;
    }
  }
  Classification c;
  c.label = model.labels()[best];
  c.vocabulary_label = std::string(basic_to_vocabulary(c.label));
  c.confidence = (d1 + d2) > 0.0 && std::isfinite(d2) ? d2 / (d1 + d2) : 0.5;
  c.point = vocabulary.at(c.vocabulary_label).canonical;
  return c;
}

void EmotionCentroidModel::save(const std::filesystem::path& path) const {
  if (!trained()) throw Error(Errc::untrained_model, "nothing to save");
  KeyValueFile kv;
  kv.set("kind", "body-centroids");
  std::string names;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    if (i) names += ", ";
    names += kFeatureNames[i];
  }
  kv.set("features", names);
  kv.set("feature_mean", join(mean_));
  kv.set("feature_scale", join(scale_));
  for (std::size_t k = 0; k < labels_.size(); ++k) kv.set("centroid." + labels_[k], join(centroids_[k]));
  kv.save(path);
}

EmotionCentroidModel EmotionCentroidModel::load(const std::filesystem::path& path) {
  EmotionCentroidModel model;
  try {
    const auto kv = KeyValueFile::load(path);
    if (kv.get("kind") != "body-centroids") throw Error(Errc::bad_model, "not a body centroid model");
    model.mean_ = fixed(kv.require_doubles("feature_mean"), "feature_mean");
    model.scale_ = fixed(kv.require_doubles("feature_scale"), "feature_scale");
    for (double s : model.scale_) {
      if (!(s > 0.0)) throw Error(Errc::bad_model, "feature_scale must be positive");
    }
    std::vector<std::string> labels(kBasicEmotions.begin(), kBasicEmotions.end());
    std::sort(labels.begin(), labels.end());
    for (const auto& label : labels) {
      const auto key = "centroid." + label;
      if (!kv.contains(key)) throw Error(Errc::missing_label, "model lacks " + key);
      model.centroids_.push_back(fixed(kv.require_doubles(key), key));
      model.labels_.push_back(label);
    }
  } catch (const KeyValueError& e) {
    throw Error(Errc::bad_model, e.what());
  }
  return model;
}

}  // namespace asc::body
