#include "asc/affect.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace asc {

bool is_valid(const AVPoint& p) {
  return std::isfinite(p.arousal) && std::isfinite(p.valence) && std::abs(p.arousal) <= 1.0 &&
         std::abs(p.valence) <= 1.0;
}

double distance(const AVPoint& a, const AVPoint& b) {
  return std::hypot(a.arousal - b.arousal, a.valence - b.valence);
}

AVPoint clamp_unit(const AVPoint& p) {
  return {std::clamp(p.arousal, -1.0, 1.0), std::clamp(p.valence, -1.0, 1.0)};
}

Quadrant quadrant(const AVPoint& p) {
  const bool pos_valence = p.valence >= 0.0;
  const bool high_arousal = p.arousal >= 0.0;
  if (pos_valence) {
    return high_arousal ? Quadrant::pos_valence_high_arousal : Quadrant::pos_valence_low_arousal;
  }
  return high_arousal ? Quadrant::neg_valence_high_arousal : Quadrant::neg_valence_low_arousal;
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::pos_valence_high_arousal: return "pos_valence_high_arousal";
    case Quadrant::neg_valence_high_arousal: return "neg_valence_high_arousal";
    case Quadrant::neg_valence_low_arousal: return "neg_valence_low_arousal";
    case Quadrant::pos_valence_low_arousal: return "pos_valence_low_arousal";
  }
  return "?";
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::face: return "face";
    case Modality::voice: return "voice";
    case Modality::body: return "body";
    case Modality::fused: return "fused";
  }
  return "?";
}

std::optional<Modality> parse_modality(std::string_view text) {
  if (text == "face") return Modality::face;
  if (text == "voice") return Modality::voice;
  if (text == "body") return Modality::body;
  if (text == "fused") return Modality::fused;
  return std::nullopt;
}

namespace {

// {label, valence, arousal}
struct Row {
  const char* label;
  double valence;
  double arousal;
};

constexpr Row kStandardRows[] = {
    {"happy", 0.6, 0.5},         {"sad", -0.6, -0.5},        {"afraid", -0.6, 0.6},
    {"angry", -0.6, 0.7},        {"disgusted", -0.6, 0.3},   {"surprised", 0.3, 0.7},
    {"excited", 0.7, 0.8},       {"interested", 0.4, 0.3},   {"bored", -0.3, -0.6},
    {"worried", -0.4, 0.3},      {"disappointed", -0.5, -0.4}, {"frustrated", -0.5, 0.5},
    {"hurt", -0.6, -0.3},        {"kind", 0.5, -0.3},        {"jealous", -0.4, 0.4},
    {"unfriendly", -0.5, 0.2},   {"joking", 0.6, 0.4},       {"sneaky", -0.2, 0.3},
    {"ashamed", -0.4, -0.3},     {"proud", 0.5, 0.3},
};

bool strictly_inside_quadrant(const AVPoint& p) {
  return is_valid(p) && p.arousal != 0.0 && p.valence != 0.0;
}

}  // namespace

const EmotionVocabulary& EmotionVocabulary::standard() {
  static const EmotionVocabulary vocab = [] {
    std::vector<EmotionEntry> entries;
    for (const auto& row : kStandardRows) {
      entries.push_back({row.label, AVPoint{row.arousal, row.valence}});
    }
    return EmotionVocabulary(std::move(entries));
  }();
  return vocab;
}

EmotionVocabulary::EmotionVocabulary(std::vector<EmotionEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.size() != kSize) {
    throw VocabularyError("vocabulary must hold exactly 20 emotions, got " +
                          std::to_string(entries_.size()));
  }
  std::set<std::string> seen;
  for (const auto& e : entries_) {
    if (e.label.empty() || !seen.insert(e.label).second) {
      throw VocabularyError("duplicate or empty emotion label '" + e.label + "'");
    }
    if (!strictly_inside_quadrant(e.canonical)) {
      throw VocabularyError("canonical point of '" + e.label + "' is not strictly inside a quadrant");
    }
  }
}

bool EmotionVocabulary::contains(std::string_view label) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const EmotionEntry& e) { return e.label == label; });
}

const EmotionEntry& EmotionVocabulary::at(std::string_view label) const {
  for (const auto& e : entries_) {
    if (e.label == label) return e;
  }
  throw VocabularyError("unknown emotion '" + std::string(label) + "'");
}

EmotionVocabulary EmotionVocabulary::with_overrides(
    const std::vector<EmotionEntry>& overrides) const {
  auto entries = entries_;
  for (const auto& o : overrides) {
    auto it = std::find_if(entries.begin(), entries.end(),
                           [&](const EmotionEntry& e) { return e.label == o.label; });
    if (it == entries.end()) throw VocabularyError("unknown emotion '" + o.label + "'");
    it->canonical = o.canonical;
  }
  return EmotionVocabulary(std::move(entries));
}

std::string_view basic_to_vocabulary(std::string_view basic) {
  if (basic == "anger") return "angry";
  if (basic == "disgust") return "disgusted";
  if (basic == "fear") return "afraid";
  if (basic == "happiness") return "happy";
  if (basic == "sadness") return "sad";
  if (basic == "surprise") return "surprised";
  throw VocabularyError("not a basic emotion: '" + std::string(basic) + "'");
}

}  // namespace asc
