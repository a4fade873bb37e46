#pragma once

// Arousal/valence plane shared by every analyzer and the platform engine.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace asc {

// Point in the signed plane [-1, 1]^2.
struct AVPoint {
  double arousal = 0.0;
  double valence = 0.0;

  friend bool operator==(const AVPoint&, const AVPoint&) = default;
};

bool is_valid(const AVPoint& p);
double distance(const AVPoint& a, const AVPoint& b);
AVPoint clamp_unit(const AVPoint& p);

enum class Quadrant {
  pos_valence_high_arousal,
  neg_valence_high_arousal,
  neg_valence_low_arousal,
  pos_valence_low_arousal,
};

// Sign-based; a zero coordinate counts as positive.
Quadrant quadrant(const AVPoint& p);
std::string_view to_string(Quadrant q);

enum class Modality { face, voice, body, fused };

std::string_view to_string(Modality m);
std::optional<Modality> parse_modality(std::string_view text);

class VocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EmotionEntry {
  std::string label;
  AVPoint canonical;
};

// The 20 platform emotions with their canonical points. Order is the
// learning-unit order.
class EmotionVocabulary {
 public:
  static constexpr std::size_t kSize = 20;

  // Built-in table.
  static const EmotionVocabulary& standard();

  // Validates count, uniqueness and that every point lies strictly inside
  // its quadrant.
  explicit EmotionVocabulary(std::vector<EmotionEntry> entries);

  bool contains(std::string_view label) const;
  // Throws VocabularyError for unknown labels.
  const EmotionEntry& at(std::string_view label) const;
  const std::vector<EmotionEntry>& entries() const { return entries_; }

  // Copy with some canonical points replaced.
  EmotionVocabulary with_overrides(const std::vector<EmotionEntry>& overrides) const;

 private:
  std::vector<EmotionEntry> entries_;
};

// The six basic emotions used by the body classifier and their vocabulary
// counterparts ("anger" -> "angry", ...).
inline constexpr std::array<std::string_view, 6> kBasicEmotions{
    "anger", "disgust", "fear", "happiness", "sadness", "surprise"};
std::string_view basic_to_vocabulary(std::string_view basic);

}  // namespace asc
