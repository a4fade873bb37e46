#pragma once

// EmotionML subset used as the bus payload.
//
// Emitted dialect:
//
//   <emotionml xmlns="http://www.w3.org/2009/10/emotionml" version="1.0"
//              dimension-set="#asc-av">
//     <vocabulary type="dimension" id="asc-av">
//       <item name="arousal"/><item name="valence"/>
//     </vocabulary>
//     <emotion expressed-through="voice">
//       <category name="happy"/>
//       <dimension name="arousal" value="0.75"/>
//       <dimension name="valence" value="0.25"/>
//       <info timestamp-ms="1200" confidence="0.9">
//         <param name="f0_mean_hz" value="221.5"/>
//       </info>
//     </emotion>
//   </emotionml>
//
// Dimension values are on the unit interval; to_internal/from_internal map
// them to the signed arousal/valence plane.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "asc/affect.hpp"

namespace asc::emotionml {

enum class Errc { malformed_document, missing_dimension, value_out_of_range, invalid_annotation };

std::string_view to_string(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

struct Parameter {
  std::string name;
  double value = 0.0;

  friend bool operator==(const Parameter&, const Parameter&) = default;
};

struct EmotionAnnotation {
  Modality modality = Modality::fused;
  double arousal = 0.5;  // wire scale [0, 1]
  double valence = 0.5;  // wire scale [0, 1]
  std::optional<std::string> category;
  std::optional<double> confidence;
  std::int64_t timestamp_ms = 0;
  // Analyzer-specific descriptors (feature values, prototype distances).
  std::vector<Parameter> parameters;

  std::optional<double> parameter(std::string_view name) const;

  friend bool operator==(const EmotionAnnotation&, const EmotionAnnotation&) = default;
};

// Throws Error(invalid_annotation) when an invariant does not hold.
void validate(const EmotionAnnotation& a);

std::vector<EmotionAnnotation> parse_emotionml(std::string_view text);
std::string serialize_emotionml(const std::vector<EmotionAnnotation>& annotations);

AVPoint to_internal(const EmotionAnnotation& a);
EmotionAnnotation from_internal(const AVPoint& p, Modality modality,
                                std::optional<std::string> category, std::int64_t timestamp_ms);

// Service lifecycle report: an emotionml document whose only payload is one
// <info> element.
struct StatusInfo {
  std::string subsystem;
  std::string state;    // idle | running | stopped | exiting
  std::string command;  // the control command being acknowledged
  std::string correlation_id;
  std::string detail;

  friend bool operator==(const StatusInfo&, const StatusInfo&) = default;
};

std::string serialize_status(const StatusInfo& status);
StatusInfo parse_status(std::string_view text);

}  // namespace asc::emotionml
