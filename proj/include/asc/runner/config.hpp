#pragma once

// Runtime configuration: a flat key:value file, overridden by environment
// variables. Key `a.b_c` is overridden by ASC_A_B_C.
//
//   broker.host            127.0.0.1
//   broker.port            61613
//   media.face.port        8081    (0 picks a free port)
//   media.voice.port       8082
//   media.body.port        8083
//   voice.prototypes       prototype library directory
//   body.model             centroid model file
//   face.model             linear model file
//   session.board_length   10
//   session.robot          every:2 | random:<p>
//   session.turn_timeout_ms   5000
//   control.ack_timeout_ms    2000
//   emotion.<label>        valence, arousal   (canonical point override)
//
// Relative paths resolve against the directory of the config file.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "asc/affect.hpp"
#include "asc/keyvalue.hpp"
#include "asc/platform/game.hpp"

namespace asc::runner {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RuntimeConfig {
  std::string broker_host = "127.0.0.1";
  std::uint16_t broker_port = 61613;
  std::map<std::string, std::uint16_t> media_ports{{"face", 8081}, {"voice", 8082}, {"body", 8083}};
  std::filesystem::path voice_prototypes;
  std::filesystem::path body_model;
  std::filesystem::path face_model;
  int board_length = 10;
  platform::RobotPolicy robot;
  std::chrono::milliseconds turn_timeout{5000};
  std::chrono::milliseconds ack_timeout{2000};
  std::vector<EmotionEntry> emotion_overrides;
  std::optional<std::filesystem::path> source;  // file it was loaded from

  // Defaults, then the file (if any), then the environment.
  static RuntimeConfig load(const std::optional<std::filesystem::path>& file, bool use_environment = true);
  static RuntimeConfig from_keyvalue(const KeyValueFile& kv, const std::filesystem::path& base_dir);

  // Throws ConfigError when non-zero media ports collide or values are out
  // of range.
  void validate() const;

  EmotionVocabulary vocabulary() const;
};

// Environment variable overriding a config key.
std::string environment_name(std::string_view key);

}  // namespace asc::runner
