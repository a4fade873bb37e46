#pragma once

// WebSocket bridge between the browser UI and the engine.
//
// Commands (client to bridge), one JSON object per text message:
//   {"cmd": "select_target", "emotion": "happy"}
//   {"cmd": "select_modality", "modality": "voice"}
//   {"cmd": "submit_attempt", "path": "/abs/clip.wav"}
//   {"cmd": "play_reference"}
//
// Events (bridge to client), each with an "event" field:
//   state      turn, target, modality, player_pos, robot_pos, wallet,
//              board_length, winner
//   target     emotion, quadrant, canonical {arousal, valence}
//   modality   modality
//   feedback   turn, target, modality, recognized, label, distance, match,
//              coins, lights, error
//   reference  emotion, path
//   error      code, message

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "asc/platform/session_log.hpp"

namespace asc::runner {

using Json = nlohmann::ordered_json;

struct BridgeHooks {
  // Runs one attempt and returns the analyzer's annotation; may throw
  // platform::Error (turn_timeout, service_error).
  std::function<emotionml::EmotionAnnotation(const std::string& subsystem, const std::string& media,
                                             const std::string& target, std::int64_t session_time_ms,
                                             const std::string& correlation_id)>
      submit;
  // Reference clip for an emotion, if the prototype library has one.
  std::function<std::optional<std::filesystem::path>(const std::string& emotion)> reference;
};

// Transport-free command handling; one instance per UI session.
class BridgeController {
 public:
  BridgeController(platform::SessionSettings settings, EmotionVocabulary vocabulary, BridgeHooks hooks);

  // Events sent right after a client connects.
  std::vector<Json> hello() const;
  std::vector<Json> handle(const Json& command);
  // Parses the message first; malformed JSON yields an error event.
  std::vector<Json> handle_text(std::string_view message);

  const platform::SessionRecorder& recorder() const { return recorder_; }

 private:
  Json state_event() const;

  EmotionVocabulary vocabulary_;
  BridgeHooks hooks_;
  platform::SessionRecorder recorder_;
  std::string target_;
  Modality modality_ = Modality::voice;
  int turn_ = 0;
};

class BridgeServer {
 public:
  // Commands from all connections are serialized through `controller`.
  // Plain HTTP GETs are served from `static_dir` when set, else 404.
  BridgeServer(BridgeController& controller, std::string host, std::uint16_t port,
               std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  void start();
  void stop();
  std::uint16_t port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::uint16_t port_ = 0;
};

}  // namespace asc::runner
