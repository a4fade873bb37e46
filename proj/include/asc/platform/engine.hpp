#pragma once

// Bus side of the platform: lifecycle control of the analyzer services and
// submission of attempt media.
//
// Control queue frames carry the command word as body and these headers:
//   correlation-id    echoed on the reply
//   media             input path (submit only)
//   target            target emotion (submit, optional)
//   session-time-ms   timestamp the service stamps on its result (submit)
// Replies arrive on /topic/asc with header asc-kind: status | result.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "asc/emotionml.hpp"
#include "asc/platform/game.hpp"
#include "asc/stomp/client.hpp"

namespace asc::platform {

inline constexpr std::string_view kKindHeader = "asc-kind";
inline constexpr std::string_view kCorrelationHeader = "correlation-id";
inline constexpr std::string_view kMediaHeader = "media";
inline constexpr std::string_view kTargetHeader = "target";
inline constexpr std::string_view kSessionTimeHeader = "session-time-ms";
inline constexpr std::string_view kSubsystemHeader = "subsystem";

inline constexpr std::array<std::string_view, 3> kSubsystems{"face", "voice", "body"};

// Throws Error(unknown_subsystem).
void check_subsystem(std::string_view subsystem);
Modality subsystem_modality(std::string_view subsystem);
std::string_view modality_subsystem(Modality m);

struct EngineOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 61613;
  std::chrono::milliseconds ack_timeout{2000};
  std::chrono::milliseconds result_timeout{5000};
};

class Engine {
 public:
  explicit Engine(EngineOptions options = {});

  // Connects and subscribes to the results topic.
  void connect();
  void disconnect();

  // Sends a control command and waits for the matching status. Throws
  // Error(timeout) or Error(unknown_subsystem).
  emotionml::StatusInfo control(std::string_view subsystem, std::string_view command,
                                const std::string& correlation_id);

  // Sends `status` until a reply arrives or `deadline` passes; returns
  // whether the service answered.
  bool wait_ready(std::string_view subsystem, std::chrono::milliseconds deadline);

  // Submits media and waits for the result with this correlation id.
  // Unrelated results seen meanwhile go to `other`. Throws
  // Error(turn_timeout) or Error(service_error) if the service refused.
  emotionml::EmotionAnnotation submit(std::string_view subsystem, const std::string& media, const std::string& target,
                                      std::int64_t session_time_ms, const std::string& correlation_id,
                                      const std::function<void(const emotionml::EmotionAnnotation&)>& other = {});

  const EngineOptions& options() const { return options_; }

 private:
  EngineOptions options_;
  stomp::Client client_;
  std::uint64_t ping_counter_ = 0;
};

}  // namespace asc::platform
