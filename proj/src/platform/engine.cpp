#include "asc/platform/engine.hpp"

#include <algorithm>

namespace asc::platform {
namespace {

using Clock = std::chrono::steady_clock;

std::chrono::milliseconds remaining(Clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return std::max(left, std::chrono::milliseconds(0));
}

}  // namespace

void check_subsystem(std::string_view subsystem) {
  if (std::find(kSubsystems.begin(), kSubsystems.end(), subsystem) == kSubsystems.end()) {
    throw Error(Errc::unknown_subsystem, "'" + std::string(subsystem) + "'");
  }
}

Modality subsystem_modality(std::string_view subsystem) {
  check_subsystem(subsystem);
  if (subsystem == "face") return Modality::face;
  if (subsystem == "voice") return Modality::voice;
  return Modality::body;
}

std::string_view modality_subsystem(Modality m) {
  switch (m) {
    case Modality::face: return "face";
    case Modality::voice: return "voice";
    case Modality::body: return "body";
    case Modality::fused: break;
  }
  throw Error(Errc::unknown_subsystem, "no service for the fused modality");
}

Engine::Engine(EngineOptions options) : options_(std::move(options)) {}

void Engine::connect() {
  client_.connect(options_.host, options_.port);
  client_.subscribe(stomp::kResultsTopic, "engine-results");
}

void Engine::disconnect() {
  if (client_.is_connected()) client_.disconnect();
}

emotionml::StatusInfo Engine::control(std::string_view subsystem, std::string_view command,
                                      const std::string& correlation_id) {
  check_subsystem(subsystem);
  client_.send(stomp::control_queue(subsystem), std::string(command),
               {{std::string(kCorrelationHeader), correlation_id}});
  const auto deadline = Clock::now() + options_.ack_timeout;
  while (true) {
    const auto left = remaining(deadline);
    if (left.count() == 0) break;
    const auto msg = client_.next_message(left);
    if (!msg) break;
    if (msg->header(kKindHeader) != "status" || msg->header(kCorrelationHeader) != correlation_id) continue;
    try {
      return emotionml::parse_status(msg->body);
    } catch (const emotionml::Error&) {
      continue;
    }
  }
  throw Error(Errc::timeout, std::string(subsystem) + " did not acknowledge '" + std::string(command) + "'");
}

bool Engine::wait_ready(std::string_view subsystem, std::chrono::milliseconds deadline) {
  const auto until = Clock::now() + deadline;
  while (Clock::now() < until) {
    const auto id = "ping-" + std::to_string(++ping_counter_);
    client_.send(stomp::control_queue(subsystem), "status", {{std::string(kCorrelationHeader), id}});
    const auto window = Clock::now() + std::min(std::chrono::milliseconds(250), remaining(until));
    while (true) {
      const auto left = remaining(window);
      if (left.count() == 0) break;
      const auto msg = client_.next_message(left);
      if (!msg) break;
      // Any status from this subsystem proves it consumes its queue.
      if (msg->header(kKindHeader) == "status" && msg->header(kSubsystemHeader) == subsystem) return true;
    }
  }
  return false;
}

emotionml::EmotionAnnotation Engine::submit(std::string_view subsystem, const std::string& media,
                                            const std::string& target, std::int64_t session_time_ms,
                                            const std::string& correlation_id,
                                            const std::function<void(const emotionml::EmotionAnnotation&)>& other) {
  check_subsystem(subsystem);
  std::vector<stomp::Header> headers{{std::string(kCorrelationHeader), correlation_id},
                                     {std::string(kMediaHeader), media},
                                     {std::string(kSessionTimeHeader), std::to_string(session_time_ms)}};
  if (!target.empty()) headers.emplace_back(std::string(kTargetHeader), target);
  client_.send(stomp::control_queue(subsystem), "submit", std::move(headers));

  const auto deadline = Clock::now() + options_.result_timeout;
  while (true) {
    const auto left = remaining(deadline);
    if (left.count() == 0) break;
    const auto msg = client_.next_message(left);
    if (!msg) break;
    const auto kind = msg->header(kKindHeader);
    const bool ours = msg->header(kCorrelationHeader) == correlation_id;
    if (kind == "status" && ours) {
      std::string detail = "refused";
      try {
        detail = emotionml::parse_status(msg->body).detail;
      } catch (const emotionml::Error&) {
      }
      throw Error(Errc::service_error, std::string(subsystem) + ": " + detail);
    }
    if (kind != "result") continue;
    std::vector<emotionml::EmotionAnnotation> annotations;
    try {
      annotations = emotionml::parse_emotionml(msg->body);
    } catch (const emotionml::Error&) {
      continue;
    }
    if (ours) {
      for (const auto& a : annotations) {
        if (a.modality == subsystem_modality(subsystem)) return a;
      }
    }
    if (other) {
      for (const auto& a : annotations) other(a);
    }
  }
  throw Error(Errc::turn_timeout, std::string(subsystem) + " produced no result within " +
                                      std::to_string(options_.result_timeout.count()) + " ms");
}

}  // namespace asc::platform
