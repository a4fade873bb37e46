#pragma once

// Scripted sessions.
//
// Script file, one entry per line, '#' comments:
//
//   seed: 7
//   board_length: 10
//   robot: every:2
//   turn: happy voice media/voice/happy.wav
//   turn: angry body media/body/anger.csv
//
// Media paths are relative to the script's directory.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asc/platform/session_log.hpp"
#include "asc/runner/config.hpp"
#include "asc/runner/process.hpp"
#include "asc/stomp/broker.hpp"

namespace asc::runner {

struct TurnSpec {
  std::string target;
  Modality modality = Modality::voice;
  std::filesystem::path media;

  friend bool operator==(const TurnSpec&, const TurnSpec&) = default;
};

struct SessionScript {
  std::optional<std::uint64_t> seed;
  std::optional<int> board_length;
  std::optional<platform::RobotPolicy> robot;
  std::vector<TurnSpec> turns;

  // Throws platform::Error(script_invalid) for syntax errors, unknown
  // emotions or modalities, and media that does not exist.
  static SessionScript parse(std::string_view text, const std::filesystem::path& base_dir,
                             const EmotionVocabulary& vocabulary);
  static SessionScript load(const std::filesystem::path& path, const EmotionVocabulary& vocabulary);
};

std::string format_script(const SessionScript& script);

// In-process broker plus one child process per analyzer service.
class LocalCluster {
 public:
  // Starts the broker on config.broker_port (0 picks a free port) and spawns
  // `executable service --subsystem <s>` per subsystem. Broker address and
  // model paths go on the command line; media ports are ephemeral.
  LocalCluster(RuntimeConfig config, const std::filesystem::path& executable,
               const std::vector<std::string>& subsystems,
               const std::optional<std::filesystem::path>& log_dir = std::nullopt);
  ~LocalCluster();

  // Config pointing at this cluster's broker.
  const RuntimeConfig& config() const { return config_; }
  ChildProcess& service(const std::string& subsystem) { return services_.at(subsystem); }
  stomp::Broker& broker() { return *broker_; }

 private:
  RuntimeConfig config_;
  std::unique_ptr<stomp::Broker> broker_;
  std::map<std::string, ChildProcess> services_;
};

struct SessionOptions {
  RuntimeConfig config;
  std::optional<std::uint64_t> seed;  // overrides the script
  // Called before each turn; tests use it to inject failures.
  std::function<void(int turn)> on_turn;
  // How long to wait for each service to answer before logging controls.
  std::chrono::milliseconds ready_timeout{10000};
  platform::SessionRecorder::Sink sink;
};

struct SessionReport {
  std::string log;
  platform::GameState final_state;
  std::vector<platform::TurnOutcome> turns;
  int timeouts = 0;
};

// Session time of turn k is k * kTurnSpacingMs.
inline constexpr std::int64_t kTurnSpacingMs = 1000;

// Throws BrokerUnreachable when the bus is down.
SessionReport run_session(const SessionScript& script, const SessionOptions& options);

}  // namespace asc::runner
