#pragma once

// The engine's game state machine, written out as a line-delimited JSON log.
//
// Every record carries `seq` and `t_ms` (session time) and an `event` field:
//
//   session     header: seed, board_length, robot policy, planned turns
//   control     command sent to a subsystem and the acknowledgment or error
//   turn        target, modality and media of the next attempt
//   annotation  an analyzer result received during the turn
//   attempt     evaluation against the target (or the error that replaced it)
//   race_step   board positions after the turn
//   wallet      coins awarded and resulting balance
//   progression per-unit quiz outcome at the end of the session
//   summary     winner, wallet, positions and turn counts
//
// session, control, turn, annotation and failed attempts are inputs; the
// rest is derived from them, which is what replay() relies on.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "asc/affect.hpp"
#include "asc/emotionml.hpp"
#include "asc/platform/game.hpp"

namespace asc::platform {

struct SessionSettings {
  std::uint64_t seed = 0;
  int board_length = 10;
  RobotPolicy robot;
};

struct TurnOutcome {
  int turn = 0;
  std::string target;
  Modality modality = Modality::voice;
  AttemptResult result;
  std::optional<std::string> error;  // e.g. "TurnTimeout"
  std::map<std::string, std::string> lights;  // per compared parameter, when reported
  GameState state;
};

class SessionRecorder {
 public:
  using Sink = std::function<void(const std::string& line)>;

  SessionRecorder(SessionSettings settings, const EmotionVocabulary& vocabulary = EmotionVocabulary::standard(),
                  Sink sink = {});

  // Session time stamped on subsequent records.
  void set_time(std::int64_t t_ms) { t_ms_ = t_ms; }
  std::int64_t time() const { return t_ms_; }

  void begin(std::size_t planned_turns);
  void control(std::string_view subsystem, std::string_view command,
               const std::optional<emotionml::StatusInfo>& ack, const std::optional<std::string>& error);
  // Throws Error(unknown_emotion) for targets outside the vocabulary and
  // Error(game_finished) once a winner exists.
  void turn(int number, std::string_view target, Modality modality, std::string_view media);
  // Results for another modality are logged unscored and return nullopt.
  std::optional<TurnOutcome> annotation(const emotionml::EmotionAnnotation& a);
  // The current turn produced no usable result.
  TurnOutcome failure(std::string_view error);
  void finish();

  const GameState& state() const { return state_; }
  bool in_turn() const { return current_turn_ > 0; }
  const std::vector<std::string>& lines() const { return lines_; }
  std::string text() const;

 private:
  using Json = nlohmann::ordered_json;
  Json record(std::string_view event);
  void emit(const Json& record);
  TurnOutcome settle(AttemptResult result, std::optional<std::string> error,
                     std::map<std::string, std::string> lights);

  SessionSettings settings_;
  const EmotionVocabulary* vocabulary_;
  Sink sink_;
  GameState state_;
  std::vector<std::string> lines_;
  std::int64_t t_ms_ = 0;
  std::uint64_t seq_ = 0;
  int current_turn_ = 0;
  int timeouts_ = 0;
  std::string current_target_;
  Modality current_modality_ = Modality::voice;
  std::map<std::string, std::pair<int, int>> quiz_;  // target -> (matches, attempts)
};

// Rebuilds a log from its input records. A log produced by SessionRecorder
// replays to the same bytes. Throws Error(bad_log).
std::string replay(std::string_view log, const EmotionVocabulary& vocabulary = EmotionVocabulary::standard());

}  // namespace asc::platform
