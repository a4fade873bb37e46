#pragma once

// Target comparison, rewards, the robot race and unit progression.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "asc/affect.hpp"

namespace asc::platform {

enum class Errc {
  unknown_emotion,
  game_finished,
  unit_locked,
  insufficient_funds,
  bad_counts,
  unknown_subsystem,
  timeout,
  turn_timeout,
  service_error,
  script_invalid,
  bad_log,
};

std::string_view to_string(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

inline constexpr double kMatchDistance = 0.6;

struct AttemptResult {
  AVPoint recognized;
  std::string label;  // recognized category, may be empty
  double distance = 0.0;
  bool match = false;
  int coins = 0;
};

// match iff same quadrant as the target's canonical point and within
// kMatchDistance of it. 2 coins when the category also names the target.
AttemptResult evaluate_attempt(std::string_view target, const AVPoint& recognized,
                               const std::optional<std::string>& category,
                               const EmotionVocabulary& vocabulary = EmotionVocabulary::standard());

// A turn that produced no recognition.
AttemptResult missed_attempt();

struct RobotPolicy {
  enum class Kind { every_nth, random };
  Kind kind = Kind::every_nth;
  int period = 2;            // every_nth: moves on turns period, 2*period, ...
  double probability = 0.5;  // random: chance to move on a turn

  std::string describe() const;
  static RobotPolicy parse(std::string_view text);  // "every:2" or "random:0.5"
};

// Whether the robot moves on `turn` (1-based). Pure function of its inputs.
bool robot_moves(std::uint64_t seed, int turn, const RobotPolicy& policy);

enum class UnitStatus { locked, unlocked, passed };
std::string_view to_string(UnitStatus s);

struct Unit {
  std::string id;
  UnitStatus status = UnitStatus::locked;

  friend bool operator==(const Unit&, const Unit&) = default;
};

// One unit per vocabulary emotion, in vocabulary order; only the first one
// starts unlocked.
std::vector<Unit> initial_units(const EmotionVocabulary& vocabulary = EmotionVocabulary::standard());

inline constexpr double kPassRatio = 0.8;

// Passed iff correct / total >= kPassRatio; passing unlocks the next unit.
// Passed units never revert. Throws Error(unit_locked) for a locked unit.
std::vector<Unit> quiz_progression(std::vector<Unit> units, std::string_view unit, int correct, int total);

enum class Winner { none, player, robot };
std::string_view to_string(Winner w);

struct GameState {
  std::string target;
  int board_length = 10;
  int player_pos = 0;
  int robot_pos = 0;
  long long wallet = 0;
  std::uint64_t seed = 0;
  RobotPolicy robot;
  int turn = 0;  // completed turns
  Winner winner = Winner::none;
  std::vector<Unit> units = initial_units();

  bool finished() const { return winner != Winner::none; }
};

// Player moves first on a match and wins on reaching the board end, even if
// the robot would reach it on the same turn. Throws Error(game_finished).
GameState race_step(GameState state, const AttemptResult& result);

// Throws Error(insufficient_funds) leaving the state untouched.
GameState wallet_spend(GameState state, long long price);

struct ChanceCorrected {
  double percent = 0.0;
  bool eligible = false;  // percent > 50
};

// max(0, (p - 1/k) / (1 - 1/k)) * 100 with p = correct / n.
// Throws Error(bad_counts) unless 0 <= correct <= n, n > 0, k >= 2.
ChanceCorrected chance_corrected_score(long long correct, long long n, long long k);

}  // namespace asc::platform
