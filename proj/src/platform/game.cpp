#include "asc/platform/game.hpp"

#include <algorithm>
#include <charconv>

#include "asc/keyvalue.hpp"

namespace asc::platform {
namespace {

// splitmix64 finalizer; stateless so any turn can be replayed on its own.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::unknown_emotion: return "UnknownEmotion";
    case Errc::game_finished: return "GameFinished";
    case Errc::unit_locked: return "UnitLocked";
    case Errc::insufficient_funds: return "InsufficientFunds";
    case Errc::bad_counts: return "BadCounts";
    case Errc::unknown_subsystem: return "UnknownSubsystem";
    case Errc::timeout: return "Timeout";
    case Errc::turn_timeout: return "TurnTimeout";
    case Errc::service_error: return "ServiceError";
    case Errc::script_invalid: return "ScriptInvalid";
    case Errc::bad_log: return "BadLog";
  }
  return "?";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

AttemptResult evaluate_attempt(std::string_view target, const AVPoint& recognized,
                               const std::optional<std::string>& category, const EmotionVocabulary& vocabulary) {
  if (!vocabulary.contains(target)) throw Error(Errc::unknown_emotion, "'" + std::string(target) + "'");
  const AVPoint canonical = vocabulary.at(target).canonical;
  AttemptResult r;
  r.recognized = recognized;
  r.label = category.value_or("");
  r.distance = distance(recognized, canonical);
  r.match = quadrant(recognized) == quadrant(canonical) && r.distance <= kMatchDistance;
  r.coins = r.match ? (category && *category == target ? 2 : 1) : 0;
  return r;
}

AttemptResult missed_attempt() { return {}; }

std::string RobotPolicy::describe() const {
  if (kind == Kind::every_nth) return "every:" + std::to_string(period);
  return "random:" + format_double(probability);
}

RobotPolicy RobotPolicy::parse(std::string_view text) {
  RobotPolicy p;
  const auto colon = text.find(':');
  const auto kind = text.substr(0, colon);
  const auto arg = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  try {
    if (kind == "every") {
      p.kind = Kind::every_nth;
      if (!arg.empty()) p.period = static_cast<int>(parse_double(arg));
      if (p.period < 1) throw Error(Errc::script_invalid, "robot period must be >= 1");
    } else if (kind == "random") {
      p.kind = Kind::random;
      if (!arg.empty()) p.probability = parse_double(arg);
      if (!(p.probability >= 0.0 && p.probability <= 1.0)) {
        throw Error(Errc::script_invalid, "robot probability must lie in [0, 1]");
      }
    } else {
      throw Error(Errc::script_invalid, "unknown robot policy '" + std::string(text) + "'");
    }
  } catch (const KeyValueError& e) {
    throw Error(Errc::script_invalid, e.what());
  }
  return p;
}

bool robot_moves(std::uint64_t seed, int turn, const RobotPolicy& policy) {
  if (policy.kind == RobotPolicy::Kind::every_nth) return turn % policy.period == 0;
  const std::uint64_t h = mix(seed ^ mix(static_cast<std::uint64_t>(turn)));
  const double u = static_cast<double>(h >> 11) * 0x1.0p-53;
  return u < policy.probability;
}

std::string_view to_string(UnitStatus s) {
  switch (s) {
    case UnitStatus::locked: return "locked";
    case UnitStatus::unlocked: return "unlocked";
    case UnitStatus::passed: return "passed";
  }
  return "?";
}

std::vector<Unit> initial_units(const EmotionVocabulary& vocabulary) {
  std::vector<Unit> units;
  for (const auto& e : vocabulary.entries()) units.push_back({e.label, UnitStatus::locked});
  if (!units.empty()) units.front().status = UnitStatus::unlocked;
  return units;
}

std::vector<Unit> quiz_progression(std::vector<Unit> units, std::string_view unit, int correct, int total) {
  if (total <= 0 || correct < 0 || correct > total) {
    throw Error(Errc::bad_counts, "quiz needs 0 <= correct <= total and total > 0");
  }
  auto it = std::find_if(units.begin(), units.end(), [&](const Unit& u) { return u.id == unit; });
  if (it == units.end()) throw Error(Errc::unknown_emotion, "no unit '" + std::string(unit) + "'");
  if (it->status == UnitStatus::locked) throw Error(Errc::unit_locked, "unit '" + it->id + "' is locked");
  if (it->status == UnitStatus::passed) return units;
  // Integer form of correct / total >= 0.8.
  if (static_cast<long long>(correct) * 5 >= static_cast<long long>(total) * 4) {
    it->status = UnitStatus::passed;
    auto next = std::next(it);
    if (next != units.end() && next->status == UnitStatus::locked) next->status = UnitStatus::unlocked;
  }
  return units;
}

std::string_view to_string(Winner w) {
  switch (w) {
    case Winner::none: return "none";
    case Winner::player: return "player";
    case Winner::robot: return "robot";
  }
  return "?";
}

GameState race_step(GameState state, const AttemptResult& result) {
  if (state.finished()) throw Error(Errc::game_finished, "winner already declared");
  state.turn += 1;
  state.wallet += result.coins;
  if (result.match) {
    state.player_pos = std::min(state.board_length, state.player_pos + 1);
    if (state.player_pos == state.board_length) {
      state.winner = Winner::player;
      return state;
    }
  }
  if (robot_moves(state.seed, state.turn, state.robot)) {
    state.robot_pos = std::min(state.board_length, state.robot_pos + 1);
    if (state.robot_pos == state.board_length) state.winner = Winner::robot;
  }
  return state;
}

GameState wallet_spend(GameState state, long long price) {
  if (price < 0) throw Error(Errc::bad_counts, "price must be >= 0");
  if (price > state.wallet) {
    throw Error(Errc::insufficient_funds,
                "price " + std::to_string(price) + " exceeds balance " + std::to_string(state.wallet));
  }
  state.wallet -= price;
  return state;
}

ChanceCorrected chance_corrected_score(long long correct, long long n, long long k) {
  if (n <= 0 || correct < 0 || correct > n || k < 2) {
    throw Error(Errc::bad_counts, "need 0 <= correct <= n, n > 0 and k >= 2");
  }
  // (p - 1/k) / (1 - 1/k) = (k*correct - n) / (n*(k - 1)), exact in integers
  // until the final division.
  const long double num = static_cast<long double>(k) * correct - n;
  const long double den = static_cast<long double>(n) * (k - 1);
  ChanceCorrected cc;
  cc.percent = num <= 0 ? 0.0 : static_cast<double>(num * 100 / den);
  cc.eligible = cc.percent > 50.0;
  return cc;
}

}  // namespace asc::platform
