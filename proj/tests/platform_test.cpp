#include <doctest.h>

#include <algorithm>
#include <functional>
#include <random>

#include "asc/platform/game.hpp"
#include "asc/platform/session_log.hpp"

using namespace asc;
using namespace asc::platform;

namespace {

Errc error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error");
  return Errc::bad_log;
}

AttemptResult hit(int coins = 2) {
  AttemptResult r;
  r.match = true;
  r.coins = coins;
  return r;
}

UnitStatus status_of(const std::vector<Unit>& units, std::string_view id) {
  return std::find_if(units.begin(), units.end(), [&](const Unit& u) { return u.id == id; })->status;
}

emotionml::EmotionAnnotation result(const AVPoint& p, Modality m, std::optional<std::string> cat, std::int64_t t) {
  return emotionml::from_internal(p, m, std::move(cat), t);
}

}  // namespace

TEST_CASE("quadrants by sign") {
  CHECK(quadrant({0.0, 0.0}) == Quadrant::pos_valence_high_arousal);
  CHECK(quadrant({0.5, -0.1}) == Quadrant::neg_valence_high_arousal);
  CHECK(quadrant({-0.5, -0.1}) == Quadrant::neg_valence_low_arousal);
  CHECK(quadrant({-0.1, 0.1}) == Quadrant::pos_valence_low_arousal);
  CHECK(quadrant({-0.1, 0.0}) == Quadrant::pos_valence_low_arousal);

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0), scale(1e-6, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const AVPoint p{u(rng), u(rng)};
    const double c = scale(rng);
    CHECK(quadrant(p) == quadrant({c * p.arousal, c * p.valence}));
  }
}

TEST_CASE("vocabulary invariants") {
  const auto& v = EmotionVocabulary::standard();
  REQUIRE(v.entries().size() == 20);
  std::vector<std::string> labels;
  for (const auto& e : v.entries()) {
    labels.push_back(e.label);
    CHECK(is_valid(e.canonical));
    CHECK(e.canonical.arousal != 0.0);
    CHECK(e.canonical.valence != 0.0);
  }
  std::sort(labels.begin(), labels.end());
  CHECK(std::adjacent_find(labels.begin(), labels.end()) == labels.end());
  CHECK(v.at("happy").canonical == AVPoint{0.5, 0.6});

  auto on_axis = v.entries();
  on_axis[3].canonical.valence = 0.0;
  CHECK_THROWS_AS(EmotionVocabulary{on_axis}, VocabularyError);
  auto dup = v.entries();
  dup[1].label = dup[0].label;
  CHECK_THROWS_AS(EmotionVocabulary{dup}, VocabularyError);
  auto short_list = v.entries();
  short_list.pop_back();
  CHECK_THROWS_AS(EmotionVocabulary{short_list}, VocabularyError);
  CHECK_THROWS_AS(v.at("ecstatic"), VocabularyError);
  for (auto b : kBasicEmotions) CHECK(v.contains(basic_to_vocabulary(b)));
}

TEST_CASE("attempt evaluation") {
  const auto exact = evaluate_attempt("happy", {0.5, 0.6}, std::string("happy"));
  CHECK(exact.match);
  CHECK(exact.distance == 0.0);
  CHECK(exact.coins == 2);
  CHECK(evaluate_attempt("happy", {0.5, 0.6}, std::string("joking")).coins == 1);
  CHECK(evaluate_attempt("happy", {0.5, 0.6}, std::nullopt).coins == 1);

  // Distance threshold, staying inside the target's quadrant.
  const auto near = evaluate_attempt("excited", {0.8 - 0.59, 0.7}, std::nullopt);
  CHECK(near.match);
  CHECK(near.distance == doctest::Approx(0.59));
  const auto far = evaluate_attempt("excited", {0.8 - 0.61, 0.7}, std::nullopt);
  CHECK_FALSE(far.match);
  CHECK(far.coins == 0);

  // Close but across an axis.
  const auto across = evaluate_attempt("interested", {0.3, -0.05}, std::string("interested"));
  CHECK(across.distance < 0.6);
  CHECK_FALSE(across.match);
  CHECK(across.coins == 0);

  CHECK(error_of([] { evaluate_attempt("ecstatic", {}, std::nullopt); }) == Errc::unknown_emotion);
  CHECK_FALSE(missed_attempt().match);
}

TEST_CASE("race with ten matches and a robot on every second turn") {
  GameState s;
  s.robot = RobotPolicy::parse("every:2");
  for (int turn = 1; turn <= 10; ++turn) {
    REQUIRE_FALSE(s.finished());
    s = race_step(s, hit());
    CHECK(s.player_pos == turn);
    CHECK(s.robot_pos == (turn < 10 ? turn / 2 : 4));
  }
  CHECK(s.winner == Winner::player);
  CHECK(s.wallet == 20);
  CHECK(s.turn == 10);
  CHECK(error_of([&] { race_step(s, hit()); }) == Errc::game_finished);

  GameState idle;
  idle.robot = RobotPolicy::parse("every:2");
  int turns = 0;
  while (!idle.finished()) {
    idle = race_step(idle, missed_attempt());
    ++turns;
  }
  CHECK(idle.winner == Winner::robot);
  CHECK(turns == 20);
  CHECK(idle.player_pos == 0);
}

TEST_CASE("player wins a same-turn tie") {
  GameState s;
  s.board_length = 1;
  s.robot = RobotPolicy::parse("every:1");
  s = race_step(s, hit());
  CHECK(s.winner == Winner::player);
  CHECK(s.robot_pos == 0);
}

TEST_CASE("random races keep their bookkeeping") {
  std::mt19937_64 rng(2);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> len(1, 15), coins(0, 2);
  std::uniform_real_distribution<double> prob(0.0, 1.0);
  for (int game = 0; game < 10000; ++game) {
    GameState s;
    s.board_length = len(rng);
    s.seed = rng();
    if (coin(rng)) {
      s.robot.kind = RobotPolicy::Kind::random;
      s.robot.probability = prob(rng);
    } else {
      s.robot.period = len(rng);
    }
    int matches = 0, robot_moves_seen = 0;
    long long wallet = 0;
    while (!s.finished() && s.turn < 200) {
      AttemptResult r;
      r.match = coin(rng);
      r.coins = r.match ? 1 + coins(rng) % 2 : 0;
      const int before = s.robot_pos;
      s = race_step(s, r);
      matches += r.match;
      wallet += r.coins;
      robot_moves_seen += s.robot_pos - before;
      REQUIRE(s.player_pos >= 0);
      REQUIRE(s.player_pos <= s.board_length);
      REQUIRE(s.robot_pos <= s.board_length);
      REQUIRE(s.robot_pos - before <= 1);
    }
    CHECK(s.player_pos == std::min(matches, s.board_length));
    CHECK(s.wallet == wallet);
    CHECK(s.robot_pos == robot_moves_seen);
    if (s.winner == Winner::player) CHECK(s.player_pos == s.board_length);
    if (s.winner == Winner::robot) {
      CHECK(s.robot_pos == s.board_length);
      CHECK(s.player_pos < s.board_length);
    }
  }
}

TEST_CASE("robot policies") {
  const auto every = RobotPolicy::parse("every:3");
  CHECK(every.describe() == "every:3");
  CHECK(RobotPolicy::parse(every.describe()).period == 3);
  const auto rnd = RobotPolicy::parse("random:0.25");
  CHECK(rnd.kind == RobotPolicy::Kind::random);
  CHECK(RobotPolicy::parse(rnd.describe()).probability == 0.25);
  CHECK_THROWS(RobotPolicy::parse("sometimes"));

  int moved = 0, differs = 0;
  for (int t = 1; t <= 10000; ++t) {
    const bool a = robot_moves(42, t, rnd);
    CHECK(a == robot_moves(42, t, rnd));
    moved += a;
    differs += a != robot_moves(43, t, rnd);
  }
  CHECK(std::abs(moved / 10000.0 - 0.25) < 0.02);
  CHECK(differs > 0);
  for (int t = 1; t <= 30; ++t) CHECK(robot_moves(0, t, every) == (t % 3 == 0));
}

TEST_CASE("quiz progression") {
  const auto units = initial_units();
  REQUIRE(units.size() == 20);
  CHECK(units[0].status == UnitStatus::unlocked);
  CHECK(units[1].status == UnitStatus::locked);

  const auto pass = quiz_progression(units, "happy", 8, 10);
  CHECK(status_of(pass, "happy") == UnitStatus::passed);
  CHECK(status_of(pass, "sad") == UnitStatus::unlocked);
  CHECK(status_of(pass, "afraid") == UnitStatus::locked);

  const auto fail = quiz_progression(units, "happy", 7, 10);
  CHECK(fail == units);

  CHECK(quiz_progression(pass, "happy", 0, 10) == pass);
  CHECK(error_of([&] { quiz_progression(units, "sad", 10, 10); }) == Errc::unit_locked);
  CHECK(error_of([&] { quiz_progression(units, "happy", 11, 10); }) == Errc::bad_counts);

  // Passing is monotone in the score.
  bool was_passed = false;
  for (int c = 0; c <= 10; ++c) {
    const bool passed = status_of(quiz_progression(units, "happy", c, 10), "happy") == UnitStatus::passed;
    CHECK(passed >= was_passed);
    CHECK(passed == (c >= 8));
    was_passed = passed;
  }

  // The order of quizzes on one unit does not matter.
  std::vector<std::pair<int, int>> quizzes{{3, 10}, {9, 10}, {5, 10}, {0, 4}, {4, 5}};
  std::sort(quizzes.begin(), quizzes.end());
  std::optional<std::vector<Unit>> first;
  do {
    auto u = units;
    for (auto [c, t] : quizzes) u = quiz_progression(u, "happy", c, t);
    if (!first) first = u;
    CHECK(u == *first);
  } while (std::next_permutation(quizzes.begin(), quizzes.end()));
}

TEST_CASE("wallet") {
  GameState s;
  s.wallet = 5;
  CHECK(wallet_spend(s, 3).wallet == 2);
  CHECK(wallet_spend(s, 5).wallet == 0);
  CHECK(error_of([&] { wallet_spend(s, 6); }) == Errc::insufficient_funds);
  CHECK(s.wallet == 5);
  CHECK(error_of([&] { wallet_spend(s, -1); }) == Errc::bad_counts);
}

TEST_CASE("chance-corrected score") {
  const auto border = chance_corrected_score(36, 60, 6);
  CHECK(border.percent == doctest::Approx(52.0).epsilon(1e-12));
  CHECK(border.eligible);
  CHECK(chance_corrected_score(10, 60, 6).percent == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(chance_corrected_score(5, 60, 6).percent == 0.0);
  CHECK(chance_corrected_score(60, 60, 6).percent == doctest::Approx(100.0));
  CHECK_FALSE(chance_corrected_score(20, 60, 6).eligible);
  CHECK(std::abs(chance_corrected_score(70, 100, 1'000'000).percent - 70.0) < 0.01);

  // Exact rational oracle: 100 (c k - n) / (n (k - 1)), floored at zero.
  std::mt19937_64 rng(3);
  for (int i = 0; i < 2000; ++i) {
    const long long n = 1 + static_cast<long long>(rng() % 500);
    const long long k = 2 + static_cast<long long>(rng() % 20);
    const long long c = static_cast<long long>(rng() % (n + 1));
    const long long num = c * k - n;
    const double expect = num <= 0 ? 0.0 : 100.0 * static_cast<double>(num) / static_cast<double>(n * (k - 1));
    const auto got = chance_corrected_score(c, n, k);
    CHECK(std::abs(got.percent - expect) <= 1e-9);
    CHECK(got.eligible == (2 * num > n * (k - 1)));
  }
  for (long long c = 1; c <= 60; ++c) {
    CHECK(chance_corrected_score(c, 60, 6).percent >= chance_corrected_score(c - 1, 60, 6).percent);
  }

  CHECK(error_of([] { chance_corrected_score(61, 60, 6); }) == Errc::bad_counts);
  CHECK(error_of([] { chance_corrected_score(-1, 60, 6); }) == Errc::bad_counts);
  CHECK(error_of([] { chance_corrected_score(0, 0, 6); }) == Errc::bad_counts);
  CHECK(error_of([] { chance_corrected_score(1, 2, 1); }) == Errc::bad_counts);
}

TEST_CASE("session log replays to the same bytes") {
  SessionSettings settings{9, 4, RobotPolicy::parse("random:0.5")};
  std::vector<std::string> streamed;
  SessionRecorder rec(settings, EmotionVocabulary::standard(), [&](const std::string& l) { streamed.push_back(l); });
  rec.begin(4);
  rec.control("voice", "start", emotionml::StatusInfo{}, std::nullopt);
  rec.control("body", "start", std::nullopt, std::string("Timeout"));

  rec.set_time(1000);
  rec.turn(1, "happy", Modality::voice, "a.wav");
  CHECK_FALSE(rec.annotation(result({0.5, 0.6}, Modality::face, std::nullopt, 1000)));
  auto a = result({0.4, 0.5}, Modality::voice, std::string("happy"), 1000);
  a.parameters.push_back({"light.f0_mean", 0.0});
  const auto out = rec.annotation(a);
  REQUIRE(out);
  CHECK(out->result.match);
  CHECK(out->result.coins == 2);

  rec.set_time(2000);
  rec.turn(2, "sad", Modality::body, "b.csv");
  const auto miss = rec.failure("TurnTimeout");
  CHECK(miss.error == "TurnTimeout");
  CHECK(miss.result.coins == 0);

  rec.set_time(3000);
  CHECK(error_of([&] { rec.turn(3, "ecstatic", Modality::face, "c.csv"); }) == Errc::unknown_emotion);
  rec.turn(3, "sad", Modality::face, "c.csv");
  rec.annotation(result({-0.5, -0.6}, Modality::face, std::string("sad"), 3000));
  rec.finish();

  CHECK(streamed == rec.lines());
  const auto text = rec.text();
  CHECK(replay(text) == text);

  std::uint64_t seq = 0;
  for (const auto& line : rec.lines()) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j["seq"].get<std::uint64_t>() == seq++);
    CHECK(j.contains("t_ms"));
    CHECK(j.contains("event"));
  }
  const auto last = nlohmann::json::parse(rec.lines().back());
  CHECK(last["event"] == "summary");
  CHECK(last["timeouts"] == 1);
  CHECK(last["wallet"] == 4);

  CHECK(error_of([] { replay(""); }) == Errc::bad_log);
  CHECK(error_of([] { replay("not json\n"); }) == Errc::bad_log);
  CHECK(error_of([&] { replay(rec.lines()[1] + "\n"); }) == Errc::bad_log);
}
