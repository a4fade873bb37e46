#include "asc/platform/session_log.hpp"

#include <algorithm>

namespace asc::platform {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kLightPrefix = "light.";

std::string light_name(double code) {
  if (code == 0.0) return "green";
  if (code == 1.0) return "yellow";
  return "red";
}

Json point_json(const AVPoint& p) { return Json{{"arousal", p.arousal}, {"valence", p.valence}}; }

Json status_json(const emotionml::StatusInfo& s) {
  return Json{{"subsystem", s.subsystem},
              {"state", s.state},
              {"command", s.command},
              {"correlation_id", s.correlation_id},
              {"detail", s.detail}};
}

}  // namespace

SessionRecorder::SessionRecorder(SessionSettings settings, const EmotionVocabulary& vocabulary, Sink sink)
    : settings_(settings), vocabulary_(&vocabulary), sink_(std::move(sink)) {
  state_.board_length = settings.board_length;
  state_.seed = settings.seed;
  state_.robot = settings.robot;
  state_.units = initial_units(vocabulary);
}

SessionRecorder::Json SessionRecorder::record(std::string_view event) {
  Json j;
  j["seq"] = seq_++;
  j["t_ms"] = t_ms_;
  j["event"] = event;
  return j;
}

void SessionRecorder::emit(const Json& j) {
  lines_.push_back(j.dump());
  if (sink_) sink_(lines_.back());
}

std::string SessionRecorder::text() const {
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

void SessionRecorder::begin(std::size_t planned_turns) {
  auto j = record("session");
  j["seed"] = settings_.seed;
  j["board_length"] = settings_.board_length;
  j["robot"] = settings_.robot.describe();
  j["turns"] = planned_turns;
  emit(j);
}

void SessionRecorder::control(std::string_view subsystem, std::string_view command,
                              const std::optional<emotionml::StatusInfo>& ack,
                              const std::optional<std::string>& error) {
  auto j = record("control");
  j["subsystem"] = subsystem;
  j["command"] = command;
  if (ack) j["ack"] = status_json(*ack);
  if (error) j["error"] = *error;
  emit(j);
}

void SessionRecorder::turn(int number, std::string_view target, Modality modality, std::string_view media) {
  if (state_.finished()) throw Error(Errc::game_finished, "winner already declared");
  if (!vocabulary_->contains(target)) throw Error(Errc::unknown_emotion, "'" + std::string(target) + "'");
  current_turn_ = number;
  current_target_ = std::string(target);
  current_modality_ = modality;
  state_.target = current_target_;
  auto j = record("turn");
  j["turn"] = number;
  j["target"] = target;
  j["modality"] = to_string(modality);
  j["media"] = media;
  emit(j);
}

std::optional<TurnOutcome> SessionRecorder::annotation(const emotionml::EmotionAnnotation& a) {
  emotionml::validate(a);
  const bool scored = in_turn() && a.modality == current_modality_;
  auto j = record("annotation");
  j["turn"] = current_turn_;
  j["modality"] = to_string(a.modality);
  j["arousal"] = a.arousal;
  j["valence"] = a.valence;
  j["category"] = a.category ? Json(*a.category) : Json(nullptr);
  j["confidence"] = a.confidence ? Json(*a.confidence) : Json(nullptr);
  j["timestamp_ms"] = a.timestamp_ms;
  Json params = Json::array();
  for (const auto& p : a.parameters) params.push_back(Json{{"name", p.name}, {"value", p.value}});
  j["params"] = params;
  j["scored"] = scored;
  emit(j);
  if (!scored) return std::nullopt;

  std::map<std::string, std::string> lights;
  for (const auto& p : a.parameters) {
    if (p.name.starts_with(kLightPrefix)) lights[p.name.substr(kLightPrefix.size())] = light_name(p.value);
  }
  return settle(evaluate_attempt(current_target_, emotionml::to_internal(a), a.category, *vocabulary_), std::nullopt,
                std::move(lights));
}

TurnOutcome SessionRecorder::failure(std::string_view error) {
  if (!in_turn()) throw Error(Errc::bad_log, "failure outside a turn");
  return settle(missed_attempt(), std::string(error), {});
}

TurnOutcome SessionRecorder::settle(AttemptResult result, std::optional<std::string> error,
                                    std::map<std::string, std::string> lights) {
  auto j = record("attempt");
  j["turn"] = current_turn_;
  j["target"] = current_target_;
  j["modality"] = to_string(current_modality_);
  if (error) {
    j["error"] = *error;
    if (*error == to_string(Errc::turn_timeout)) ++timeouts_;
  } else {
    j["recognized"] = point_json(result.recognized);
    j["label"] = result.label;
    j["distance"] = result.distance;
    if (!lights.empty()) j["lights"] = lights;
  }
  j["match"] = result.match;
  j["coins"] = result.coins;
  emit(j);

  auto& q = quiz_[current_target_];
  q.first += result.match ? 1 : 0;
  q.second += 1;

  const int robot_before = state_.robot_pos;
  state_ = race_step(state_, result);
  auto r = record("race_step");
  r["turn"] = current_turn_;
  r["player_pos"] = state_.player_pos;
  r["robot_pos"] = state_.robot_pos;
  r["robot_moved"] = state_.robot_pos != robot_before;
  r["winner"] = to_string(state_.winner);
  emit(r);

  auto w = record("wallet");
  w["turn"] = current_turn_;
  w["delta"] = result.coins;
  w["balance"] = state_.wallet;
  emit(w);

  TurnOutcome out{current_turn_, current_target_, current_modality_, result, error, std::move(lights), state_};
  current_turn_ = 0;
  return out;
}

void SessionRecorder::finish() {
  // Each target's attempts in this session count as that unit's quiz.
  for (const auto& entry : vocabulary_->entries()) {
    const auto it = quiz_.find(entry.label);
    if (it == quiz_.end()) continue;
    auto j = record("progression");
    j["unit"] = entry.label;
    j["correct"] = it->second.first;
    j["total"] = it->second.second;
    try {
      state_.units = quiz_progression(state_.units, entry.label, it->second.first, it->second.second);
    } catch (const Error& e) {
      if (e.code() != Errc::unit_locked) throw;
      j["error"] = "UnitLocked";
    }
    const auto unit = std::find_if(state_.units.begin(), state_.units.end(),
                                   [&](const Unit& u) { return u.id == entry.label; });
    j["status"] = to_string(unit->status);
    emit(j);
  }
  auto s = record("summary");
  s["winner"] = state_.finished() ? Json(to_string(state_.winner)) : Json(nullptr);
  s["wallet"] = state_.wallet;
  s["player_pos"] = state_.player_pos;
  s["robot_pos"] = state_.robot_pos;
  s["turns_played"] = state_.turn;
  s["timeouts"] = timeouts_;
  emit(s);
}

std::string replay(std::string_view log, const EmotionVocabulary& vocabulary) {
  std::optional<SessionRecorder> rec;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  try {
    while (pos < log.size()) {
      auto end = log.find('\n', pos);
      if (end == std::string_view::npos) end = log.size();
      const auto line = log.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (line.empty()) continue;
      const auto j = Json::parse(line);
      const auto event = j.at("event").get<std::string>();
      if (!rec) {
        if (event != "session") throw Error(Errc::bad_log, "first record must be the session header");
        SessionSettings settings;
        settings.seed = j.at("seed").get<std::uint64_t>();
        settings.board_length = j.at("board_length").get<int>();
        settings.robot = RobotPolicy::parse(j.at("robot").get<std::string>());
        rec.emplace(settings, vocabulary);
        rec->set_time(j.at("t_ms").get<std::int64_t>());
        rec->begin(j.at("turns").get<std::size_t>());
        continue;
      }
      rec->set_time(j.at("t_ms").get<std::int64_t>());
      if (event == "control") {
        std::optional<emotionml::StatusInfo> ack;
        if (j.contains("ack")) {
          const auto& a = j.at("ack");
          ack = emotionml::StatusInfo{a.at("subsystem"), a.at("state"), a.at("command"), a.at("correlation_id"),
                                      a.at("detail")};
        }
        std::optional<std::string> error;
        if (j.contains("error")) error = j.at("error").get<std::string>();
        rec->control(j.at("subsystem").get<std::string>(), j.at("command").get<std::string>(), ack, error);
      } else if (event == "turn") {
        const auto modality = parse_modality(j.at("modality").get<std::string>());
        if (!modality) throw Error(Errc::bad_log, "unknown modality");
        rec->turn(j.at("turn").get<int>(), j.at("target").get<std::string>(), *modality,
                  j.at("media").get<std::string>());
      } else if (event == "annotation") {
        emotionml::EmotionAnnotation a;
        const auto modality = parse_modality(j.at("modality").get<std::string>());
        if (!modality) throw Error(Errc::bad_log, "unknown modality");
        a.modality = *modality;
        a.arousal = j.at("arousal").get<double>();
        a.valence = j.at("valence").get<double>();
        if (!j.at("category").is_null()) a.category = j.at("category").get<std::string>();
        if (!j.at("confidence").is_null()) a.confidence = j.at("confidence").get<double>();
        a.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
        for (const auto& p : j.at("params")) a.parameters.push_back({p.at("name"), p.at("value").get<double>()});
        rec->annotation(a);
      } else if (event == "attempt") {
        if (j.contains("error")) rec->failure(j.at("error").get<std::string>());
      } else if (event == "summary") {
        rec->finish();
      } else if (event != "race_step" && event != "wallet" && event != "progression") {
        throw Error(Errc::bad_log, "unknown event '" + event + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw Error(Errc::bad_log, "line " + std::to_string(line_no) + ": " + e.what());
  } catch (const emotionml::Error& e) {
    throw Error(Errc::bad_log, "line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!rec) throw Error(Errc::bad_log, "empty log");
  return rec->text();
}

}  // namespace asc::platform
