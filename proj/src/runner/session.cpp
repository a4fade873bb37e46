#include "asc/runner/session.hpp"

#include <algorithm>
#include <csignal>
#include <fstream>
#include <sstream>

#include "asc/keyvalue.hpp"
#include "asc/platform/engine.hpp"
#include "asc/runner/service.hpp"

namespace asc::runner {
namespace {

using platform::Errc;
using platform::Error;

std::vector<std::string_view> words(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    const auto start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos > start) out.push_back(text.substr(start, pos - start));
  }
  return out;
}

// Subsystems in the fixed face, voice, body order.
std::vector<std::string> used_subsystems(const SessionScript& script) {
  std::vector<std::string> out;
  for (auto sub : platform::kSubsystems) {
    const auto m = platform::subsystem_modality(sub);
    if (std::any_of(script.turns.begin(), script.turns.end(), [&](const TurnSpec& t) { return t.modality == m; })) {
      out.emplace_back(sub);
    }
  }
  return out;
}

}  // namespace

SessionScript SessionScript::parse(std::string_view text, const std::filesystem::path& base_dir,
                                   const EmotionVocabulary& vocabulary) {
  SessionScript script;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  const auto fail = [&](const std::string& why) {
    throw Error(Errc::script_invalid, "line " + std::to_string(line_no) + ": " + why);
  };
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) fail("expected 'key: value'");
    const auto key = trim(line.substr(0, colon));
    const auto value = trim(line.substr(colon + 1));
    try {
      if (key == "seed") {
        const double v = parse_double(value);
        if (v < 0 || v != static_cast<double>(static_cast<std::uint64_t>(v))) fail("seed must be a non-negative integer");
        script.seed = static_cast<std::uint64_t>(v);
      } else if (key == "board_length") {
        const double v = parse_double(value);
        if (v < 1 || v != static_cast<int>(v)) fail("board_length must be a positive integer");
        script.board_length = static_cast<int>(v);
      } else if (key == "robot") {
        script.robot = platform::RobotPolicy::parse(value);
      } else if (key == "turn") {
        const auto w = words(value);
        if (w.size() != 3) fail("turn needs '<emotion> <modality> <path>'");
        TurnSpec t;
        t.target = std::string(w[0]);
        if (!vocabulary.contains(t.target)) fail("unknown emotion '" + t.target + "'");
        const auto m = parse_modality(w[1]);
        if (!m || *m == Modality::fused) fail("modality must be face, voice or body");
        t.modality = *m;
        t.media = std::filesystem::path(std::string(w[2]));
        if (t.media.is_relative()) t.media = base_dir / t.media;
        if (!std::filesystem::exists(t.media)) fail("media " + t.media.string() + " does not exist");
        script.turns.push_back(std::move(t));
      } else {
        fail("unknown key '" + std::string(key) + "'");
      }
    } catch (const KeyValueError& e) {
      fail(e.what());
    }
  }
  return script;
}

SessionScript SessionScript::load(const std::filesystem::path& path, const EmotionVocabulary& vocabulary) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::script_invalid, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), std::filesystem::absolute(path).parent_path(), vocabulary);
}

std::string format_script(const SessionScript& script) {
  std::string out;
  if (script.seed) out += "seed: " + std::to_string(*script.seed) + '\n';
  if (script.board_length) out += "board_length: " + std::to_string(*script.board_length) + '\n';
  if (script.robot) out += "robot: " + script.robot->describe() + '\n';
  for (const auto& t : script.turns) {
    out += "turn: " + t.target + ' ' + std::string(to_string(t.modality)) + ' ' + t.media.string() + '\n';
  }
  return out;
}

LocalCluster::LocalCluster(RuntimeConfig config, const std::filesystem::path& executable,
                           const std::vector<std::string>& subsystems,
                           const std::optional<std::filesystem::path>& log_dir)
    : config_(std::move(config)) {
  stomp::BrokerOptions opts;
  opts.host = config_.broker_host;
  opts.port = config_.broker_port;
  broker_ = std::make_unique<stomp::Broker>(opts);
  broker_->start();
  config_.broker_port = broker_->port();
  for (const auto& sub : subsystems) {
    platform::check_subsystem(sub);
    std::vector<std::string> argv{executable.string(), "service",       "--subsystem", sub,
                                  "--broker-host",     config_.broker_host, "--broker-port",
                                  std::to_string(config_.broker_port), "--media-port", "0"};
    if (!config_.voice_prototypes.empty()) {
      argv.insert(argv.end(), {"--voice-prototypes", config_.voice_prototypes.string()});
    }
    if (!config_.body_model.empty()) argv.insert(argv.end(), {"--body-model", config_.body_model.string()});
    if (!config_.face_model.empty()) argv.insert(argv.end(), {"--face-model", config_.face_model.string()});
    std::optional<std::filesystem::path> log;
    if (log_dir) log = *log_dir / (sub + ".log");
    services_.emplace(sub, ChildProcess::spawn(argv, log));
  }
}

LocalCluster::~LocalCluster() {
  for (auto& [sub, child] : services_) {
    child.kill(SIGTERM);
    child.wait(std::chrono::seconds(2));
  }
  services_.clear();
  broker_->stop();
}

SessionReport run_session(const SessionScript& script, const SessionOptions& options) {
  const auto& config = options.config;
  const auto vocabulary = config.vocabulary();
  platform::SessionSettings settings;
  settings.seed = options.seed.value_or(script.seed.value_or(0));
  settings.board_length = script.board_length.value_or(config.board_length);
  settings.robot = script.robot.value_or(config.robot);

  platform::SessionRecorder recorder(settings, vocabulary, options.sink);
  recorder.set_time(0);
  recorder.begin(script.turns.size());

  SessionReport report;
  if (script.turns.empty()) {
    report.log = recorder.text();
    report.final_state = recorder.state();
    return report;
  }

  platform::EngineOptions eo;
  eo.host = config.broker_host;
  eo.port = config.broker_port;
  eo.ack_timeout = config.ack_timeout;
  eo.result_timeout = config.turn_timeout;
  platform::Engine engine(eo);
  try {
    engine.connect();
  } catch (const std::exception& e) {
    throw BrokerUnreachable(std::string("session cannot reach the broker: ") + e.what());
  }

  const auto subsystems = used_subsystems(script);
  const auto control = [&](const std::string& sub, const std::string& command) {
    try {
      recorder.control(sub, command, engine.control(sub, command, sub + "/" + command), std::nullopt);
    } catch (const Error& e) {
      recorder.control(sub, command, std::nullopt, std::string(platform::to_string(e.code())));
    }
  };
  for (const auto& sub : subsystems) {
    engine.wait_ready(sub, options.ready_timeout);
    control(sub, "start");
  }

  int turn = 0;
  for (const auto& spec : script.turns) {
    if (recorder.state().finished()) break;
    ++turn;
    const std::int64_t now = turn * kTurnSpacingMs;
    recorder.set_time(now);
    if (options.on_turn) options.on_turn(turn);
    recorder.turn(turn, spec.target, spec.modality, spec.media.string());
    const std::string sub(platform::modality_subsystem(spec.modality));
    std::optional<platform::TurnOutcome> outcome;
    try {
      const auto a = engine.submit(sub, spec.media.string(), spec.target, now, "turn-" + std::to_string(turn));
      outcome = recorder.annotation(a);
      if (!outcome) outcome = recorder.failure("ModalityMismatch");
    } catch (const Error& e) {
      outcome = recorder.failure(platform::to_string(e.code()));
    } catch (const emotionml::Error& e) {
      outcome = recorder.failure(emotionml::to_string(e.code()));
    }
    if (outcome->error && *outcome->error == platform::to_string(Errc::turn_timeout)) ++report.timeouts;
    report.turns.push_back(std::move(*outcome));
  }

  recorder.set_time((turn + 1) * kTurnSpacingMs);
  for (const auto& sub : subsystems) control(sub, "stop");
  recorder.finish();
  engine.disconnect();

  report.log = recorder.text();
  report.final_state = recorder.state();
  return report;
}

}  // namespace asc::runner
