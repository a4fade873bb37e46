// asc: broker, analyzer services, scripted sessions and tooling.
//
// Exit codes: 0 success, 1 unexpected failure, 2 bad invocation,
// 3 port in use, 4 broker unreachable, 5 invalid input.

#include <pthread.h>

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "asc/body/body.hpp"
#include "asc/face/face.hpp"
#include "asc/platform/engine.hpp"
#include "asc/runner/bridge.hpp"
#include "asc/runner/content.hpp"
#include "asc/runner/demo.hpp"
#include "asc/runner/service.hpp"
#include "asc/runner/session.hpp"
#include "asc/stomp/broker.hpp"
#include "asc/voice/prototypes.hpp"

namespace fs = std::filesystem;
using namespace asc;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitPortInUse = 3;
constexpr int kExitBrokerUnreachable = 4;
constexpr int kExitInvalidInput = 5;

// Block SIGINT/SIGTERM in every thread; the caller waits for them explicitly.
sigset_t block_termination() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  return set;
}

int wait_termination(const sigset_t& set) {
  int sig = 0;
  sigwait(&set, &sig);
  return sig;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct ConfigFlags {
  std::optional<fs::path> file;
  std::optional<std::string> broker_host;
  std::optional<int> broker_port;
  std::optional<fs::path> voice_prototypes, body_model, face_model;

  void add(CLI::App& cmd) {
    cmd.add_option("--config", file, "key:value config file");
    cmd.add_option("--broker-host", broker_host);
    cmd.add_option("--broker-port", broker_port)->check(CLI::Range(0, 65535));
    cmd.add_option("--voice-prototypes", voice_prototypes);
    cmd.add_option("--body-model", body_model);
    cmd.add_option("--face-model", face_model);
  }

  runner::RuntimeConfig resolve() const {
    auto c = runner::RuntimeConfig::load(file);
    if (broker_host) c.broker_host = *broker_host;
    if (broker_port) c.broker_port = static_cast<std::uint16_t>(*broker_port);
    if (voice_prototypes) c.voice_prototypes = fs::absolute(*voice_prototypes);
    if (body_model) c.body_model = fs::absolute(*body_model);
    if (face_model) c.face_model = fs::absolute(*face_model);
    c.validate();
    return c;
  }
};

int cmd_broker(const ConfigFlags& flags) {
  const auto set = block_termination();
  const auto config = flags.resolve();
  stomp::BrokerOptions opts;
  opts.host = config.broker_host;
  opts.port = config.broker_port;
  stomp::Broker broker(opts);
  broker.start();
  std::cerr << "broker listening on " << opts.host << ':' << broker.port() << std::endl;
  wait_termination(set);
  broker.stop();
  return 0;
}

int cmd_service(const std::string& subsystem, const ConfigFlags& flags, std::optional<int> media_port) {
  platform::check_subsystem(subsystem);
  const auto set = block_termination();
  auto config = flags.resolve();
  if (media_port) config.media_ports[subsystem] = static_cast<std::uint16_t>(*media_port);
  runner::Service service(subsystem, config);
  std::thread([&service, set] {
    wait_termination(set);
    service.request_stop();
  }).detach();
  return service.run();
}

int cmd_session(const fs::path& script_path, std::optional<std::uint64_t> seed, const ConfigFlags& flags,
                bool spawn, const std::optional<fs::path>& log_path, const std::optional<fs::path>& service_logs) {
  auto config = flags.resolve();
  const auto script = runner::SessionScript::load(script_path, config.vocabulary());
  std::optional<runner::LocalCluster> cluster;
  if (spawn) {
    std::vector<std::string> subs(platform::kSubsystems.begin(), platform::kSubsystems.end());
    auto local = config;
    local.broker_port = 0;
    if (service_logs) fs::create_directories(*service_logs);
    cluster.emplace(local, runner::current_executable(), subs, service_logs);
    config = cluster->config();
  }
  runner::SessionOptions opts;
  opts.config = config;
  opts.seed = seed;
  const auto report = runner::run_session(script, opts);
  if (log_path) {
    std::ofstream out(*log_path, std::ios::binary);
    out << report.log;
    if (!out) throw std::runtime_error("cannot write " + log_path->string());
  } else {
    std::cout << report.log;
  }
  const auto& s = report.final_state;
  std::cerr << "turns " << report.turns.size() << ", wallet " << s.wallet << ", player " << s.player_pos
            << ", robot " << s.robot_pos << ", winner "
            << (s.finished() ? std::string(platform::to_string(s.winner)) : std::string("none")) << ", timeouts "
            << report.timeouts << '\n';
  return 0;
}

int cmd_bridge(int ws_port, const std::string& host, const ConfigFlags& flags, bool spawn,
               const std::optional<fs::path>& static_dir) {
  const auto set = block_termination();
  auto config = flags.resolve();
  std::optional<runner::LocalCluster> cluster;
  if (spawn) {
    auto local = config;
    local.broker_port = 0;
    cluster.emplace(local, runner::current_executable(),
                    std::vector<std::string>(platform::kSubsystems.begin(), platform::kSubsystems.end()));
    config = cluster->config();
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
    throw runner::BrokerUnreachable(e.what());
  }
  for (auto sub : platform::kSubsystems) {
    if (engine.wait_ready(sub, std::chrono::seconds(10))) {
      engine.control(sub, "start", std::string(sub) + "/start");
    } else {
      std::cerr << "warning: " << sub << " service did not answer\n";
    }
  }

  std::vector<voice::PrototypeEntry> library;
  if (!config.voice_prototypes.empty()) library = voice::load_library(config.voice_prototypes, config.vocabulary());

  runner::BridgeHooks hooks;
  hooks.submit = [&engine](const std::string& sub, const std::string& media, const std::string& target,
                           std::int64_t t, const std::string& corr) {
    return engine.submit(sub, media, target, t, corr);
  };
  hooks.reference = [&library](const std::string& emotion) -> std::optional<fs::path> {
    for (const auto& e : library) {
      if (e.label == emotion) return e.clip_path;
    }
    return std::nullopt;
  };
  platform::SessionSettings settings;
  settings.board_length = config.board_length;
  settings.robot = config.robot;
  runner::BridgeController controller(settings, config.vocabulary(), hooks);
  runner::BridgeServer server(controller, host, static_cast<std::uint16_t>(ws_port), static_dir);
  server.start();
  std::cerr << "bridge listening on ws://" << host << ':' << server.port() << std::endl;
  wait_termination(set);
  server.stop();
  engine.disconnect();
  return 0;
}

int cmd_replay(const fs::path& log, bool check) {
  const auto original = slurp(log);
  const auto regenerated = platform::replay(original);
  if (check) {
    if (regenerated != original) {
      std::cerr << "replay differs from " << log.string() << '\n';
      return kExitInvalidInput;
    }
    std::cerr << "replay identical\n";
    return 0;
  }
  std::cout << regenerated;
  return 0;
}

int cmd_train_face(const fs::path& csv, const fs::path& out, double lambda) {
  const auto rows = face::parse_training_csv(slurp(csv));
  face::train_model(rows, lambda).save(out);
  std::cerr << "trained on " << rows.size() << " rows\n";
  return 0;
}

// Layout: <dir>/<basic emotion>/*.csv
int cmd_train_body(const fs::path& dir, const fs::path& out) {
  std::vector<body::LabeledFeatures> samples;
  for (auto basic : kBasicEmotions) {
    const auto sub = dir / std::string(basic);
    if (!fs::is_directory(sub)) continue;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(sub)) {
      if (e.path().extension() == ".csv") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) samples.push_back({std::string(basic), body::extract_features(body::read_trace(f))});
  }
  body::train_centroids(samples).save(out);
  std::cerr << "trained on " << samples.size() << " traces\n";
  return 0;
}

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const stomp::PortInUse& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPortInUse;
  } catch (const runner::BrokerUnreachable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBrokerUnreachable;
  } catch (const platform::Error& e) {
    std::cerr << "error: " << platform::to_string(e.code()) << ": " << e.what() << '\n';
    if (e.code() == platform::Errc::unknown_subsystem) return kExitUsage;
    return kExitInvalidInput;
  } catch (const runner::BadRow& e) {
    std::cerr << "error: BadRow: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const runner::ConfigError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const voice::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const body::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const face::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Emotion-training platform: message bus, analyzers and game sessions"};
  app.require_subcommand(1);
  std::function<int()> action;

  auto* broker = app.add_subcommand("broker", "Run the STOMP broker until SIGINT/SIGTERM");
  ConfigFlags broker_flags;
  broker_flags.add(*broker);
  broker->callback([&] { action = [&] { return cmd_broker(broker_flags); }; });

  auto* service = app.add_subcommand("service", "Run one analyzer service");
  std::string subsystem;
  std::optional<int> media_port;
  ConfigFlags service_flags;
  service->add_option("--subsystem", subsystem)->required()->check(CLI::IsMember({"face", "voice", "body"}));
  service->add_option("--media-port", media_port)->check(CLI::Range(0, 65535));
  service_flags.add(*service);
  service->callback([&] { action = [&] { return cmd_service(subsystem, service_flags, media_port); }; });

  auto* session = app.add_subcommand("session", "Play a scripted session and print its JSON-lines log");
  fs::path script;
  std::optional<std::uint64_t> seed;
  bool spawn = false;
  std::optional<fs::path> log_path, service_logs;
  ConfigFlags session_flags;
  session->add_option("--script", script)->required()->check(CLI::ExistingFile);
  session->add_option("--seed", seed);
  session->add_flag("--spawn", spawn, "start an in-process broker and the three services");
  session->add_option("--log", log_path, "write the log here instead of stdout");
  session->add_option("--service-logs", service_logs, "directory for spawned service output");
  session_flags.add(*session);
  session->callback([&] {
    action = [&] { return cmd_session(script, seed, session_flags, spawn, log_path, service_logs); };
  });

  auto* content = app.add_subcommand("validate-content", "Chance-corrected screening of stimuli");
  fs::path content_csv;
  content->add_option("csv", content_csv)->required()->check(CLI::ExistingFile);
  content->callback([&] {
    action = [&] {
      std::cout << runner::format_report(runner::validate_content_file(content_csv));
      return 0;
    };
  });

  auto* bridge = app.add_subcommand("bridge", "WebSocket bridge for the browser UI");
  int ws_port = 8090;
  std::string ws_host = "127.0.0.1";
  bool bridge_spawn = false;
  std::optional<fs::path> static_dir;
  ConfigFlags bridge_flags;
  bridge->add_option("--ws-port", ws_port)->required()->check(CLI::Range(0, 65535));
  bridge->add_option("--host", ws_host);
  bridge->add_flag("--spawn", bridge_spawn, "start an in-process broker and the three services");
  bridge->add_option("--static", static_dir, "directory served for plain HTTP GETs")->check(CLI::ExistingDirectory);
  bridge_flags.add(*bridge);
  bridge->callback([&] {
    action = [&] { return cmd_bridge(ws_port, ws_host, bridge_flags, bridge_spawn, static_dir); };
  });

  auto* replay = app.add_subcommand("replay", "Regenerate a session log from its input records");
  fs::path replay_log;
  bool replay_check = false;
  replay->add_option("log", replay_log)->required()->check(CLI::ExistingFile);
  replay->add_flag("--check", replay_check, "exit non-zero unless the regenerated log is identical");
  replay->callback([&] { action = [&] { return cmd_replay(replay_log, replay_check); }; });

  auto* train = app.add_subcommand("train", "Fit analyzer models");
  train->require_subcommand(1);
  auto* train_face = train->add_subcommand("face", "Ridge fit from f1..f34,valence,arousal rows");
  fs::path face_csv, face_out;
  double lambda = 1.0;
  train_face->add_option("csv", face_csv)->required()->check(CLI::ExistingFile);
  train_face->add_option("--out", face_out)->required();
  train_face->add_option("--lambda", lambda)->check(CLI::NonNegativeNumber);
  train_face->callback([&] { action = [&] { return cmd_train_face(face_csv, face_out, lambda); }; });
  auto* train_body = train->add_subcommand("body", "Centroids from <dir>/<basic emotion>/*.csv traces");
  fs::path body_dir, body_out;
  train_body->add_option("dir", body_dir)->required()->check(CLI::ExistingDirectory);
  train_body->add_option("--out", body_out)->required();
  train_body->callback([&] { action = [&] { return cmd_train_body(body_dir, body_out); }; });

  auto* demo = app.add_subcommand("make-demo", "Write synthetic models, media, scripts and a config");
  fs::path demo_dir;
  std::uint64_t demo_seed = 1;
  demo->add_option("dir", demo_dir)->required();
  demo->add_option("--seed", demo_seed);
  demo->callback([&] {
    action = [&] {
      const auto set = runner::make_demo(demo_dir, demo_seed);
      std::cout << "config  " << set.config.string() << "\nscript  " << set.session_script.string()
                << "\nvoice   " << set.voice_script.string() << "\ncontent " << set.content_csv.string() << '\n';
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }
  return guarded(action);
}
