#include <doctest.h>

#include <csignal>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "asc/runner/demo.hpp"
#include "asc/runner/session.hpp"
#include "support.hpp"

using namespace asc;
using namespace asc::runner;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

const fs::path kExe = ASC_EXE;
const std::vector<std::string> kAll{"face", "voice", "body"};

const DemoSet& demo() {
  static asc::test::TempDir dir("e2e-demo");
  static const DemoSet set = make_demo(dir.path(), 1);
  return set;
}

RuntimeConfig demo_config() {
  auto c = RuntimeConfig::load(demo().config, false);
  c.broker_port = 0;
  c.turn_timeout = 1500ms;
  return c;
}

SessionReport play(const fs::path& script, const std::function<void(LocalCluster&, int)>& on_turn = {}) {
  LocalCluster cluster(demo_config(), kExe, kAll);
  SessionOptions o;
  o.config = cluster.config();
  if (on_turn) o.on_turn = [&](int t) { on_turn(cluster, t); };
  return run_session(SessionScript::load(script, o.config.vocabulary()), o);
}

std::vector<nlohmann::json> records(const std::string& log) {
  std::vector<nlohmann::json> out;
  std::istringstream in(log);
  for (std::string line; std::getline(in, line);) out.push_back(nlohmann::json::parse(line));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Run {
  int code;
  std::string output;
};

Run cli(std::vector<std::string> args, const fs::path& scratch) {
  args.insert(args.begin(), kExe.string());
  const auto out = scratch / "cli.out";
  fs::remove(out);
  auto child = ChildProcess::spawn(args, out);
  const auto code = child.wait(60s);
  REQUIRE(code.has_value());
  return {*code, slurp(out)};
}

}  // namespace

TEST_CASE("six-turn session is deterministic across runs") {
  const auto a = play(demo().session_script);
  const auto b = play(demo().session_script);
  CHECK(a.log == b.log);
  REQUIRE(a.turns.size() == 6);
  for (const auto& t : a.turns) {
    CAPTURE(t.target);
    CHECK_FALSE(t.error);
    CHECK(t.result.match);
  }
  CHECK(a.timeouts == 0);
  CHECK(platform::replay(a.log) == a.log);

  const auto recs = records(a.log);
  CHECK(recs.front()["event"] == "session");
  CHECK(recs.front()["seed"] == 7);
  CHECK(recs.back()["event"] == "summary");
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(recs[i]["seq"] == i);
  int controls = 0;
  for (const auto& r : recs) controls += r["event"] == "control";
  CHECK(controls >= 3);
}

TEST_CASE("ten matched voice turns win the race") {
  const auto r = play(demo().voice_script);
  CHECK(r.final_state.winner == platform::Winner::player);
  CHECK(r.final_state.turn == 10);
  CHECK(r.final_state.wallet >= 10);
  CHECK(r.final_state.robot_pos == 4);
}

TEST_CASE("losing the body service mid-run yields timeouts and a complete log") {
  const auto r = play(demo().session_script, [](LocalCluster& c, int turn) {
    if (turn == 2) {
      c.service("body").kill(SIGKILL);
      c.service("body").wait(5s);
    }
  });
  REQUIRE(r.turns.size() == 6);
  CHECK(r.turns[1].error == "TurnTimeout");
  CHECK(r.turns[4].error == "TurnTimeout");
  CHECK(r.timeouts == 2);
  for (std::size_t i : {0u, 2u, 3u, 5u}) CHECK(r.turns[i].result.match);

  const auto recs = records(r.log);
  CHECK(recs.back()["event"] == "summary");
  CHECK(recs.back()["timeouts"] == 2);
  CHECK(platform::replay(r.log) == r.log);
}

TEST_CASE("command line exit codes") {
  asc::test::TempDir dir("cli");
  const auto conf = demo().config.string();

  auto r = cli({"validate-content", demo().content_csv.string()}, dir.path());
  CHECK(r.code == 0);
  CHECK(r.output.find("borderline,36,60,6,52") != std::string::npos);

  std::ofstream(dir / "bad.csv") << "id,correct,n,k\nx,70,60,6\n";
  CHECK(cli({"validate-content", (dir / "bad.csv").string()}, dir.path()).code == 5);

  CHECK(cli({"service", "--subsystem", "smell"}, dir.path()).code == 2);
  CHECK(cli({"no-such-command"}, dir.path()).code == 2);
  CHECK(cli({"bridge"}, dir.path()).code == 2);

  std::ofstream(dir / "bad.txt") << "turn: ecstatic voice x.wav\n";
  CHECK(cli({"session", "--script", (dir / "bad.txt").string(), "--config", conf}, dir.path()).code == 5);

  // Nothing listens on port 1.
  CHECK(cli({"session", "--script", demo().session_script.string(), "--config", conf, "--broker-port", "1"},
            dir.path())
            .code == 4);

  {
    stomp::BrokerOptions o;
    o.port = 0;
    stomp::Broker busy(o);
    busy.start();
    CHECK(cli({"broker", "--broker-port", std::to_string(busy.port())}, dir.path()).code == 3);
  }

  const auto log = dir / "session.jsonl";
  r = cli({"session", "--script", demo().session_script.string(), "--config", conf, "--spawn", "--log",
           log.string()},
          dir.path());
  CHECK(r.code == 0);
  const auto text = slurp(log);
  CHECK(records(text).size() > 20);
  CHECK(cli({"replay", log.string(), "--check"}, dir.path()).code == 0);
  std::ofstream(log, std::ios::app) << "{\"seq\":999}\n";
  CHECK(cli({"replay", log.string(), "--check"}, dir.path()).code == 5);

  CHECK(cli({"make-demo", (dir / "demo").string(), "--seed", "2"}, dir.path()).code == 0);
  CHECK(fs::exists(dir / "demo" / "asc.conf"));
  CHECK(cli({"train", "face", (demo().root / "face/train.csv").string(), "--out", (dir / "face.model").string()},
            dir.path())
            .code == 0);
  CHECK(cli({"train", "body", (demo().root / "body/train").string(), "--out", (dir / "body.model").string()},
            dir.path())
            .code == 0);
  CHECK(slurp(dir / "body.model") == slurp(demo().root / "body/model"));
}

TEST_CASE("services stop on SIGTERM") {
  stomp::BrokerOptions o;
  o.port = 0;
  stomp::Broker broker(o);
  broker.start();
  asc::test::TempDir dir("svc");
  auto child = ChildProcess::spawn({kExe.string(), "service", "--subsystem", "voice", "--config",
                                    demo().config.string(), "--broker-port", std::to_string(broker.port()),
                                    "--media-port", "0"},
                                   dir / "svc.out");
  std::this_thread::sleep_for(500ms);
  CHECK(child.running());
  child.kill(SIGTERM);
  const auto code = child.wait(10s);
  REQUIRE(code.has_value());
  CHECK(*code == 0);
}
