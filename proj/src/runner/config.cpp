#include "asc/runner/config.hpp"

#include <cctype>
#include <cstdlib>
#include <set>

namespace asc::runner {
namespace {

constexpr std::array<std::string_view, 12> kKnownKeys{
    "broker.host",      "broker.port", "media.face.port",      "media.voice.port",
    "media.body.port",  "voice.prototypes", "body.model",      "face.model",
    "session.board_length", "session.robot", "session.turn_timeout_ms", "control.ack_timeout_ms"};

std::uint16_t port_value(const KeyValueFile& kv, std::string_view key, std::uint16_t fallback) {
  const auto v = kv.get_int(key, fallback);
  if (v < 0 || v > 65535) throw ConfigError(std::string(key) + " must be a port number");
  return static_cast<std::uint16_t>(v);
}

std::filesystem::path path_value(const KeyValueFile& kv, std::string_view key, const std::filesystem::path& base) {
  const auto v = kv.get(key);
  if (!v || v->empty()) return {};
  std::filesystem::path p(*v);
  return p.is_relative() ? base / p : p;
}

}  // namespace

std::string environment_name(std::string_view key) {
  std::string out = "ASC_";
  for (char c : key) {
    out += (c == '.' || c == '-') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return out;
}

RuntimeConfig RuntimeConfig::from_keyvalue(const KeyValueFile& kv, const std::filesystem::path& base) {
  RuntimeConfig c;
  try {
    c.broker_host = kv.get("broker.host").value_or(c.broker_host);
    c.broker_port = port_value(kv, "broker.port", c.broker_port);
    for (auto& [sub, port] : c.media_ports) port = port_value(kv, "media." + sub + ".port", port);
    c.voice_prototypes = path_value(kv, "voice.prototypes", base);
    c.body_model = path_value(kv, "body.model", base);
    c.face_model = path_value(kv, "face.model", base);
    c.board_length = static_cast<int>(kv.get_int("session.board_length", c.board_length));
    if (auto robot = kv.get("session.robot")) c.robot = platform::RobotPolicy::parse(*robot);
    c.turn_timeout = std::chrono::milliseconds(kv.get_int("session.turn_timeout_ms", c.turn_timeout.count()));
    c.ack_timeout = std::chrono::milliseconds(kv.get_int("control.ack_timeout_ms", c.ack_timeout.count()));
    std::set<std::string> seen;
    for (const auto& [key, value] : kv.entries()) {
      if (!key.starts_with("emotion.")) continue;
      const auto label = key.substr(8);
      if (!seen.insert(label).second) continue;
      const auto v = kv.require_doubles(key);  // last entry wins
      if (v.size() != 2) throw ConfigError(key + " needs 'valence, arousal'");
      c.emotion_overrides.push_back({label, {v[1], v[0]}});
    }
  } catch (const KeyValueError& e) {
    throw ConfigError(e.what());
  } catch (const platform::Error& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

RuntimeConfig RuntimeConfig::load(const std::optional<std::filesystem::path>& file, bool use_environment) {
  KeyValueFile kv;
  std::filesystem::path base = std::filesystem::current_path();
  if (file) {
    try {
      kv = KeyValueFile::load(*file);
    } catch (const KeyValueError& e) {
      throw ConfigError(e.what());
    }
    base = std::filesystem::absolute(*file).parent_path();
  }
  if (use_environment) {
    for (auto key : kKnownKeys) {
      if (const char* v = std::getenv(environment_name(key).c_str())) kv.set(std::string(key), v);
    }
  }
  auto c = from_keyvalue(kv, base);
  c.source = file;
  return c;
}

void RuntimeConfig::validate() const {
  std::set<std::uint16_t> used;
  for (const auto& [sub, port] : media_ports) {
    if (port == 0) continue;
    if (port == broker_port || !used.insert(port).second) {
      throw ConfigError("media port " + std::to_string(port) + " for " + sub + " is not distinct");
    }
  }
  if (board_length < 1) throw ConfigError("session.board_length must be >= 1");
  if (turn_timeout.count() <= 0 || ack_timeout.count() <= 0) throw ConfigError("timeouts must be positive");
  vocabulary();
}

EmotionVocabulary RuntimeConfig::vocabulary() const {
  try {
    return EmotionVocabulary::standard().with_overrides(emotion_overrides);
  } catch (const VocabularyError& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace asc::runner
