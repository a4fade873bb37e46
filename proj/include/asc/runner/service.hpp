#pragma once

// Analyzer services: one process per subsystem, driven over its control
// queue, publishing results on /topic/asc and exposing the last analyzed
// media over HTTP.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "asc/emotionml.hpp"
#include "asc/runner/config.hpp"

namespace httplib {
class Server;
}

namespace asc::runner {

class BrokerUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// GET /media/latest: 200 with the last stored bytes, 404 before any.
class MediaServer {
 public:
  MediaServer();
  ~MediaServer();
  MediaServer(const MediaServer&) = delete;
  MediaServer& operator=(const MediaServer&) = delete;

  // Port 0 picks a free port. Throws std::runtime_error if binding fails.
  void start(const std::string& host, std::uint16_t port);
  void stop();
  std::uint16_t port() const { return port_; }

  void set_latest(std::string bytes, std::string content_type);

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::uint16_t port_ = 0;
  std::mutex mutex_;
  std::optional<std::pair<std::string, std::string>> latest_;
};

struct Analysis {
  emotionml::EmotionAnnotation annotation;
  std::string media;         // bytes served at /media/latest
  std::string content_type;  // audio/wav or text/csv
};

class Analyzer {
 public:
  virtual ~Analyzer() = default;
  // `target` may be empty. Throws on unreadable or invalid media.
  virtual Analysis analyze(const std::filesystem::path& media, const std::string& target,
                           std::int64_t timestamp_ms) = 0;
};

// Loads the subsystem's model or prototype library named in the config.
std::unique_ptr<Analyzer> make_analyzer(std::string_view subsystem, const RuntimeConfig& config);

enum class ServiceState { idle, running, stopped, exiting };
std::string_view to_string(ServiceState s);

class Service {
 public:
  Service(std::string subsystem, RuntimeConfig config);

  // Blocks until a shutdown command, request_stop() or loss of the broker.
  // Returns the process exit code: 0 after shutdown, 4 when the broker went
  // away. Throws BrokerUnreachable if it cannot connect within
  // `connect_timeout`.
  int run(std::chrono::milliseconds connect_timeout = std::chrono::seconds(10));
  void request_stop() { stop_requested_ = true; }

  std::uint16_t media_port() const { return media_.port(); }

 private:
  std::string subsystem_;
  RuntimeConfig config_;
  std::unique_ptr<Analyzer> analyzer_;
  MediaServer media_;
  ServiceState state_ = ServiceState::idle;
  std::atomic<bool> stop_requested_{false};
};

}  // namespace asc::runner
