#include "asc/runner/bridge.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <fstream>
#include <sstream>

#include "asc/platform/engine.hpp"

namespace asc::runner {
namespace {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

Json error_event(std::string_view code, std::string_view message) {
  return Json{{"event", "error"}, {"code", code}, {"message", message}};
}

Json point_json(const AVPoint& p) { return Json{{"arousal", p.arousal}, {"valence", p.valence}}; }

std::string content_type_for(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html") return "text/html";
  if (ext == ".js") return "text/javascript";
  if (ext == ".css") return "text/css";
  if (ext == ".json") return "application/json";
  return "application/octet-stream";
}

}  // namespace

BridgeController::BridgeController(platform::SessionSettings settings, EmotionVocabulary vocabulary,
                                   BridgeHooks hooks)
    : vocabulary_(std::move(vocabulary)), hooks_(std::move(hooks)), recorder_(settings, vocabulary_) {
  recorder_.begin(0);
}

Json BridgeController::state_event() const {
  const auto& s = recorder_.state();
  return Json{{"event", "state"},
              {"turn", s.turn},
              {"target", target_.empty() ? Json(nullptr) : Json(target_)},
              {"modality", to_string(modality_)},
              {"player_pos", s.player_pos},
              {"robot_pos", s.robot_pos},
              {"wallet", s.wallet},
              {"board_length", s.board_length},
              {"winner", s.finished() ? Json(to_string(s.winner)) : Json(nullptr)}};
}

std::vector<Json> BridgeController::hello() const { return {state_event()}; }

std::vector<Json> BridgeController::handle_text(std::string_view message) {
  Json command;
  try {
    command = Json::parse(message);
  } catch (const Json::exception& e) {
    return {error_event("BadCommand", e.what())};
  }
  return handle(command);
}

std::vector<Json> BridgeController::handle(const Json& command) {
  if (!command.is_object() || !command.contains("cmd") || !command["cmd"].is_string()) {
    return {error_event("BadCommand", "expected an object with a string 'cmd'")};
  }
  const auto cmd = command["cmd"].get<std::string>();
  const auto str = [&](const char* key) -> std::optional<std::string> {
    if (!command.contains(key) || !command[key].is_string()) return std::nullopt;
    return command[key].get<std::string>();
  };

  if (cmd == "select_target") {
    const auto emotion = str("emotion");
    if (!emotion || !vocabulary_.contains(*emotion)) {
      return {error_event("UnknownEmotion", "no emotion '" + emotion.value_or("") + "'")};
    }
    target_ = *emotion;
    const auto p = vocabulary_.at(target_).canonical;
    return {Json{{"event", "target"},
                 {"emotion", target_},
                 {"quadrant", to_string(quadrant(p))},
                 {"canonical", point_json(p)}},
            state_event()};
  }
  if (cmd == "select_modality") {
    const auto text = str("modality");
    const auto m = text ? parse_modality(*text) : std::nullopt;
    if (!m || *m == Modality::fused) return {error_event("UnknownModality", "modality must be face, voice or body")};
    modality_ = *m;
    return {Json{{"event", "modality"}, {"modality", to_string(modality_)}}, state_event()};
  }
  if (cmd == "submit_attempt") {
    const auto path = str("path");
    if (!path) return {error_event("BadCommand", "submit_attempt needs 'path'")};
    if (target_.empty()) return {error_event("NoTarget", "select a target first")};
    if (recorder_.state().finished()) return {error_event("GameFinished", "the race is over"), state_event()};
    ++turn_;
    const std::int64_t now = turn_ * 1000;
    recorder_.set_time(now);
    recorder_.turn(turn_, target_, modality_, *path);
    std::optional<platform::TurnOutcome> outcome;
    try {
      const auto a = hooks_.submit(std::string(platform::modality_subsystem(modality_)), *path, target_, now,
                                   "ui-" + std::to_string(turn_));
      outcome = recorder_.annotation(a);
      if (!outcome) outcome = recorder_.failure("ModalityMismatch");
    } catch (const platform::Error& e) {
      outcome = recorder_.failure(platform::to_string(e.code()));
    } catch (const std::exception& e) {
      outcome = recorder_.failure("ServiceError");
    }
    Json fb{{"event", "feedback"},
            {"turn", outcome->turn},
            {"target", outcome->target},
            {"modality", to_string(outcome->modality)},
            {"recognized", point_json(outcome->result.recognized)},
            {"label", outcome->result.label},
            {"distance", outcome->result.distance},
            {"match", outcome->result.match},
            {"coins", outcome->result.coins},
            {"lights", outcome->lights},
            {"error", outcome->error ? Json(*outcome->error) : Json(nullptr)}};
    return {fb, state_event()};
  }
  if (cmd == "play_reference") {
    if (target_.empty()) return {error_event("NoTarget", "select a target first")};
    const auto path = hooks_.reference ? hooks_.reference(target_) : std::nullopt;
    if (!path) return {error_event("NoReference", "no reference clip for '" + target_ + "'")};
    return {Json{{"event", "reference"}, {"emotion", target_}, {"path", path->string()}}};
  }
  return {error_event("BadCommand", "unknown command '" + cmd + "'")};
}

struct BridgeServer::Impl {
  BridgeController& controller;
  std::string host;
  std::uint16_t requested_port;
  std::optional<std::filesystem::path> static_dir;

  asio::io_context ioc;
  std::optional<tcp::acceptor> acceptor;
  std::thread accept_thread;
  std::mutex controller_mutex;
  std::mutex sessions_mutex;
  std::list<std::pair<std::shared_ptr<tcp::socket>, std::thread>> sessions;
  std::atomic<bool> stopping{false};

  void serve_http(tcp::socket& socket, const http::request<http::string_body>& req) {
    http::response<http::string_body> res;
    res.version(req.version());
    res.keep_alive(false);
    res.result(http::status::not_found);
    res.set(http::field::content_type, "text/plain");
    res.body() = "not found\n";
    if (static_dir && req.method() == http::verb::get) {
      std::string target(req.target());
      if (target == "/") target = "/index.html";
      const auto rel = std::filesystem::path(target).relative_path().lexically_normal();
      const auto full = *static_dir / rel;
      const bool escapes = rel.empty() || rel.begin()->string() == "..";
      if (!escapes && std::filesystem::is_regular_file(full)) {
        std::ifstream in(full, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        res.result(http::status::ok);
        res.set(http::field::content_type, content_type_for(full));
        res.body() = buf.str();
      }
    }
    res.prepare_payload();
    beast::error_code ec;
    http::write(socket, res, ec);
  }

  void session(std::shared_ptr<tcp::socket> socket) {
    beast::error_code ec;
    beast::flat_buffer buffer;
    http::request<http::string_body> req;
    http::read(*socket, buffer, req, ec);
    if (ec) return;
    if (!websocket::is_upgrade(req)) {
      serve_http(*socket, req);
      return;
    }
    websocket::stream<tcp::socket&> ws(*socket);
    ws.accept(req, ec);
    if (ec) return;
    ws.text(true);
    const auto send = [&](const std::vector<Json>& events) {
      for (const auto& e : events) {
        ws.write(asio::buffer(e.dump()), ec);
        if (ec) return;
      }
    };
    {
      std::lock_guard lock(controller_mutex);
      send(controller.hello());
    }
    while (!stopping && !ec) {
      beast::flat_buffer in;
      ws.read(in, ec);
      if (ec) break;
      const auto text = beast::buffers_to_string(in.data());
      std::vector<Json> events;
      {
        std::lock_guard lock(controller_mutex);
        events = controller.handle_text(text);
      }
      send(events);
    }
  }

  void accept_loop() {
    while (!stopping) {
      auto socket = std::make_shared<tcp::socket>(ioc);
      beast::error_code ec;
      acceptor->accept(*socket, ec);
      if (ec) {
        if (stopping) return;
        continue;
      }
      std::lock_guard lock(sessions_mutex);
      sessions.emplace_back(socket, std::thread([this, socket] { session(socket); }));
    }
  }
};

BridgeServer::BridgeServer(BridgeController& controller, std::string host, std::uint16_t port,
                           std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(controller, std::move(host), port, std::move(static_dir))) {}

BridgeServer::~BridgeServer() { stop(); }

void BridgeServer::start() {
  const tcp::endpoint ep(asio::ip::make_address(impl_->host), impl_->requested_port);
  impl_->acceptor.emplace(impl_->ioc);
  impl_->acceptor->open(ep.protocol());
  impl_->acceptor->set_option(asio::socket_base::reuse_address(true));
  impl_->acceptor->bind(ep);
  impl_->acceptor->listen();
  port_ = impl_->acceptor->local_endpoint().port();
  impl_->accept_thread = std::thread([this] { impl_->accept_loop(); });
}

void BridgeServer::stop() {
  if (!impl_->accept_thread.joinable()) return;
  impl_->stopping = true;
  // Unblock accept() and every blocking read at the OS level.
  ::shutdown(impl_->acceptor->native_handle(), SHUT_RDWR);
  impl_->accept_thread.join();
  beast::error_code ec;
  impl_->acceptor->close(ec);
  std::lock_guard lock(impl_->sessions_mutex);
  for (auto& [socket, thread] : impl_->sessions) ::shutdown(socket->native_handle(), SHUT_RDWR);
  for (auto& [socket, thread] : impl_->sessions) thread.join();
  impl_->sessions.clear();
}

}  // namespace asc::runner
