#include <httplib.h>

#include "asc/runner/service.hpp"

namespace asc::runner {

MediaServer::MediaServer() : server_(std::make_unique<httplib::Server>()) {
  // httplib's default adds SO_REUSEPORT, which lets a second server share a
  // busy port silently.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  });
  server_->Get("/media/latest", [this](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(mutex_);
    if (!latest_) {
      res.status = 404;
      res.set_content("nothing analyzed yet\n", "text/plain");
      return;
    }
    res.status = 200;
    res.set_content(latest_->first, latest_->second);
  });
}

MediaServer::~MediaServer() { stop(); }

void MediaServer::start(const std::string& host, std::uint16_t port) {
  if (port == 0) {
    const int bound = server_->bind_to_any_port(host);
    if (bound <= 0) throw std::runtime_error("media server cannot bind " + host);
    port_ = static_cast<std::uint16_t>(bound);
  } else {
    if (!server_->bind_to_port(host, port)) {
      throw std::runtime_error("media server cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
}

void MediaServer::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
}

void MediaServer::set_latest(std::string bytes, std::string content_type) {
  std::lock_guard lock(mutex_);
  latest_ = std::make_pair(std::move(bytes), std::move(content_type));
}

}  // namespace asc::runner
