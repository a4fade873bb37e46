#pragma once

// Thin RAII wrapper over POSIX TCP sockets.

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace asc::net {

class SocketError : public std::runtime_error {
 public:
  SocketError(const std::string& what, int err);
  int error_code() const { return err_; }

 private:
  int err_;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  ~Socket();
  Socket(Socket&& other) noexcept;
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;

  // Binds and listens on host:port; port 0 picks an ephemeral port.
  static Socket listen(const std::string& host, std::uint16_t port, int backlog = 64);
  static Socket connect(const std::string& host, std::uint16_t port,
                        std::chrono::milliseconds timeout = std::chrono::seconds(5));

  // Blocks until a connection arrives; returns an invalid socket when the
  // listener was shut down.
  Socket accept() const;

  void send_all(std::string_view bytes) const;
  // Returns 0 on orderly close or after shutdown().
  std::size_t receive(char* buffer, std::size_t size) const;

  std::uint16_t local_port() const;

  // Wakes blocked accept/receive calls from another thread.
  void shutdown() const;
  void close();

  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
};

}  // namespace asc::net
