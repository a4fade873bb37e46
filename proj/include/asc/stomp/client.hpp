#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "asc/stomp/frame.hpp"
#include "asc/stomp/socket.hpp"

namespace asc::stomp {

class ClientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Single-owner STOMP client. A background thread reads frames; MESSAGE
// frames queue up for next_message(). Not safe to drive from two threads.
class Client {
 public:
  using Clock = std::chrono::steady_clock;

  Client() = default;
  ~Client();
  Client(const Client&) = delete;
  Client& operator=(const Client&) = delete;

  // Sends CONNECT and waits for CONNECTED. Throws ClientError or
  // net::SocketError.
  void connect(const std::string& host, std::uint16_t port,
               std::chrono::milliseconds timeout = std::chrono::seconds(5));

  // With a receipt the call returns only after the broker confirmed it.
  void subscribe(const Destination& dest, const std::string& id, bool with_receipt = true);
  void unsubscribe(const std::string& id, bool with_receipt = true);
  void send(const Destination& dest, std::string body, std::vector<Header> headers = {},
            bool with_receipt = false);

  std::optional<Frame> next_message(std::chrono::milliseconds timeout);

  // Graceful DISCONNECT with receipt, then close.
  void disconnect(std::chrono::milliseconds timeout = std::chrono::seconds(2));

  bool is_connected() const;
  // Last ERROR frame received from the broker, if any.
  std::optional<Frame> last_error() const;
  const std::string& server_version() const { return version_; }

  std::chrono::milliseconds receipt_timeout{std::chrono::seconds(5)};

 private:
  void read_loop();
  void write(const Frame& f);
  std::string next_receipt_id();
  void wait_receipt(const std::string& id, std::chrono::milliseconds timeout);
  void close();

  net::Socket socket_;
  std::thread reader_;
  std::string version_;
  std::uint64_t receipt_counter_ = 0;

  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Frame> inbox_;
  std::set<std::string> receipts_;
  std::optional<Frame> connected_frame_;
  std::optional<Frame> error_;
  bool closed_ = true;
};

}  // namespace asc::stomp
