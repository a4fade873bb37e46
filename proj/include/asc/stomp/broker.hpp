#pragma once

// Minimal STOMP 1.2 broker: topics fan out to every current subscriber,
// queues deliver each message to exactly one consumer (round-robin) and
// buffer FIFO while nobody is subscribed.

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "asc/stomp/frame.hpp"
#include "asc/stomp/socket.hpp"

namespace asc::stomp {

class PortInUse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BrokerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 61613;
  // Per-queue buffer while no consumer is subscribed; the oldest message is
  // dropped when full.
  std::size_t queue_capacity = 10000;
};

class Broker {
 public:
  explicit Broker(BrokerOptions options = {});
  ~Broker();
  Broker(const Broker&) = delete;
  Broker& operator=(const Broker&) = delete;

  // Binds and starts accepting. Throws PortInUse.
  void start();
  // Closes every connection and joins all threads. Idempotent.
  void stop();

  std::uint16_t port() const { return port_; }
  bool running() const { return running_; }

  // Publishes as if a client had sent SEND. Returns the number of MESSAGE
  // frames dispatched (0 when a queue message was buffered).
  std::size_t publish(const Destination& dest, std::string body, std::vector<Header> headers = {});

  std::size_t connection_count() const;
  std::size_t buffered(const Destination& queue) const;
  std::uint64_t dropped() const { return dropped_; }

 private:
  struct Connection;
  struct Subscriber {
    std::shared_ptr<Connection> connection;
    std::string subscription_id;
  };
  struct QueueState {
    std::vector<Subscriber> consumers;
    std::size_t next = 0;
    std::vector<std::pair<std::string, std::vector<Header>>> buffer;  // FIFO
    std::size_t head = 0;
  };

  void accept_loop();
  void serve(const std::shared_ptr<Connection>& conn);
  // Returns false when the connection must close.
  bool handle(const std::shared_ptr<Connection>& conn, Frame& frame);
  void protocol_error(const std::shared_ptr<Connection>& conn, const std::string& message,
                      const Frame* offending);
  void subscribe(const std::shared_ptr<Connection>& conn, const std::string& id, const Destination& dest);
  void unsubscribe_all(const std::shared_ptr<Connection>& conn);
  void deliver(const Subscriber& sub, const Destination& dest, const std::string& body,
               const std::vector<Header>& headers);
  std::size_t publish_locked(const Destination& dest, std::string body, std::vector<Header> headers);
  void reap_finished();

  BrokerOptions options_;
  net::Socket listener_;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;

  mutable std::mutex registry_mutex_;
  std::map<std::string, std::vector<Subscriber>> topics_;
  std::map<std::string, QueueState> queues_;
  std::uint64_t next_message_id_ = 1;

  mutable std::mutex connections_mutex_;
  std::map<std::uint64_t, std::shared_ptr<Connection>> connections_;
  std::uint64_t next_connection_id_ = 1;
  std::atomic<std::uint64_t> dropped_{0};
};

}  // namespace asc::stomp
