#include "asc/stomp/broker.hpp"

#include <algorithm>
#include <cerrno>
#include <condition_variable>
#include <deque>
#include <set>

namespace asc::stomp {

struct Broker::Connection {
  std::uint64_t id = 0;
  net::Socket socket;
  std::thread reader;
  std::thread writer;
  std::atomic<bool> finished{false};

  std::mutex out_mutex;
  std::condition_variable out_cv;
  std::deque<std::string> outbound;
  bool closing = false;  // flush then shut the socket

  // Only touched by the connection's reader thread.
  bool connected = false;
  std::set<std::string> subscription_ids;

  void enqueue(std::string bytes) {
    {
      std::lock_guard lock(out_mutex);
      if (closing) return;
      outbound.push_back(std::move(bytes));
    }
    out_cv.notify_one();
  }

  void close_after_flush() {
    {
      std::lock_guard lock(out_mutex);
      closing = true;
    }
    out_cv.notify_one();
  }

  void write_loop() {
    for (;;) {
      std::string bytes;
      {
        std::unique_lock lock(out_mutex);
        out_cv.wait(lock, [&] { return closing || !outbound.empty(); });
        if (outbound.empty()) break;
        bytes = std::move(outbound.front());
        outbound.pop_front();
      }
      try {
        socket.send_all(bytes);
      } catch (const net::SocketError&) {
        std::lock_guard lock(out_mutex);
        outbound.clear();
        closing = true;
        break;
      }
    }
    socket.shutdown();
  }
};

Broker::Broker(BrokerOptions options) : options_(std::move(options)) {}

Broker::~Broker() { stop(); }

void Broker::start() {
  if (running_) return;
  try {
    listener_ = net::Socket::listen(options_.host, options_.port);
  } catch (const net::SocketError& e) {
    if (e.error_code() == EADDRINUSE) {
      throw PortInUse("port " + std::to_string(options_.port) + " is already in use");
    }
    throw;
  }
  port_ = listener_.local_port();
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void Broker::stop() {
  if (!running_.exchange(false)) return;
  listener_.shutdown();
  if (accept_thread_.joinable()) accept_thread_.join();
  listener_.close();

  std::map<std::uint64_t, std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(connections_mutex_);
    conns.swap(connections_);
  }
  for (auto& [id, conn] : conns) {
    conn->socket.shutdown();
    conn->close_after_flush();
  }
  for (auto& [id, conn] : conns) {
    if (conn->reader.joinable()) conn->reader.join();
    if (conn->writer.joinable()) conn->writer.join();
  }
  std::lock_guard lock(registry_mutex_);
  topics_.clear();
  queues_.clear();
}

void Broker::accept_loop() {
  while (running_) {
    net::Socket client = listener_.accept();
    if (!client.valid()) break;
    if (!running_) break;
    reap_finished();
    auto conn = std::make_shared<Connection>();
    conn->socket = std::move(client);
    {
      std::lock_guard lock(connections_mutex_);
      conn->id = next_connection_id_++;
      connections_[conn->id] = conn;
    }
    conn->writer = std::thread([conn] { conn->write_loop(); });
    conn->reader = std::thread([this, conn] { serve(conn); });
  }
}

void Broker::reap_finished() {
  std::vector<std::shared_ptr<Connection>> done;
  {
    std::lock_guard lock(connections_mutex_);
    for (auto it = connections_.begin(); it != connections_.end();) {
      if (it->second->finished) {
        done.push_back(it->second);
        it = connections_.erase(it);
      } else {
        ++it;
      }
    }
  }
  for (auto& conn : done) {
    if (conn->reader.joinable()) conn->reader.join();
    if (conn->writer.joinable()) conn->writer.join();
  }
}

void Broker::serve(const std::shared_ptr<Connection>& conn) {
  FrameReader reader;
  char buffer[16384];
  bool open = true;
  while (open) {
    std::size_t n = 0;
    try {
      n = conn->socket.receive(buffer, sizeof(buffer));
    } catch (const net::SocketError&) {
      n = 0;
    }
    if (n == 0) break;
    reader.feed(std::string_view(buffer, n));
    try {
      while (open) {
        auto frame = reader.next();
        if (!frame) break;
        open = handle(conn, *frame);
      }
    } catch (const Error& e) {
      protocol_error(conn, e.what(), nullptr);
      open = false;
    }
  }
  unsubscribe_all(conn);
  conn->close_after_flush();
  conn->finished = true;
}

void Broker::protocol_error(const std::shared_ptr<Connection>& conn, const std::string& message,
                            const Frame* offending) {
  Frame err;
  err.command = Command::ERROR;
  err.add("message", message.substr(0, 200));
  if (offending) {
    if (auto receipt = offending->header("receipt")) err.add("receipt-id", std::string(*receipt));
  }
  err.body = message;
  conn->enqueue(encode_frame(err));
  conn->close_after_flush();
}

bool Broker::handle(const std::shared_ptr<Connection>& conn, Frame& frame) {
  auto send_receipt = [&] {
    if (auto receipt = frame.header("receipt")) {
      Frame r;
      r.command = Command::RECEIPT;
      r.add("receipt-id", std::string(*receipt));
      conn->enqueue(encode_frame(r));
    }
  };

  if (!conn->connected) {
    if (frame.command != Command::CONNECT) {
      protocol_error(conn, "expected CONNECT", &frame);
      return false;
    }
    if (auto versions = frame.header("accept-version");
        versions && versions->find("1.2") == std::string_view::npos) {
      protocol_error(conn, "only STOMP 1.2 is supported", &frame);
      return false;
    }
    conn->connected = true;
    Frame ok;
    ok.command = Command::CONNECTED;
    ok.add("version", "1.2").add("server", "asc-broker/1.0").add("heart-beat", "0,0");
    ok.add("session", std::to_string(conn->id));
    conn->enqueue(encode_frame(ok));
    return true;
  }

  switch (frame.command) {
    case Command::SEND: {
      auto dest_text = frame.header("destination");
      auto dest = dest_text ? Destination::parse(*dest_text) : std::nullopt;
      if (!dest) {
        protocol_error(conn, "SEND requires a /topic/ or /queue/ destination", &frame);
        return false;
      }
      std::vector<Header> passthrough;
      for (auto& [k, v] : frame.headers) {
        if (k == "destination" || k == "receipt" || k == "transaction") continue;
        passthrough.emplace_back(k, v);
      }
      publish(*dest, std::move(frame.body), std::move(passthrough));
      send_receipt();
      return true;
    }
    case Command::SUBSCRIBE: {
      auto id = frame.header("id");
      auto dest_text = frame.header("destination");
      auto dest = dest_text ? Destination::parse(*dest_text) : std::nullopt;
      if (!id || id->empty() || !dest) {
        protocol_error(conn, "SUBSCRIBE requires id and a /topic/ or /queue/ destination", &frame);
        return false;
      }
      if (auto ack = frame.header("ack"); ack && *ack != "auto") {
        protocol_error(conn, "only ack:auto is supported", &frame);
        return false;
      }
      if (!conn->subscription_ids.insert(std::string(*id)).second) {
        protocol_error(conn, "duplicate subscription id '" + std::string(*id) + "'", &frame);
        return false;
      }
      subscribe(conn, std::string(*id), *dest);
      send_receipt();
      return true;
    }
    case Command::UNSUBSCRIBE: {
      auto id = frame.header("id");
      if (!id || !conn->subscription_ids.erase(std::string(*id))) {
        protocol_error(conn, "UNSUBSCRIBE of unknown subscription", &frame);
        return false;
      }
      {
        std::lock_guard lock(registry_mutex_);
        auto match = [&](const Subscriber& s) {
          return s.connection == conn && s.subscription_id == *id;
        };
        for (auto& [name, subs] : topics_) std::erase_if(subs, match);
        for (auto& [name, q] : queues_) std::erase_if(q.consumers, match);
      }
      send_receipt();
      return true;
    }
    case Command::DISCONNECT:
      send_receipt();
      return false;
    case Command::CONNECT:
      protocol_error(conn, "already connected", &frame);
      return false;
    default:
      protocol_error(conn, std::string(to_string(frame.command)) + " is not a client frame", &frame);
      return false;
  }
}

void Broker::subscribe(const std::shared_ptr<Connection>& conn, const std::string& id,
                       const Destination& dest) {
  std::lock_guard lock(registry_mutex_);
  Subscriber sub{conn, id};
  if (dest.kind == Destination::Kind::topic) {
    topics_[dest.name].push_back(std::move(sub));
    return;
  }
  auto& q = queues_[dest.name];
  q.consumers.push_back(sub);
  // Buffered messages exist only while the queue had no consumers.
  for (std::size_t i = q.head; i < q.buffer.size(); ++i) {
    deliver(sub, dest, q.buffer[i].first, q.buffer[i].second);
  }
  q.buffer.clear();
  q.head = 0;
}

void Broker::unsubscribe_all(const std::shared_ptr<Connection>& conn) {
  std::lock_guard lock(registry_mutex_);
  auto mine = [&](const Subscriber& s) { return s.connection == conn; };
  for (auto& [name, subs] : topics_) std::erase_if(subs, mine);
  for (auto& [name, q] : queues_) {
    std::erase_if(q.consumers, mine);
    if (q.next >= q.consumers.size()) q.next = 0;
  }
}

void Broker::deliver(const Subscriber& sub, const Destination& dest, const std::string& body,
                     const std::vector<Header>& headers) {
  Frame msg;
  msg.command = Command::MESSAGE;
  msg.add("destination", dest.str());
  msg.add("message-id", "m-" + std::to_string(next_message_id_++));
  msg.add("subscription", sub.subscription_id);
  for (const auto& h : headers) {
    if (h.first == "message-id" || h.first == "subscription") continue;
    msg.headers.push_back(h);
  }
  msg.body = body;
  sub.connection->enqueue(encode_frame(msg));
}

std::size_t Broker::publish(const Destination& dest, std::string body, std::vector<Header> headers) {
  std::lock_guard lock(registry_mutex_);
  return publish_locked(dest, std::move(body), std::move(headers));
}

std::size_t Broker::publish_locked(const Destination& dest, std::string body, std::vector<Header> headers) {
  if (dest.kind == Destination::Kind::topic) {
    auto it = topics_.find(dest.name);
    if (it == topics_.end()) return 0;
    for (const auto& sub : it->second) deliver(sub, dest, body, headers);
    return it->second.size();
  }
  auto& q = queues_[dest.name];
  if (q.consumers.empty()) {
    if (q.buffer.size() - q.head >= options_.queue_capacity) {
      ++q.head;
      ++dropped_;
    }
    q.buffer.emplace_back(std::move(body), std::move(headers));
    if (q.head > 4096 && q.head * 2 > q.buffer.size()) {
      q.buffer.erase(q.buffer.begin(), q.buffer.begin() + static_cast<std::ptrdiff_t>(q.head));
      q.head = 0;
    }
    return 0;
  }
  if (q.next >= q.consumers.size()) q.next = 0;
  deliver(q.consumers[q.next], dest, body, headers);
  q.next = (q.next + 1) % q.consumers.size();
  return 1;
}

std::size_t Broker::connection_count() const {
  std::lock_guard lock(connections_mutex_);
  return static_cast<std::size_t>(std::count_if(connections_.begin(), connections_.end(),
                                                [](const auto& kv) { return !kv.second->finished; }));
}

std::size_t Broker::buffered(const Destination& queue) const {
  std::lock_guard lock(registry_mutex_);
  auto it = queues_.find(queue.name);
  return it == queues_.end() ? 0 : it->second.buffer.size() - it->second.head;
}

}  // namespace asc::stomp
