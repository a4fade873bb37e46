#include "asc/stomp/client.hpp"

namespace asc::stomp {

Client::~Client() { close(); }

void Client::connect(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout) {
  close();
  socket_ = net::Socket::connect(host, port, timeout);
  {
    std::lock_guard lock(mutex_);
    closed_ = false;
    inbox_.clear();
    receipts_.clear();
    connected_frame_.reset();
    error_.reset();
  }
  reader_ = std::thread([this] { read_loop(); });

  Frame f;
  f.command = Command::CONNECT;
  f.add("accept-version", "1.2").add("host", host.empty() ? "localhost" : host).add("heart-beat", "0,0");
  write(f);

  std::unique_lock lock(mutex_);
  if (!cv_.wait_for(lock, timeout, [&] { return connected_frame_ || closed_; })) {
    lock.unlock();
    close();
    throw ClientError("timed out waiting for CONNECTED");
  }
  if (!connected_frame_) {
    const std::string reason = error_ ? std::string(error_->header("message").value_or("ERROR")) : "connection closed";
    lock.unlock();
    close();
    throw ClientError("connect failed: " + reason);
  }
  version_ = std::string(connected_frame_->header("version").value_or(""));
}

void Client::read_loop() {
  FrameReader reader;
  char buffer[16384];
  for (;;) {
    std::size_t n = 0;
    try {
      n = socket_.receive(buffer, sizeof(buffer));
    } catch (const net::SocketError&) {
      n = 0;
    }
    if (n == 0) break;
    reader.feed(std::string_view(buffer, n));
    try {
      while (auto frame = reader.next()) {
        std::lock_guard lock(mutex_);
        switch (frame->command) {
          case Command::MESSAGE: inbox_.push_back(std::move(*frame)); break;
          case Command::RECEIPT: receipts_.insert(std::string(frame->header("receipt-id").value_or(""))); break;
          case Command::CONNECTED: connected_frame_ = std::move(*frame); break;
          case Command::ERROR: error_ = std::move(*frame); break;
          default: break;
        }
        cv_.notify_all();
      }
    } catch (const Error&) {
      break;
    }
  }
  std::lock_guard lock(mutex_);
  closed_ = true;
  cv_.notify_all();
}

void Client::write(const Frame& f) {
  {
    std::lock_guard lock(mutex_);
    if (closed_) throw ClientError("not connected");
  }
  try {
    socket_.send_all(encode_frame(f));
  } catch (const net::SocketError& e) {
    throw ClientError(std::string("send failed: ") + e.what());
  }
}

std::string Client::next_receipt_id() { return "r" + std::to_string(++receipt_counter_); }

void Client::wait_receipt(const std::string& id, std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  const bool ok = cv_.wait_for(lock, timeout, [&] { return receipts_.count(id) > 0 || closed_ || error_; });
  if (receipts_.erase(id)) return;
  if (error_) throw ClientError("broker error: " + std::string(error_->header("message").value_or("")));
  if (!ok) throw ClientError("timed out waiting for receipt " + id);
  throw ClientError("connection closed before receipt " + id);
}

void Client::subscribe(const Destination& dest, const std::string& id, bool with_receipt) {
  Frame f;
  f.command = Command::SUBSCRIBE;
  f.add("id", id).add("destination", dest.str()).add("ack", "auto");
  std::string receipt;
  if (with_receipt) f.add("receipt", receipt = next_receipt_id());
  write(f);
  if (with_receipt) wait_receipt(receipt, receipt_timeout);
}

void Client::unsubscribe(const std::string& id, bool with_receipt) {
  Frame f;
  f.command = Command::UNSUBSCRIBE;
  f.add("id", id);
  std::string receipt;
  if (with_receipt) f.add("receipt", receipt = next_receipt_id());
  write(f);
  if (with_receipt) wait_receipt(receipt, receipt_timeout);
}

void Client::send(const Destination& dest, std::string body, std::vector<Header> headers, bool with_receipt) {
  Frame f;
  f.command = Command::SEND;
  f.add("destination", dest.str());
  for (auto& h : headers) f.headers.push_back(std::move(h));
  f.body = std::move(body);
  std::string receipt;
  if (with_receipt) f.add("receipt", receipt = next_receipt_id());
  write(f);
  if (with_receipt) wait_receipt(receipt, receipt_timeout);
}

std::optional<Frame> Client::next_message(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  cv_.wait_for(lock, timeout, [&] { return !inbox_.empty() || closed_; });
  if (inbox_.empty()) return std::nullopt;
  Frame f = std::move(inbox_.front());
  inbox_.pop_front();
  return f;
}

void Client::disconnect(std::chrono::milliseconds timeout) {
  if (!is_connected()) {
    close();
    return;
  }
  Frame f;
  f.command = Command::DISCONNECT;
  const auto receipt = next_receipt_id();
  f.add("receipt", receipt);
  try {
    write(f);
    wait_receipt(receipt, timeout);
  } catch (const ClientError&) {
    // Closing anyway.
  }
  close();
}

bool Client::is_connected() const {
  std::lock_guard lock(mutex_);
  return !closed_ && connected_frame_.has_value();
}

std::optional<Frame> Client::last_error() const {
  std::lock_guard lock(mutex_);
  return error_;
}

void Client::close() {
  socket_.shutdown();
  if (reader_.joinable()) reader_.join();
  socket_.close();
  std::lock_guard lock(mutex_);
  closed_ = true;
}

}  // namespace asc::stomp
