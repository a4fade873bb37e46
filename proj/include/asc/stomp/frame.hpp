#pragma once

// STOMP 1.2 frames (subset: no transactions, auto-ack only).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace asc::stomp {

enum class Command {
  CONNECT,
  CONNECTED,
  SEND,
  SUBSCRIBE,
  UNSUBSCRIBE,
  MESSAGE,
  RECEIPT,
  ERROR,
  DISCONNECT,
};

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view text);

enum class Errc { incomplete, bad_escape, unknown_command, invalid_frame };

std::string_view to_string(Errc e);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

using Header = std::pair<std::string, std::string>;

struct Frame {
  Command command = Command::SEND;
  std::vector<Header> headers;
  std::string body;

  // First occurrence wins.
  std::optional<std::string_view> header(std::string_view key) const;
  Frame& add(std::string key, std::string value);

  friend bool operator==(const Frame&, const Frame&) = default;
};

// Throws Error(invalid_frame) on a broken invariant.
void validate(const Frame& f);

// content-length is framing metadata: encode_frame emits it for every
// non-empty body (ignoring any content-length in f.headers) and the decoders
// consume it instead of returning it as a header.
std::string encode_frame(const Frame& f);

struct Decoded {
  Frame frame;
  std::size_t consumed = 0;  // bytes of input used, including leading EOLs
};

// Non-throwing on short input: returns nullopt when more bytes are needed.
// Throws Error for bad_escape, unknown_command and invalid_frame.
std::optional<Decoded> try_decode_frame(std::string_view stream);

// Like try_decode_frame but reports short input as Error(incomplete).
Decoded decode_frame(std::string_view stream);

inline constexpr std::size_t kMaxHeaderBytes = 64 * 1024;
inline constexpr std::size_t kMaxBodyBytes = 64 * 1024 * 1024;

// Incremental decoder over a byte stream.
class FrameReader {
 public:
  void feed(std::string_view bytes) { buffer_.append(bytes); }
  std::optional<Frame> next();
  std::size_t buffered() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

// "/topic/<name>" or "/queue/<name>".
struct Destination {
  enum class Kind { topic, queue };
  Kind kind = Kind::topic;
  std::string name;

  std::string str() const;
  static std::optional<Destination> parse(std::string_view text);

  friend bool operator==(const Destination&, const Destination&) = default;
};

inline const Destination kResultsTopic{Destination::Kind::topic, "asc"};
Destination control_queue(std::string_view subsystem);

}  // namespace asc::stomp
