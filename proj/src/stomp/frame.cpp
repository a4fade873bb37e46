#include "asc/stomp/frame.hpp"

#include <charconv>

namespace asc::stomp {
namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::CONNECT, "CONNECT"},         {Command::CONNECTED, "CONNECTED"},
    {Command::SEND, "SEND"},               {Command::SUBSCRIBE, "SUBSCRIBE"},
    {Command::UNSUBSCRIBE, "UNSUBSCRIBE"}, {Command::MESSAGE, "MESSAGE"},
    {Command::RECEIPT, "RECEIPT"},         {Command::ERROR, "ERROR"},
    {Command::DISCONNECT, "DISCONNECT"},
};

[[noreturn]] void raise(Errc code, const std::string& what) { throw Error(code, what); }

// CONNECT and CONNECTED headers are sent verbatim.
bool uses_escaping(Command c) { return c != Command::CONNECT && c != Command::CONNECTED; }

bool body_forbidden(Command c) {
  return c == Command::CONNECT || c == Command::SUBSCRIBE || c == Command::UNSUBSCRIBE ||
         c == Command::DISCONNECT;
}

void append_escaped(std::string& out, std::string_view s) {
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case ':': out += "\\c"; break;
      default: out += c;
    }
  }
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (i + 1 >= s.size()) raise(Errc::bad_escape, "trailing backslash in header");
    switch (s[++i]) {
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 'c': out += ':'; break;
      default: raise(Errc::bad_escape, std::string("undefined escape \\") + s[i]);
    }
  }
  return out;
}

bool is_content_length(std::string_view key) { return key == "content-length"; }

}  // namespace

std::string_view to_string(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view text) {
  for (const auto& [cmd, name] : kCommands) {
    if (name == text) return cmd;
  }
  return std::nullopt;
}

std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::incomplete: return "Incomplete";
    case Errc::bad_escape: return "BadEscape";
    case Errc::unknown_command: return "UnknownCommand";
    case Errc::invalid_frame: return "InvalidFrame";
  }
  return "?";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::optional<std::string_view> Frame::header(std::string_view key) const {
  for (const auto& [k, v] : headers) {
    if (k == key) return std::string_view(v);
  }
  return std::nullopt;
}

Frame& Frame::add(std::string key, std::string value) {
  headers.emplace_back(std::move(key), std::move(value));
  return *this;
}

void validate(const Frame& f) {
  if (body_forbidden(f.command) && !f.body.empty()) {
    raise(Errc::invalid_frame, std::string(to_string(f.command)) + " must not carry a body");
  }
  for (const auto& [k, v] : f.headers) {
    if (k.empty()) raise(Errc::invalid_frame, "empty header key");
    if (!uses_escaping(f.command)) {
      const bool bad_key = k.find_first_of(":\n\r") != std::string::npos;
      const bool bad_value = v.find_first_of("\n\r") != std::string::npos;
      if (bad_key || bad_value) {
        raise(Errc::invalid_frame, "CONNECT/CONNECTED headers cannot contain ':' in keys or line breaks");
      }
    }
  }
  if (f.body.size() > kMaxBodyBytes) raise(Errc::invalid_frame, "body too large");
}

std::string encode_frame(const Frame& f) {
  validate(f);
  std::string out;
  out.reserve(32 + f.body.size());
  out += to_string(f.command);
  out += '\n';
  const bool escape = uses_escaping(f.command);
  for (const auto& [k, v] : f.headers) {
    if (is_content_length(k)) continue;
    if (escape) {
      append_escaped(out, k);
      out += ':';
      append_escaped(out, v);
    } else {
      out += k;
      out += ':';
      out += v;
    }
    out += '\n';
  }
  if (!f.body.empty()) {
    out += "content-length:";
    out += std::to_string(f.body.size());
    out += '\n';
  }
  out += '\n';
  out += f.body;
  out += '\0';
  return out;
}

std::optional<Decoded> try_decode_frame(std::string_view stream) {
  std::size_t pos = 0;
  // Heart-beats between frames.
  while (pos < stream.size()) {
    if (stream[pos] == '\n') {
      ++pos;
    } else if (stream[pos] == '\r' && pos + 1 < stream.size() && stream[pos + 1] == '\n') {
      pos += 2;
    } else if (stream[pos] == '\r' && pos + 1 == stream.size()) {
      return std::nullopt;
    } else {
      break;
    }
  }
  if (pos == stream.size()) return std::nullopt;

  auto next_line = [&](std::string_view& line) -> bool {
    const auto nl = stream.find('\n', pos);
    if (nl == std::string_view::npos) {
      if (stream.size() - pos > kMaxHeaderBytes) raise(Errc::invalid_frame, "header section too large");
      return false;
    }
    line = stream.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl + 1;
    return true;
  };

  const auto frame_start = pos;
  std::string_view line;
  if (!next_line(line)) return std::nullopt;
  const auto command = parse_command(line);
  if (!command) {
    raise(Errc::unknown_command, "unknown command '" + std::string(line.substr(0, 32)) + "'");
  }

  Decoded out;
  out.frame.command = *command;
  const bool escape = uses_escaping(*command);
  std::optional<std::size_t> content_length;
  for (;;) {
    if (!next_line(line)) return std::nullopt;
    if (pos - frame_start > kMaxHeaderBytes) raise(Errc::invalid_frame, "header section too large");
    if (line.empty()) break;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) raise(Errc::invalid_frame, "header line without ':'");
    std::string key = escape ? unescape(line.substr(0, colon)) : std::string(line.substr(0, colon));
    std::string value = escape ? unescape(line.substr(colon + 1)) : std::string(line.substr(colon + 1));
    if (key.empty()) raise(Errc::invalid_frame, "empty header key");
    if (is_content_length(key)) {
      if (content_length) continue;  // first occurrence wins
      std::size_t n = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
      if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty() || n > kMaxBodyBytes) {
        raise(Errc::invalid_frame, "bad content-length '" + value + "'");
      }
      content_length = n;
      continue;
    }
    out.frame.headers.emplace_back(std::move(key), std::move(value));
  }

  if (content_length) {
    if (stream.size() - pos < *content_length + 1) return std::nullopt;
    out.frame.body = std::string(stream.substr(pos, *content_length));
    pos += *content_length;
    if (stream[pos] != '\0') raise(Errc::invalid_frame, "frame body not followed by NUL");
    ++pos;
  } else {
    const auto nul = stream.find('\0', pos);
    if (nul == std::string_view::npos) {
      if (stream.size() - pos > kMaxBodyBytes) raise(Errc::invalid_frame, "body too large");
      return std::nullopt;
    }
    out.frame.body = std::string(stream.substr(pos, nul - pos));
    pos = nul + 1;
  }
  if (body_forbidden(*command) && !out.frame.body.empty()) {
    raise(Errc::invalid_frame, std::string(to_string(*command)) + " must not carry a body");
  }
  out.consumed = pos;
  return out;
}

Decoded decode_frame(std::string_view stream) {
  auto decoded = try_decode_frame(stream);
  if (!decoded) raise(Errc::incomplete, "need more bytes");
  return std::move(*decoded);
}

std::optional<Frame> FrameReader::next() {
  auto decoded = try_decode_frame(buffer_);
  if (!decoded) return std::nullopt;
  buffer_.erase(0, decoded->consumed);
  return std::move(decoded->frame);
}

std::string Destination::str() const {
  return (kind == Kind::topic ? "/topic/" : "/queue/") + name;
}

std::optional<Destination> Destination::parse(std::string_view text) {
  Destination d;
  if (text.starts_with("/topic/")) {
    d.kind = Kind::topic;
    text.remove_prefix(7);
  } else if (text.starts_with("/queue/")) {
    d.kind = Kind::queue;
    text.remove_prefix(7);
  } else {
    return std::nullopt;
  }
  if (text.empty()) return std::nullopt;
  d.name = std::string(text);
  return d;
}

Destination control_queue(std::string_view subsystem) {
  return {Destination::Kind::queue, "control." + std::string(subsystem)};
}

}  // namespace asc::stomp
