#include "asc/voice/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace asc::voice {
namespace {

std::uint32_t u32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t u16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

void put_u16(std::string& out, std::uint16_t v) {
  out += static_cast<char>(v & 0xFF);
  out += static_cast<char>((v >> 8) & 0xFF);
}

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::bad_wav, what); }

}  // namespace

AudioClip decode_wav(std::string_view bytes, int required_rate) {
  if (bytes.size() < 12 || bytes.substr(0, 4) != "RIFF" || bytes.substr(8, 4) != "WAVE") {
    bad("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  int rate = 0;
  std::string_view data;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const auto id = bytes.substr(pos, 4);
    const std::size_t size = u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (size > bytes.size() - body) {
      // Tolerate a truncated final data chunk.
      if (id != "data") bad("chunk overruns file");
    }
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (id == "fmt ") {
      if (avail < 16) bad("short fmt chunk");
      const auto format = u16(bytes, body);
      const auto channels = u16(bytes, body + 2);
      rate = static_cast<int>(u32(bytes, body + 4));
      const auto bits = u16(bytes, body + 14);
      if (format != 1) bad("only PCM is supported");
      if (channels != 1) bad("only mono is supported");
      if (bits != 16) bad("only 16-bit samples are supported");
      have_fmt = true;
    } else if (id == "data") {
      data = bytes.substr(body, avail);
      have_data = true;
    }
    pos = body + avail + (avail % 2);
  }
  if (!have_fmt || !have_data) bad("missing fmt or data chunk");
  if (rate != required_rate) {
    bad("sample rate " + std::to_string(rate) + " Hz, expected " + std::to_string(required_rate));
  }
  AudioClip clip;
  clip.sample_rate_hz = rate;
  clip.samples.resize(data.size() / 2);
  for (std::size_t i = 0; i < clip.samples.size(); ++i) {
    const auto raw = static_cast<std::int16_t>(u16(data, 2 * i));
    clip.samples[i] = static_cast<double>(raw) / 32768.0;
  }
  return clip;
}

AudioClip read_wav(const std::filesystem::path& path, int required_rate) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_wav(buf.str(), required_rate);
}

std::string encode_wav(const AudioClip& clip) {
  const auto n = static_cast<std::uint32_t>(clip.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  put_u32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, 2 * n);
  for (double s : clip.samples) {
    // Same scale as decoding, so decoded clips re-encode to identical bytes.
    const double scaled = std::clamp(std::round(s * 32768.0), -32768.0, 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const AudioClip& clip) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) bad("cannot write " + path.string());
  const auto bytes = encode_wav(clip);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace asc::voice
