#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "asc/voice/voice.hpp"

namespace asc::voice {

// PCM WAV, 16-bit signed little-endian, mono. Other encodings are rejected
// with Error(bad_wav); so is any rate other than `required_rate`.
AudioClip decode_wav(std::string_view bytes, int required_rate = 16000);
AudioClip read_wav(const std::filesystem::path& path, int required_rate = 16000);

// Samples are clamped to [-1, 1] and quantized to 16 bits.
std::string encode_wav(const AudioClip& clip);
void write_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace asc::voice
