#pragma once

// Prototype library on disk: one directory per emotion holding
// `reference.wav` and a `params` sidecar:
//
//   mean_rms: 0.21
//   band_energies: 0, 0.1, ...   (8 values)
//   f0_mean_hz: 220
//   f0_std_hz: 3.5
//   f0_onset_len_ms: 480
//   voiced_ratio: 0.96

#include <filesystem>
#include <vector>

#include "asc/affect.hpp"
#include "asc/keyvalue.hpp"
#include "asc/voice/voice.hpp"

namespace asc::voice {

KeyValueFile params_to_keyvalue(const VoiceParams& p);
VoiceParams params_from_keyvalue(const KeyValueFile& kv);

// Entries sorted by label. Throws Error(bad_library) for unknown labels,
// missing files or an empty directory.
std::vector<PrototypeEntry> load_library(const std::filesystem::path& root,
                                         const EmotionVocabulary& vocabulary);

// Writes reference.wav and the params sidecar computed from it.
PrototypeEntry save_prototype(const std::filesystem::path& root, const std::string& label,
                              const AudioClip& clip, const EmotionVocabulary& vocabulary);

}  // namespace asc::voice
