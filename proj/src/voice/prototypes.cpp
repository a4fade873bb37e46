#include "asc/voice/prototypes.hpp"

#include <algorithm>

#include "asc/voice/wav.hpp"

namespace asc::voice {

KeyValueFile params_to_keyvalue(const VoiceParams& p) {
  KeyValueFile kv;
  kv.set("mean_rms", format_double(p.mean_rms));
  std::string bands;
  for (std::size_t b = 0; b < kBandCount; ++b) {
    if (b) bands += ", ";
    bands += format_double(p.band_energies[b]);
  }
  kv.set("band_energies", bands);
  kv.set("f0_mean_hz", format_double(p.f0_mean_hz));
  kv.set("f0_std_hz", format_double(p.f0_std_hz));
  kv.set("f0_onset_len_ms", format_double(p.f0_onset_len_ms));
  kv.set("voiced_ratio", format_double(p.voiced_ratio));
  return kv;
}

VoiceParams params_from_keyvalue(const KeyValueFile& kv) {
  VoiceParams p;
  try {
    p.mean_rms = kv.require_double("mean_rms");
    const auto bands = kv.require_doubles("band_energies");
    if (bands.size() != kBandCount) throw Error(Errc::bad_library, "band_energies needs 8 values");
    std::copy(bands.begin(), bands.end(), p.band_energies.begin());
    p.f0_mean_hz = kv.require_double("f0_mean_hz");
    p.f0_std_hz = kv.require_double("f0_std_hz");
    p.f0_onset_len_ms = kv.require_double("f0_onset_len_ms");
    p.voiced_ratio = kv.require_double("voiced_ratio");
  } catch (const KeyValueError& e) {
    throw Error(Errc::bad_library, e.what());
  }
  return p;
}

std::vector<PrototypeEntry> load_library(const std::filesystem::path& root,
                                         const EmotionVocabulary& vocabulary) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw Error(Errc::bad_library, root.string() + " is not a directory");
  std::vector<PrototypeEntry> entries;
  for (const auto& dir : fs::directory_iterator(root)) {
    if (!dir.is_directory()) continue;
    const auto label = dir.path().filename().string();
    if (!vocabulary.contains(label)) {
      throw Error(Errc::bad_library, "prototype '" + label + "' is not a platform emotion");
    }
    const auto clip = dir.path() / "reference.wav";
    const auto params = dir.path() / "params";
    if (!fs::exists(clip) || !fs::exists(params)) {
      throw Error(Errc::bad_library, "prototype '" + label + "' needs reference.wav and params");
    }
    KeyValueFile kv;
    try {
      kv = KeyValueFile::load(params);
    } catch (const KeyValueError& e) {
      throw Error(Errc::bad_library, e.what());
    }
    entries.push_back({label, params_from_keyvalue(kv), vocabulary.at(label).canonical, clip});
  }
  if (entries.empty()) throw Error(Errc::empty_library, "no prototypes under " + root.string());
  std::sort(entries.begin(), entries.end(),
            [](const PrototypeEntry& a, const PrototypeEntry& b) { return a.label < b.label; });
  return entries;
}

PrototypeEntry save_prototype(const std::filesystem::path& root, const std::string& label,
                              const AudioClip& clip, const EmotionVocabulary& vocabulary) {
  const auto canonical = vocabulary.at(label).canonical;
  const auto dir = root / label;
  std::filesystem::create_directories(dir);
  const auto wav = dir / "reference.wav";
  write_wav(wav, clip);
  // Summarize the quantized file so the sidecar matches what readers see.
  const auto params = summarize(read_wav(wav, clip.sample_rate_hz));
  params_to_keyvalue(params).save(dir / "params");
  return {label, params, canonical, wav};
}

}  // namespace asc::voice
