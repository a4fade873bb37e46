#pragma once

// Synthetic desk-scale data: voice prototypes, gesture traces, facial
// feature streams, trained models, session scripts and a config file.

#include <cstdint>
#include <filesystem>
#include <random>
#include <string_view>

#include "asc/body/body.hpp"
#include "asc/face/face.hpp"
#include "asc/voice/voice.hpp"

namespace asc::runner {

struct VoiceStyle {
  double f0_hz = 200.0;
  double vibrato_hz = 0.0;
  double vibrato_depth_hz = 0.0;
  double amplitude = 0.3;
  double lead_silence_s = 0.1;
  double voiced_s = 0.8;
  double tail_silence_s = 0.1;
};

// Three-harmonic tone with sinusoidal vibrato between two silences.
voice::AudioClip synth_voice(const VoiceStyle& style, int sample_rate_hz = 16000);

// Two seconds at 30 frames/s of a stylized gesture for a basic emotion.
body::Trace synth_gesture(std::string_view basic_emotion, std::mt19937_64& rng);

// Constant-feature stream whose prediction under `model` is `target`.
std::vector<face::FaceFeatureFrame> synth_face_stream(const AVPoint& target, const face::LinearAVModel& model,
                                                      std::size_t frames = 20);

struct DemoSet {
  std::filesystem::path root;
  std::filesystem::path config;          // asc.conf
  std::filesystem::path session_script;  // six turns over all modalities
  std::filesystem::path voice_script;    // ten prototype-identical voice turns
  std::filesystem::path content_csv;
};

DemoSet make_demo(const std::filesystem::path& root, std::uint64_t seed = 1);

}  // namespace asc::runner
