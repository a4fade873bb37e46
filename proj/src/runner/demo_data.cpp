#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>

#include "asc/runner/demo.hpp"
#include "asc/voice/prototypes.hpp"

namespace asc::runner {
namespace {

namespace fs = std::filesystem;
using body::Joint;

struct GestureStyle {
  double amplitude;   // hand excursion, m
  double frequency;   // Hz
  bool symmetric;
  double lean;        // neck z offset, m
  double height;      // hand y offset from rest, m
  double spread;      // hand |x| from the torso, m
  double forward;     // share of motion along z (rest is along y)
};

const std::map<std::string_view, GestureStyle>& gesture_styles() {
  static const std::map<std::string_view, GestureStyle> styles{
      {"anger", {0.25, 2.5, false, 0.10, 0.00, 0.35, 1.0}},
      {"disgust", {0.06, 1.0, false, -0.10, -0.05, 0.30, 0.3}},
      {"fear", {0.02, 7.0, true, -0.06, 0.45, 0.15, 0.2}},
      {"happiness", {0.18, 2.0, true, 0.00, 0.50, 0.60, 0.0}},
      {"sadness", {0.015, 0.5, true, 0.08, -0.10, 0.20, 0.0}},
      {"surprise", {0.30, 1.2, true, -0.04, 0.35, 0.50, 0.5}},
  };
  return styles;
}

const std::map<std::string, VoiceStyle>& voice_styles() {
  static const std::map<std::string, VoiceStyle> styles{
      {"happy", {240, 5, 30, 0.35, 0.10, 0.80, 0.10}},
      {"sad", {130, 2, 5, 0.10, 0.30, 0.60, 0.10}},
      {"angry", {200, 6, 40, 0.60, 0.05, 0.90, 0.05}},
      {"afraid", {300, 8, 25, 0.20, 0.20, 0.50, 0.30}},
      {"surprised", {350, 3, 60, 0.45, 0.10, 0.40, 0.50}},
      {"bored", {110, 0, 0, 0.08, 0.20, 0.70, 0.10}},
  };
  return styles;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

voice::AudioClip synth_voice(const VoiceStyle& s, int rate) {
  voice::AudioClip clip;
  clip.sample_rate_hz = rate;
  const auto n_lead = static_cast<std::size_t>(s.lead_silence_s * rate);
  const auto n_voiced = static_cast<std::size_t>(s.voiced_s * rate);
  const auto n_tail = static_cast<std::size_t>(s.tail_silence_s * rate);
  clip.samples.assign(n_lead, 0.0);
  double phase = 0.0;
  for (std::size_t i = 0; i < n_voiced; ++i) {
    const double t = static_cast<double>(i) / rate;
    const double f = s.f0_hz + s.vibrato_depth_hz * std::sin(2.0 * std::numbers::pi * s.vibrato_hz * t);
    phase += 2.0 * std::numbers::pi * f / rate;
    const double v = std::sin(phase) + 0.5 * std::sin(2.0 * phase) + 0.25 * std::sin(3.0 * phase);
    clip.samples.push_back(s.amplitude * v / 1.75);
  }
  clip.samples.resize(clip.samples.size() + n_tail, 0.0);
  return clip;
}

body::Trace synth_gesture(std::string_view basic, std::mt19937_64& rng) {
  const auto it = gesture_styles().find(basic);
  if (it == gesture_styles().end()) throw std::invalid_argument("no gesture style for " + std::string(basic));
  const auto& g = it->second;
  std::uniform_real_distribution<double> vary(0.85, 1.15);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> noise(0.0, 0.002);
  const double amp = g.amplitude * vary(rng);
  const double freq = g.frequency * vary(rng);
  const double phase = angle(rng);
  const double lean = g.lean * vary(rng);

  body::Trace trace;
  constexpr int kFrames = 61;
  for (int i = 0; i < kFrames; ++i) {
    const double t = i / 30.0;
    body::SkeletonFrame f;
    f.timestamp_ms = i * 1000.0 / 30.0;
    const double sway = 0.01 * std::sin(2.0 * std::numbers::pi * 0.5 * t);
    f[Joint::torso] = {sway, 1.00, 0.0};
    f[Joint::l_hip] = {-0.10, 0.95, 0.0};
    f[Joint::r_hip] = {0.10, 0.95, 0.0};
    f[Joint::neck] = {sway, 1.50, lean};
    f[Joint::head] = {sway, 1.70, 1.4 * lean};
    f[Joint::l_shoulder] = {sway - 0.20, 1.45, lean * 0.9};
    f[Joint::r_shoulder] = {sway + 0.20, 1.45, lean * 0.9};
    const double s = std::sin(2.0 * std::numbers::pi * freq * t + phase);
    const double l_off = amp * s;
    const double r_off = g.symmetric ? l_off : 0.3 * amp * std::sin(2.0 * std::numbers::pi * freq * t + phase + 1.3);
    const double base_y = 0.95 + g.height;
    f[Joint::l_hand] = {sway - g.spread, base_y + (1.0 - g.forward) * l_off, 0.05 + g.forward * l_off};
    f[Joint::r_hand] = {sway + g.spread, base_y + (1.0 - g.forward) * r_off, 0.05 + g.forward * r_off};
    const auto mid = [](const body::Vec3& a, const body::Vec3& b) {
      return body::Vec3{(a.x + b.x) / 2, (a.y + b.y) / 2, (a.z + b.z) / 2};
    };
    f[Joint::l_elbow] = mid(f[Joint::l_shoulder], f[Joint::l_hand]);
    f[Joint::r_elbow] = mid(f[Joint::r_shoulder], f[Joint::r_hand]);
    for (auto& p : f.joints) {
      p.x += noise(rng);
      p.y += noise(rng);
      p.z += noise(rng);
    }
    trace.push_back(f);
  }
  return trace;
}

std::vector<face::FaceFeatureFrame> synth_face_stream(const AVPoint& target, const face::LinearAVModel& model,
                                                      std::size_t count) {
  constexpr std::size_t kExpression = face::kPoseSlot;
  face::FeatureVector x{};
  x[face::kPoseSlot] = 0.05;
  x[face::kPoseSlot + 1] = -0.02;
  x[face::kPoseSlot + 2] = 0.01;
  // Residual the expression slots must produce.
  const AVPoint fixed = model.raw(x);
  const double rv = target.valence - fixed.valence;
  const double ra = target.arousal - fixed.arousal;
  // Minimum-norm solution of the 2 x 28 system A e = r.
  const auto& wv = model.valence_weights;
  const auto& wa = model.arousal_weights;
  double vv = 0, va = 0, aa = 0;
  for (std::size_t i = 0; i < kExpression; ++i) {
    vv += wv[i] * wv[i];
    va += wv[i] * wa[i];
    aa += wa[i] * wa[i];
  }
  const double det = vv * aa - va * va;
  if (std::abs(det) < 1e-12) throw std::runtime_error("face model cannot reach the target point");
  const double cv = (aa * rv - va * ra) / det;
  const double ca = (vv * ra - va * rv) / det;
  for (std::size_t i = 0; i < kExpression; ++i) x[i] = cv * wv[i] + ca * wa[i];

  std::vector<face::FaceFeatureFrame> frames;
  for (std::size_t i = 0; i < count; ++i) frames.push_back({static_cast<double>(i) * 33.0, x});
  return frames;
}

DemoSet make_demo(const fs::path& root_in, std::uint64_t seed) {
  const fs::path root = fs::absolute(root_in);
  fs::create_directories(root);
  const auto& vocab = EmotionVocabulary::standard();
  std::mt19937_64 rng(seed);

  // Voice: prototypes plus identical attempt copies.
  for (const auto& [label, style] : voice_styles()) {
    const auto entry = voice::save_prototype(root / "voice" / "prototypes", label, synth_voice(style), vocab);
    fs::create_directories(root / "voice" / "attempts");
    fs::copy_file(entry.clip_path, root / "voice" / "attempts" / (label + ".wav"),
                  fs::copy_options::overwrite_existing);
  }

  // Body: labelled training traces, a centroid model, one fresh attempt per emotion.
  std::vector<body::LabeledFeatures> samples;
  for (auto basic : kBasicEmotions) {
    for (int i = 0; i < 10; ++i) {
      const auto trace = synth_gesture(basic, rng);
      char name[16];
      std::snprintf(name, sizeof name, "%02d.csv", i);
      write_text(root / "body" / "train" / std::string(basic) / name, body::format_trace_csv(trace));
      samples.push_back({std::string(basic), body::extract_features(trace)});
    }
  }
  body::train_centroids(samples).save(root / "body" / "model");
  for (auto basic : kBasicEmotions) {
    write_text(root / "body" / "attempts" / (std::string(basic) + ".csv"),
               body::format_trace_csv(synth_gesture(basic, rng)));
  }

  // Face: a planted linear map, training rows drawn from it, and streams that
  // land on canonical points under the trained model.
  std::normal_distribution<double> weight(0.0, 0.06);
  std::normal_distribution<double> feature(0.0, 1.0);
  std::normal_distribution<double> pose(0.0, 0.1);
  std::uniform_real_distribution<double> pose_std(0.0, 0.05);
  face::FeatureVector wv{}, wa{};
  for (auto& w : wv) w = weight(rng);
  for (auto& w : wa) w = weight(rng);
  std::vector<face::TrainingRow> rows;
  while (rows.size() < 200) {
    face::TrainingRow r;
    for (std::size_t i = 0; i < face::kFeatureCount; ++i) {
      if (i < face::kPoseSlot) r.features[i] = feature(rng);
      else if (i < face::kPoseStdSlot) r.features[i] = pose(rng);
      else r.features[i] = pose_std(rng);
    }
    double v = 0, a = 0;
    for (std::size_t i = 0; i < face::kFeatureCount; ++i) {
      v += wv[i] * r.features[i];
      a += wa[i] * r.features[i];
    }
    if (std::abs(v) > 1.0 || std::abs(a) > 1.0) continue;
    r.valence = v;
    r.arousal = a;
    rows.push_back(r);
  }
  write_text(root / "face" / "train.csv", face::format_training_csv(rows));
  const auto face_model = face::train_model(rows, 1e-3);
  face_model.save(root / "face" / "model");
  for (const auto& e : vocab.entries()) {
    write_text(root / "face" / "attempts" / (e.label + ".csv"),
               face::format_stream_csv(synth_face_stream(e.canonical, face_model)));
  }

  DemoSet set;
  set.root = root;
  set.config = root / "asc.conf";
  write_text(set.config,
             "# Demo configuration; paths are relative to this file.\n"
             "broker.host: 127.0.0.1\n"
             "broker.port: 61613\n"
             "media.face.port: 0\n"
             "media.voice.port: 0\n"
             "media.body.port: 0\n"
             "voice.prototypes: voice/prototypes\n"
             "body.model: body/model\n"
             "face.model: face/model\n"
             "session.board_length: 10\n"
             "session.robot: every:2\n");

  set.session_script = root / "session6.txt";
  write_text(set.session_script,
             "seed: 7\n"
             "turn: happy voice voice/attempts/happy.wav\n"
             "turn: angry body body/attempts/anger.csv\n"
             "turn: sad face face/attempts/sad.csv\n"
             "turn: afraid voice voice/attempts/afraid.wav\n"
             "turn: happy body body/attempts/happiness.csv\n"
             "turn: surprised face face/attempts/surprised.csv\n");

  set.voice_script = root / "voice10.txt";
  std::string ten = "seed: 3\n";
  for (int i = 0; i < 10; ++i) ten += "turn: happy voice voice/attempts/happy.wav\n";
  write_text(set.voice_script, ten);

  set.content_csv = root / "content.csv";
  write_text(set.content_csv,
             "id,correct,n,k\n"
             "all-correct,60,60,6\n"
             "chance,10,60,6\n"
             "borderline,36,60,6\n"
             "weak,20,60,6\n");
  return set;
}

}  // namespace asc::runner
