#include "asc/runner/service.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>

#include "asc/body/body.hpp"
#include "asc/face/face.hpp"
#include "asc/platform/engine.hpp"
#include "asc/stomp/client.hpp"
#include "asc/voice/prototypes.hpp"
#include "asc/voice/voice.hpp"
#include "asc/voice/wav.hpp"

namespace asc::runner {
namespace {

using emotionml::EmotionAnnotation;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Closest canonical point; ties go to the smaller label.
std::string nearest_label(const AVPoint& p, const EmotionVocabulary& vocabulary) {
  const EmotionEntry* best = nullptr;
  double best_d = 0.0;
  for (const auto& e : vocabulary.entries()) {
    const double d = distance(p, e.canonical);
    if (!best || d < best_d || (d == best_d && e.label < best->label)) {
      best = &e;
      best_d = d;
    }
  }
  return best->label;
}

class VoiceAnalyzer : public Analyzer {
 public:
  explicit VoiceAnalyzer(const RuntimeConfig& config)
      : vocabulary_(config.vocabulary()), library_(voice::load_library(config.voice_prototypes, vocabulary_)) {}

  Analysis analyze(const std::filesystem::path& media, const std::string& target, std::int64_t t) override {
    auto bytes = read_file(media);
    const auto params = voice::summarize(voice::decode_wav(bytes));
    const auto estimate = voice::estimate_emotion(params, library_);
    // Feedback is against the target's prototype when the library has one.
    auto reference = std::find_if(library_.begin(), library_.end(),
                                  [&](const voice::PrototypeEntry& e) { return e.label == target; });
    if (reference == library_.end()) {
      reference = std::find_if(library_.begin(), library_.end(),
                               [&](const voice::PrototypeEntry& e) { return e.label == estimate.label; });
    }
    const auto feedback = voice::compare_to_prototype(params, *reference);

    auto a = emotionml::from_internal(estimate.point, Modality::voice, estimate.label, t);
    a.confidence = 1.0 - std::min(estimate.distance, 1.0);
    const auto values = voice::compared_values(params);
    for (std::size_t i = 0; i < voice::kComparedCount; ++i) {
      a.parameters.push_back({std::string(voice::kComparedNames[i]), values[i]});
    }
    for (std::size_t b = 0; b < voice::kBandCount; ++b) {
      a.parameters.push_back({"band_energy." + std::to_string(b), params.band_energies[b]});
    }
    for (std::size_t i = 0; i < voice::kComparedCount; ++i) {
      const std::string name(voice::kComparedNames[i]);
      a.parameters.push_back({"distance." + name, feedback.distances[i]});
      a.parameters.push_back({"light." + name, static_cast<double>(feedback.lights[i])});
    }
    a.parameters.push_back({"distance.overall", feedback.overall});
    return {std::move(a), std::move(bytes), "audio/wav"};
  }

 private:
  EmotionVocabulary vocabulary_;
  std::vector<voice::PrototypeEntry> library_;
};

class BodyAnalyzer : public Analyzer {
 public:
  explicit BodyAnalyzer(const RuntimeConfig& config)
      : vocabulary_(config.vocabulary()), model_(body::EmotionCentroidModel::load(config.body_model)) {}

  Analysis analyze(const std::filesystem::path& media, const std::string&, std::int64_t t) override {
    auto bytes = read_file(media);
    const auto trace = body::parse_trace_csv(bytes);
    const auto features = body::extract_features(trace);
    const auto c = body::classify(features, model_, vocabulary_);
    auto a = emotionml::from_internal(c.point, Modality::body, c.vocabulary_label, t);
    a.confidence = c.confidence;
    const auto values = features.to_array();
    for (std::size_t i = 0; i < body::kFeatureCount; ++i) {
      a.parameters.push_back({std::string(body::kFeatureNames[i]), values[i]});
    }
    a.parameters.push_back({"segments", static_cast<double>(body::segment_gestures(trace).size())});
    return {std::move(a), std::move(bytes), "text/csv"};
  }

 private:
  EmotionVocabulary vocabulary_;
  body::EmotionCentroidModel model_;
};

class FaceAnalyzer : public Analyzer {
 public:
  explicit FaceAnalyzer(const RuntimeConfig& config)
      : vocabulary_(config.vocabulary()), model_(face::LinearAVModel::load(config.face_model)) {}

  Analysis analyze(const std::filesystem::path& media, const std::string&, std::int64_t t) override {
    const auto frames = face::read_stream(media);
    if (frames.empty()) throw face::Error(face::Errc::bad_stream, "stream has no frames");
    face::StreamProcessor processor;
    face::AVPredictor predictor(model_);
    AVPoint point;
    for (const auto& f : frames) point = predictor.predict(processor.push(f));
    auto a = emotionml::from_internal(point, Modality::face, nearest_label(point, vocabulary_), t);
    const auto& last = processor.window().back().features;
    a.parameters.push_back({"yaw_std", last[face::kPoseStdSlot]});
    a.parameters.push_back({"pitch_std", last[face::kPoseStdSlot + 1]});
    a.parameters.push_back({"roll_std", last[face::kPoseStdSlot + 2]});
    a.parameters.push_back({"frames", static_cast<double>(frames.size())});
    const std::vector<face::FaceFeatureFrame> window(processor.window().begin(), processor.window().end());
    return {std::move(a), face::format_stream_csv(window), "text/csv"};
  }

 private:
  EmotionVocabulary vocabulary_;
  face::LinearAVModel model_;
};

}  // namespace

std::unique_ptr<Analyzer> make_analyzer(std::string_view subsystem, const RuntimeConfig& config) {
  platform::check_subsystem(subsystem);
  if (subsystem == "voice") return std::make_unique<VoiceAnalyzer>(config);
  if (subsystem == "body") return std::make_unique<BodyAnalyzer>(config);
  return std::make_unique<FaceAnalyzer>(config);
}

std::string_view to_string(ServiceState s) {
  switch (s) {
    case ServiceState::idle: return "idle";
    case ServiceState::running: return "running";
    case ServiceState::stopped: return "stopped";
    case ServiceState::exiting: return "exiting";
  }
  return "?";
}

Service::Service(std::string subsystem, RuntimeConfig config)
    : subsystem_(std::move(subsystem)), config_(std::move(config)) {
  platform::check_subsystem(subsystem_);
  analyzer_ = make_analyzer(subsystem_, config_);
}

int Service::run(std::chrono::milliseconds connect_timeout) {
  media_.start(config_.broker_host, config_.media_ports.at(subsystem_));

  stomp::Client client;
  const auto deadline = std::chrono::steady_clock::now() + connect_timeout;
  while (true) {
    try {
      client.connect(config_.broker_host, config_.broker_port, std::chrono::seconds(2));
      break;
    } catch (const std::exception& e) {
      if (std::chrono::steady_clock::now() >= deadline) {
        throw BrokerUnreachable("no broker at " + config_.broker_host + ":" + std::to_string(config_.broker_port) +
                                ": " + e.what());
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  }
  client.subscribe(stomp::control_queue(subsystem_), "control");

  const auto reply = [&](std::string_view command, const std::string& id, std::string detail) {
    emotionml::StatusInfo s{subsystem_, std::string(to_string(state_)), std::string(command), id, std::move(detail)};
    client.send(stomp::kResultsTopic, emotionml::serialize_status(s),
                {{std::string(platform::kKindHeader), "status"},
                 {std::string(platform::kCorrelationHeader), id},
                 {std::string(platform::kSubsystemHeader), subsystem_}});
  };

  while (!stop_requested_) {
    if (!client.is_connected()) return 4;
    const auto msg = client.next_message(std::chrono::milliseconds(200));
    if (!msg) continue;
    const std::string command = msg->body;
    const std::string id(msg->header(platform::kCorrelationHeader).value_or(""));
    if (command == "start") {
      state_ = ServiceState::running;
      reply(command, id, "");
    } else if (command == "stop") {
      if (state_ == ServiceState::running) state_ = ServiceState::stopped;
      reply(command, id, "");
    } else if (command == "status") {
      reply(command, id, "");
    } else if (command == "shutdown") {
      state_ = ServiceState::exiting;
      reply(command, id, "");
      break;
    } else if (command == "submit") {
      if (state_ != ServiceState::running) {
        reply(command, id, "not running");
        continue;
      }
      const std::string media(msg->header(platform::kMediaHeader).value_or(""));
      const std::string target(msg->header(platform::kTargetHeader).value_or(""));
      std::int64_t t = 0;
      try {
        t = std::stoll(std::string(msg->header(platform::kSessionTimeHeader).value_or("0")));
        auto analysis = analyzer_->analyze(media, target, t);
        media_.set_latest(std::move(analysis.media), std::move(analysis.content_type));
        client.send(stomp::kResultsTopic, emotionml::serialize_emotionml({analysis.annotation}),
                    {{std::string(platform::kKindHeader), "result"},
                     {std::string(platform::kCorrelationHeader), id},
                     {std::string(platform::kSubsystemHeader), subsystem_}});
      } catch (const std::exception& e) {
        reply(command, id, std::string("error: ") + e.what());
      }
    } else {
      reply(command, id, "unknown command");
    }
  }
  client.disconnect();
  media_.stop();
  return 0;
}

}  // namespace asc::runner
