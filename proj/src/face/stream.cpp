#include <cmath>
#include <fstream>
#include <sstream>

#include "asc/face/face.hpp"
#include "asc/keyvalue.hpp"

namespace asc::face {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    if (!line.empty()) lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::vector<double> parse_row(std::string_view line, std::size_t expected, std::size_t line_no) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    const auto field = trim(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
    try {
      values.push_back(parse_double(field));
    } catch (const KeyValueError& e) {
      throw Error(Errc::bad_stream, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!std::isfinite(values.back())) {
      throw Error(Errc::bad_stream, "line " + std::to_string(line_no) + ": non-finite value");
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() != expected) {
    throw Error(Errc::dimension_mismatch, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(expected) + " values, got " +
                                              std::to_string(values.size()));
  }
  return values;
}

std::string feature_header() {
  std::string h;
  for (std::size_t i = 1; i <= kFeatureCount; ++i) {
    if (i > 1) h += ',';
    h += 'f' + std::to_string(i);
  }
  return h;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::bad_stream, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

FaceFeatureFrame StreamProcessor::push(FaceFeatureFrame frame) {
  if (!window_.empty() && !(frame.timestamp_ms > window_.back().timestamp_ms)) {
    throw Error(Errc::bad_stream, "timestamps must increase strictly");
  }
  window_.push_back(frame);
  if (window_.size() > kPoseWindow) window_.pop_front();
  PoseVariation v;
  if (window_.size() >= 2) {
    const std::vector<FaceFeatureFrame> recent(window_.begin(), window_.end());
    v = pose_variation(recent);
  }
  frame.features[kPoseStdSlot] = v.yaw;
  frame.features[kPoseStdSlot + 1] = v.pitch;
  frame.features[kPoseStdSlot + 2] = v.roll;
  window_.back() = frame;
  return frame;
}

std::vector<FaceFeatureFrame> parse_stream_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "t_ms," + feature_header()) {
    throw Error(Errc::bad_stream, "expected header t_ms,f1,...,f34");
  }
  std::vector<FaceFeatureFrame> frames;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto v = parse_row(lines[i], kFeatureCount + 1, i + 1);
    FaceFeatureFrame f;
    f.timestamp_ms = v[0];
    std::copy(v.begin() + 1, v.end(), f.features.begin());
    if (!frames.empty() && !(f.timestamp_ms > frames.back().timestamp_ms)) {
      throw Error(Errc::bad_stream, "line " + std::to_string(i + 1) + ": timestamps must increase strictly");
    }
    frames.push_back(f);
  }
  return frames;
}

std::vector<FaceFeatureFrame> read_stream(const std::filesystem::path& path) {
  return parse_stream_csv(slurp(path));
}

std::string format_stream_csv(std::span<const FaceFeatureFrame> frames) {
  std::string out = "t_ms," + feature_header() + '\n';
  for (const auto& f : frames) {
    out += format_double(f.timestamp_ms);
    for (double x : f.features) out += ',' + format_double(x);
    out += '\n';
  }
  return out;
}

std::vector<TrainingRow> parse_training_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != feature_header() + ",valence,arousal") {
    throw Error(Errc::bad_stream, "expected header f1,...,f34,valence,arousal");
  }
  std::vector<TrainingRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto v = parse_row(lines[i], kFeatureCount + 2, i + 1);
    TrainingRow r;
    std::copy_n(v.begin(), kFeatureCount, r.features.begin());
    r.valence = v[kFeatureCount];
    r.arousal = v[kFeatureCount + 1];
    if (std::abs(r.valence) > 1.0 || std::abs(r.arousal) > 1.0) {
      throw Error(Errc::bad_stream, "line " + std::to_string(i + 1) + ": targets must lie in [-1, 1]");
    }
    rows.push_back(r);
  }
  return rows;
}

std::vector<TrainingRow> read_training(const std::filesystem::path& path) {
  return parse_training_csv(slurp(path));
}

std::string format_training_csv(std::span<const TrainingRow> rows) {
  std::string out = feature_header() + ",valence,arousal\n";
  for (const auto& r : rows) {
    for (double x : r.features) out += format_double(x) + ',';
    out += format_double(r.valence) + ',' + format_double(r.arousal) + '\n';
  }
  return out;
}

}  // namespace asc::face
