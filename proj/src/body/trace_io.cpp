#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "asc/body/body.hpp"
#include "asc/keyvalue.hpp"

namespace asc::body {

Trace parse_trace_csv(std::string_view text) {
  std::map<double, std::pair<SkeletonFrame, std::size_t>> frames;  // t -> (frame, joint mask)
  std::size_t pos = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "t_ms,joint,x,y,z") throw Error(Errc::bad_trace, "expected header 't_ms,joint,x,y,z'");
      header_seen = true;
      continue;
    }
    std::array<std::string_view, 5> fields;
    std::size_t start = 0;
    for (std::size_t f = 0; f < 5; ++f) {
      const auto comma = line.find(',', start);
      if ((comma == std::string_view::npos) != (f == 4)) {
        throw Error(Errc::bad_trace, "line " + std::to_string(line_no) + ": expected 5 fields");
      }
      fields[f] = trim(line.substr(start, comma == std::string_view::npos ? line.size() - start : comma - start));
      start = comma + 1;
    }
    const auto joint = parse_joint(fields[1]);
    if (!joint) throw Error(Errc::bad_trace, "line " + std::to_string(line_no) + ": unknown joint");
    double t = 0, x = 0, y = 0, z = 0;
    try {
      t = parse_double(fields[0]);
      x = parse_double(fields[2]);
      y = parse_double(fields[3]);
      z = parse_double(fields[4]);
    } catch (const KeyValueError& e) {
      throw Error(Errc::bad_trace, "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!std::isfinite(t) || !std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
      throw Error(Errc::bad_trace, "line " + std::to_string(line_no) + ": non-finite value");
    }
    auto& [frame, mask] = frames[t];
    frame.timestamp_ms = t;
    const auto bit = std::size_t{1} << static_cast<std::size_t>(*joint);
    if (mask & bit) throw Error(Errc::bad_trace, "line " + std::to_string(line_no) + ": repeated joint");
    mask |= bit;
    frame[*joint] = {x, y, z};
  }
  if (!header_seen) throw Error(Errc::bad_trace, "empty trace file");
  Trace trace;
  for (auto& [t, entry] : frames) {
    if (entry.second != (std::size_t{1} << kJointCount) - 1) {
      throw Error(Errc::bad_trace, "frame at " + format_double(t) + " ms lacks joints");
    }
    trace.push_back(entry.first);
  }
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::bad_trace, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_trace_csv(buf.str());
}

std::string format_trace_csv(std::span<const SkeletonFrame> trace) {
  std::string out = "t_ms,joint,x,y,z\n";
  for (const auto& fr : trace) {
    for (std::size_t j = 0; j < kJointCount; ++j) {
      const auto& p = fr.joints[j];
      out += format_double(fr.timestamp_ms) + ',' + std::string(to_string(static_cast<Joint>(j))) + ',' +
             format_double(p.x) + ',' + format_double(p.y) + ',' + format_double(p.z) + '\n';
    }
  }
  return out;
}

}  // namespace asc::body
