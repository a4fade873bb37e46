#include "asc/emotionml.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "asc/keyvalue.hpp"
#include "xml.hpp"

namespace asc::emotionml {
namespace {

constexpr std::string_view kNamespace = "http://www.w3.org/2009/10/emotionml";

[[noreturn]] void raise(Errc code, const std::string& what) { throw Error(code, what); }

std::string_view wire_modality(Modality m) {
  switch (m) {
    case Modality::face: return "face";
    case Modality::voice: return "voice";
    case Modality::body: return "gesture";
    case Modality::fused: return "fused";
  }
  return "fused";
}

Modality modality_from_wire(std::string_view text) {
  if (text == "face") return Modality::face;
  if (text == "voice") return Modality::voice;
  if (text == "gesture" || text == "body") return Modality::body;
  if (text == "fused") return Modality::fused;
  raise(Errc::malformed_document, "unknown expressed-through '" + std::string(text) + "'");
}

double number(std::string_view text, std::string_view what) {
  try {
    return parse_double(text);
  } catch (const KeyValueError&) {
    raise(Errc::malformed_document, std::string(what) + " is not a number: '" + std::string(text) + "'");
  }
}

double unit_value(std::string_view text, std::string_view what) {
  const double v = number(text, what);
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    raise(Errc::value_out_of_range, std::string(what) + " " + std::string(text) + " outside [0, 1]");
  }
  return v;
}

std::int64_t timestamp(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    raise(Errc::malformed_document, "timestamp-ms is not an integer");
  }
  if (value < 0) raise(Errc::value_out_of_range, "negative timestamp-ms");
  return value;
}

std::unique_ptr<xml::Element> parse_root(std::string_view text) {
  std::unique_ptr<xml::Element> root;
  try {
    root = xml::parse(text);
  } catch (const xml::ParseError& e) {
    raise(Errc::malformed_document, e.what());
  }
  if (root->local_name() != "emotionml") {
    raise(Errc::malformed_document, "root element is '" + root->name + "', expected emotionml");
  }
  return root;
}

EmotionAnnotation read_emotion(const xml::Element& e) {
  EmotionAnnotation a;
  auto through = e.attribute("expressed-through");
  if (!through) raise(Errc::malformed_document, "emotion without expressed-through");
  a.modality = modality_from_wire(trim(*through));

  std::optional<double> arousal;
  std::optional<double> valence;
  for (const auto& child : e.children) {
    const auto name = child->local_name();
    if (name == "dimension") {
      auto dim = child->attribute("name");
      auto value = child->attribute("value");
      if (!dim) continue;
      if (*dim != "arousal" && *dim != "valence") continue;
      if (!value) raise(Errc::missing_dimension, "dimension '" + std::string(*dim) + "' without value");
      auto& slot = *dim == "arousal" ? arousal : valence;
      if (slot) raise(Errc::malformed_document, "repeated dimension '" + std::string(*dim) + "'");
      slot = unit_value(*value, *dim);
    } else if (name == "category") {
      auto label = child->attribute("name");
      if (!label || label->empty()) raise(Errc::malformed_document, "category without name");
      if (a.category) raise(Errc::malformed_document, "repeated category");
      a.category = std::string(*label);
    } else if (name == "info") {
      if (auto ts = child->attribute("timestamp-ms")) a.timestamp_ms = timestamp(*ts);
      if (auto conf = child->attribute("confidence")) a.confidence = unit_value(*conf, "confidence");
      for (const auto& p : child->children) {
        if (p->local_name() != "param") continue;
        auto pname = p->attribute("name");
        auto pvalue = p->attribute("value");
        if (!pname || pname->empty() || !pvalue) raise(Errc::malformed_document, "param needs name and value");
        const double v = number(*pvalue, "param value");
        if (!std::isfinite(v)) raise(Errc::value_out_of_range, "non-finite param value");
        a.parameters.push_back({std::string(*pname), v});
      }
    }
  }
  if (!arousal) raise(Errc::missing_dimension, "emotion without arousal dimension");
  if (!valence) raise(Errc::missing_dimension, "emotion without valence dimension");
  a.arousal = *arousal;
  a.valence = *valence;
  return a;
}

void open_document(std::string& out) {
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<emotionml xmlns=\"";
  out += kNamespace;
  out += "\" version=\"1.0\" dimension-set=\"#asc-av\">\n";
}

}  // namespace

std::string_view to_string(Errc e) {
  switch (e) {
    case Errc::malformed_document: return "MalformedDocument";
    case Errc::missing_dimension: return "MissingDimension";
    case Errc::value_out_of_range: return "ValueOutOfRange";
    case Errc::invalid_annotation: return "InvalidAnnotation";
  }
  return "?";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::optional<double> EmotionAnnotation::parameter(std::string_view name) const {
  for (const auto& p : parameters) {
    if (p.name == name) return p.value;
  }
  return std::nullopt;
}

void validate(const EmotionAnnotation& a) {
  auto in_unit = [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; };
  if (!in_unit(a.arousal) || !in_unit(a.valence)) {
    raise(Errc::invalid_annotation, "dimension value outside [0, 1]");
  }
  if (a.confidence && !in_unit(*a.confidence)) raise(Errc::invalid_annotation, "confidence outside [0, 1]");
  if (a.timestamp_ms < 0) raise(Errc::invalid_annotation, "negative timestamp");
  if (a.category && (a.category->empty() || !xml::is_valid_text(*a.category))) {
    raise(Errc::invalid_annotation, "empty or unencodable category");
  }
  for (const auto& p : a.parameters) {
    if (p.name.empty() || !xml::is_valid_text(p.name) || !std::isfinite(p.value)) {
      raise(Errc::invalid_annotation, "bad parameter");
    }
  }
}

std::vector<EmotionAnnotation> parse_emotionml(std::string_view text) {
  const auto root = parse_root(text);
  std::vector<EmotionAnnotation> out;
  for (const auto& child : root->children) {
    if (child->local_name() == "emotion") out.push_back(read_emotion(*child));
  }
  if (out.empty()) raise(Errc::malformed_document, "document contains no emotion element");
  return out;
}

std::string serialize_emotionml(const std::vector<EmotionAnnotation>& annotations) {
  if (annotations.empty()) raise(Errc::invalid_annotation, "nothing to serialize");
  for (const auto& a : annotations) validate(a);

  std::string out;
  open_document(out);
  out += "  <vocabulary type=\"dimension\" id=\"asc-av\">\n";
  out += "    <item name=\"arousal\"/>\n    <item name=\"valence\"/>\n";
  out += "  </vocabulary>\n";
  for (const auto& a : annotations) {
    out += "  <emotion expressed-through=\"";
    out += wire_modality(a.modality);
    out += "\">\n";
    if (a.category) {
      out += "    <category name=\"" + xml::escape(*a.category) + "\"/>\n";
    }
    out += "    <dimension name=\"arousal\" value=\"" + format_double(a.arousal) + "\"/>\n";
    out += "    <dimension name=\"valence\" value=\"" + format_double(a.valence) + "\"/>\n";
    out += "    <info timestamp-ms=\"" + std::to_string(a.timestamp_ms) + "\"";
    if (a.confidence) out += " confidence=\"" + format_double(*a.confidence) + "\"";
    if (a.parameters.empty()) {
      out += "/>\n";
    } else {
      out += ">\n";
      for (const auto& p : a.parameters) {
        out += "      <param name=\"" + xml::escape(p.name) + "\" value=\"" + format_double(p.value) + "\"/>\n";
      }
      out += "    </info>\n";
    }
    out += "  </emotion>\n";
  }
  out += "</emotionml>\n";
  return out;
}

AVPoint to_internal(const EmotionAnnotation& a) {
  return {2.0 * a.arousal - 1.0, 2.0 * a.valence - 1.0};
}

EmotionAnnotation from_internal(const AVPoint& p, Modality modality,
                                std::optional<std::string> category, std::int64_t timestamp_ms) {
  EmotionAnnotation a;
  a.modality = modality;
  a.arousal = std::clamp((p.arousal + 1.0) / 2.0, 0.0, 1.0);
  a.valence = std::clamp((p.valence + 1.0) / 2.0, 0.0, 1.0);
  a.category = std::move(category);
  a.timestamp_ms = timestamp_ms;
  return a;
}

std::string serialize_status(const StatusInfo& s) {
  std::string out;
  open_document(out);
  out += "  <info subsystem=\"" + xml::escape(s.subsystem) + "\" state=\"" + xml::escape(s.state) +
         "\" command=\"" + xml::escape(s.command) + "\" correlation-id=\"" +
         xml::escape(s.correlation_id) + "\" detail=\"" + xml::escape(s.detail) + "\"/>\n";
  out += "</emotionml>\n";
  return out;
}

StatusInfo parse_status(std::string_view text) {
  const auto root = parse_root(text);
  for (const auto& child : root->children) {
    if (child->local_name() != "info") continue;
    auto subsystem = child->attribute("subsystem");
    auto state = child->attribute("state");
    if (!subsystem || !state) continue;
    StatusInfo s;
    s.subsystem = std::string(*subsystem);
    s.state = std::string(*state);
    s.command = std::string(child->attribute("command").value_or(""));
    s.correlation_id = std::string(child->attribute("correlation-id").value_or(""));
    s.detail = std::string(child->attribute("detail").value_or(""));
    return s;
  }
  raise(Errc::malformed_document, "no status info element");
}

}  // namespace asc::emotionml
