#include <doctest.h>

#include <random>

#include "asc/emotionml.hpp"
#include "generators.hpp"

using namespace asc;
using namespace asc::emotionml;
using asc::test::random_annotation;

namespace {

Errc code_of(std::string_view text) {
  try {
    parse_emotionml(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_annotation;
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}


const char* const kDoc = R"(<?xml version="1.0"?>
<emotionml xmlns="http://www.w3.org/2009/10/emotionml" version="1.0">
  <emotion expressed-through="voice">
    <dimension name="arousal" value="0.75"/>
    <dimension name="valence" value="0.25"/>
    <info timestamp-ms="40"/>
  </emotion>
</emotionml>)";

}  // namespace

TEST_CASE("one emotion element is read field by field") {
  const auto list = parse_emotionml(kDoc);
  REQUIRE(list.size() == 1);
  CHECK(list[0].modality == Modality::voice);
  CHECK(list[0].arousal == 0.75);
  CHECK(list[0].valence == 0.25);
  CHECK(list[0].timestamp_ms == 40);
  CHECK_FALSE(list[0].category.has_value());
}

TEST_CASE("unknown elements and attributes are ignored") {
  const auto list = parse_emotionml(R"(<emotionml><extra a="1"><deep/></extra>
    <emotion expressed-through="face" mood="x"><trace/><dimension name="arousal" value="1"/>
    <dimension name="valence" value="0" confidence="0.2"/><dimension name="potency" value="0.4"/></emotion></emotionml>)");
  REQUIRE(list.size() == 1);
  CHECK(list[0].modality == Modality::face);
  CHECK(list[0].arousal == 1.0);
  CHECK(list[0].valence == 0.0);
}

TEST_CASE("declared error classes") {
  CHECK(code_of(R"(<emotionml><emotion expressed-through="voice"><dimension name="arousal" value="1.3"/>
    <dimension name="valence" value="0.5"/></emotion></emotionml>)") == Errc::value_out_of_range);
  CHECK(code_of(R"(<emotionml><emotion expressed-through="voice"><dimension name="arousal" value="0.3"/>
    </emotion></emotionml>)") == Errc::missing_dimension);
  CHECK(code_of("<emotionml><emotion>") == Errc::malformed_document);
  CHECK(code_of("") == Errc::malformed_document);
  CHECK(code_of("<other/>") == Errc::malformed_document);
}

TEST_CASE("serialization structure") {
  EmotionAnnotation a;
  a.modality = Modality::face;
  const auto doc = serialize_emotionml({a});
  CHECK(count(doc, "<emotion ") == 1);
  CHECK(count(doc, "<dimension ") == 2);
  CHECK(doc.find("asc-av") != std::string::npos);

  EmotionAnnotation b = a;
  b.modality = Modality::body;
  b.category = "angry";
  const auto two = parse_emotionml(serialize_emotionml({a, b}));
  REQUIRE(two.size() == 2);
  CHECK(two[0] == a);
  CHECK(two[1] == b);

  try {
    serialize_emotionml({});
    FAIL("empty list accepted");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_annotation);
  }
  EmotionAnnotation bad;
  bad.arousal = 1.5;
  CHECK_THROWS_AS(serialize_emotionml({bad}), Error);
}

TEST_CASE("round trip on random annotation lists") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 500; ++i) {
    std::vector<EmotionAnnotation> list;
    for (int k = std::uniform_int_distribution<int>(1, 4)(rng); k > 0; --k) list.push_back(random_annotation(rng));
    const auto doc = serialize_emotionml(list);
    REQUIRE(parse_emotionml(doc) == list);
    CHECK(serialize_emotionml(parse_emotionml(doc)) == doc);
  }
}

TEST_CASE("wire and internal scales") {
  EmotionAnnotation a;
  a.arousal = 0.5;
  a.valence = 0.5;
  CHECK(to_internal(a) == AVPoint{0.0, 0.0});
  a.arousal = 1.0;
  a.valence = 0.0;
  CHECK(to_internal(a) == AVPoint{1.0, -1.0});
  const auto w = from_internal({0.0, 0.0}, Modality::voice, std::nullopt, 0);
  CHECK(w.arousal == 0.5);
  CHECK(w.valence == 0.5);
  CHECK(w.modality == Modality::voice);
  const auto z = from_internal({-1.0, -1.0}, Modality::face, "sad", 5);
  CHECK(z.arousal == 0.0);
  CHECK(z.valence == 0.0);
}

TEST_CASE("scale maps are inverse to 1e-12") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sym(-1.0, 1.0), unit(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const AVPoint p{sym(rng), sym(rng)};
    const auto q = to_internal(from_internal(p, Modality::body, std::nullopt, 0));
    CHECK(std::abs(q.arousal - p.arousal) <= 1e-12);
    CHECK(std::abs(q.valence - p.valence) <= 1e-12);
    EmotionAnnotation a;
    a.arousal = unit(rng);
    a.valence = unit(rng);
    const auto b = from_internal(to_internal(a), a.modality, std::nullopt, 0);
    CHECK(std::abs(b.arousal - a.arousal) <= 1e-12);
    CHECK(std::abs(b.valence - a.valence) <= 1e-12);
  }
}

TEST_CASE("mutated documents only raise the parse error classes") {
  std::mt19937_64 rng(2024);
  std::vector<EmotionAnnotation> seed_list;
  for (int i = 0; i < 3; ++i) seed_list.push_back(random_annotation(rng));
  const std::string base = serialize_emotionml(seed_list);
  const std::string alphabet = "<>/=\"'&;!?-[]aeiou0123456789. \n\t\x01\xff\xc3";
  std::uniform_int_distribution<int> op(0, 4);
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string doc = base;
    for (int m = std::uniform_int_distribution<int>(1, 6)(rng); m > 0 && !doc.empty(); --m) {
      const auto pos = std::uniform_int_distribution<std::size_t>(0, doc.size() - 1)(rng);
      const char c = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
      switch (op(rng)) {
        case 0: doc[pos] = c; break;
        case 1: doc.erase(pos, 1); break;
        case 2: doc.insert(doc.begin() + static_cast<std::ptrdiff_t>(pos), c); break;
        case 3: doc.resize(pos); break;
        default: doc[pos] = static_cast<char>(std::uniform_int_distribution<int>(0, 255)(rng)); break;
      }
    }
    try {
      parse_emotionml(doc);
      ++accepted;
    } catch (const Error& e) {
      ++rejected;
      const bool declared = e.code() == Errc::malformed_document || e.code() == Errc::missing_dimension ||
                            e.code() == Errc::value_out_of_range;
      if (!declared) FAIL("undeclared error class: " << e.what());
    } catch (const std::exception& e) {
      FAIL("foreign exception: " << e.what());
    }
  }
  CHECK(accepted + rejected == 10000);
  CHECK(rejected > 0);
}

TEST_CASE("status documents") {
  const StatusInfo s{"voice", "running", "start", "voice/start", "a <b> & c"};
  const auto doc = serialize_status(s);
  CHECK(parse_status(doc) == s);
  CHECK_THROWS_AS(parse_emotionml(doc), Error);
  CHECK_THROWS_AS(parse_status(kDoc), Error);
}
