// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// line fails. Every check computes its own evidence and prints it.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <csignal>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "asc/body/body.hpp"
#include "asc/emotionml.hpp"
#include "asc/face/face.hpp"
#include "asc/platform/game.hpp"
#include "asc/platform/session_log.hpp"
#include "asc/runner/demo.hpp"
#include "asc/runner/session.hpp"
#include "asc/stomp/broker.hpp"
#include "asc/stomp/client.hpp"
#include "asc/voice/prototypes.hpp"
#include "asc/voice/wav.hpp"
#include "generators.hpp"
#include "support.hpp"

using namespace asc;
using namespace std::chrono_literals;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const Clock::time_point kStart = Clock::now();

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Collects failed sub-checks for one criterion.
struct Evidence {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& text) { notes.push_back(text); }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int g_failed = 0;

void criterion(const std::string& name, double limit_s, const std::function<void(Evidence&)>& body) {
  Evidence ev;
  const auto t0 = Clock::now();
  try {
    body(ev);
  } catch (const std::exception& e) {
    ev.failures.push_back(std::string("exception: ") + e.what());
  }
  const double took = seconds_since(t0);
  if (limit_s > 0) ev.require(took < limit_s, "runtime " + fmt("%.2f", took) + " s over " + fmt("%.0f", limit_s) + " s");
  const bool pass = ev.failures.empty();
  g_failed += pass ? 0 : 1;
  std::string detail;
  for (const auto& n : ev.notes) detail += (detail.empty() ? "" : "; ") + n;
  std::cout << (pass ? "PASS " : "FAIL ") << name << " [" << fmt("%.2f", took) << " s] " << detail << '\n';
  for (const auto& f : ev.failures) std::cout << "     - " << f << '\n';
  std::cout.flush();
}

// ---------------------------------------------------------------- STOMP

std::vector<std::string> drain(stomp::Client& c, std::size_t expected) {
  std::vector<std::string> out;
  const auto deadline = Clock::now() + 5s;
  while (out.size() < expected && Clock::now() < deadline) {
    if (auto m = c.next_message(50ms)) out.push_back(m->body);
  }
  while (auto m = c.next_message(20ms)) out.push_back(m->body);
  return out;
}

void stomp_suite(Evidence& ev) {
  std::mt19937_64 rng(1);
  int exact = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto f = test::random_frame(rng);
    const auto bytes = stomp::encode_frame(f);
    const auto d = stomp::decode_frame(bytes);
    exact += d.frame == f && d.consumed == bytes.size();
  }
  ev.require(exact == 1000, std::to_string(1000 - exact) + " frames did not round-trip");
  ev.note("round-trip " + std::to_string(exact) + "/1000");

  stomp::BrokerOptions opts;
  opts.port = 0;
  stomp::Broker broker(opts);
  broker.start();
  const auto client = [&] {
    auto c = std::make_unique<stomp::Client>();
    c->connect("127.0.0.1", broker.port());
    return c;
  };

  std::string fan;
  for (int n : {1, 2, 5}) {
    const stomp::Destination topic{stomp::Destination::Kind::topic, "fanout" + std::to_string(n)};
    std::vector<std::unique_ptr<stomp::Client>> subs;
    for (int i = 0; i < n; ++i) {
      subs.push_back(client());
      subs.back()->subscribe(topic, "s");
    }
    auto pub = client();
    for (int m = 0; m < 20; ++m) pub->send(topic, std::to_string(m), {}, m == 19);
    std::size_t copies = 0;
    for (auto& s : subs) {
      const auto got = drain(*s, 20);
      bool in_order = got.size() == 20;
      for (std::size_t m = 0; in_order && m < got.size(); ++m) in_order = got[m] == std::to_string(m);
      ev.require(in_order, "fan-out N=" + std::to_string(n) + ": a subscriber missed or reordered messages");
      copies += got.size();
    }
    ev.require(copies == static_cast<std::size_t>(20 * n), "fan-out N=" + std::to_string(n) + " copies wrong");
    fan += (fan.empty() ? "" : "/") + std::to_string(copies / 20);
  }
  ev.note("fan-out copies " + fan + " for N=1/2/5");

  const stomp::Destination q{stomp::Destination::Kind::queue, "partition"};
  std::vector<std::unique_ptr<stomp::Client>> consumers;
  for (int i = 0; i < 3; ++i) {
    consumers.push_back(client());
    consumers.back()->subscribe(q, "c");
  }
  auto producer = client();
  for (int i = 0; i < 1000; ++i) producer->send(q, "m" + std::to_string(i), {}, i == 999);
  std::map<std::string, int> seen;
  std::size_t total = 0;
  const auto deadline = Clock::now() + 5s;
  while (total < 1000 && Clock::now() < deadline) {
    for (auto& c : consumers) {
      while (auto m = c->next_message(10ms)) {
        ++seen[m->body];
        ++total;
      }
    }
  }
  for (auto& c : consumers) {
    while (auto m = c->next_message(50ms)) {
      ++seen[m->body];
      ++total;
    }
  }
  int once = 0;
  for (int i = 0; i < 1000; ++i) once += seen["m" + std::to_string(i)] == 1;
  ev.require(once == 1000 && total == 1000,
             "partition: " + std::to_string(once) + " delivered once, " + std::to_string(total) + " deliveries");
  ev.note("partition " + std::to_string(once) + "/1000 exactly once, " + std::to_string(1000 - once) + " lost");
  broker.stop();
}

// ------------------------------------------------------------ EmotionML

void emotionml_suite(Evidence& ev) {
  using namespace emotionml;
  std::mt19937_64 rng(2);
  int exact = 0;
  for (int i = 0; i < 1000; ++i) {
    std::vector<EmotionAnnotation> list;
    for (int k = std::uniform_int_distribution<int>(1, 4)(rng); k > 0; --k) list.push_back(test::random_annotation(rng));
    const auto doc = serialize_emotionml(list);
    const auto back = parse_emotionml(doc);
    exact += back == list && serialize_emotionml(back) == doc;
  }
  ev.require(exact == 1000, std::to_string(1000 - exact) + " documents did not round-trip");
  ev.note("round-trip " + std::to_string(exact) + "/1000");

  std::vector<EmotionAnnotation> seed_list;
  for (int i = 0; i < 3; ++i) seed_list.push_back(test::random_annotation(rng));
  const auto base = serialize_emotionml(seed_list);
  const std::string alphabet = "<>/=\"'&;!?-[]aeiou0123456789. \n\t\x01\xff\xc3";
  int accepted = 0, rejected = 0, crashed = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string doc = base;
    for (int m = std::uniform_int_distribution<int>(1, 6)(rng); m > 0 && !doc.empty(); --m) {
      const auto pos = std::uniform_int_distribution<std::size_t>(0, doc.size() - 1)(rng);
      const char c = alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
      switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
        case 0: doc[pos] = c; break;
        case 1: doc.erase(pos, 1); break;
        case 2: doc.insert(doc.begin() + static_cast<std::ptrdiff_t>(pos), c); break;
        default: doc.resize(pos); break;
      }
    }
    try {
      parse_emotionml(doc);
      ++accepted;
    } catch (const Error&) {
      ++rejected;
    } catch (...) {
      ++crashed;
    }
  }
  ev.require(crashed == 0, std::to_string(crashed) + " mutated documents escaped the declared errors");
  ev.note("fuzz 10000: " + std::to_string(accepted) + " accepted, " + std::to_string(rejected) + " rejected, " +
          std::to_string(crashed) + " crashes");

  std::uniform_real_distribution<double> sym(-1.0, 1.0), unit(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const AVPoint p{sym(rng), sym(rng)};
    const auto q = to_internal(from_internal(p, Modality::body, std::nullopt, 0));
    worst = std::max({worst, std::abs(q.arousal - p.arousal), std::abs(q.valence - p.valence)});
    EmotionAnnotation w;
    w.arousal = unit(rng);
    w.valence = unit(rng);
    const auto back = from_internal(to_internal(w), Modality::face, std::nullopt, 0);
    worst = std::max({worst, std::abs(back.arousal - w.arousal), std::abs(back.valence - w.valence)});
  }
  ev.require(worst <= 1e-12, "scale bijection error " + fmt("%.3g", worst));
  ev.note("bijection max error " + fmt("%.2g", worst));
}

// ---------------------------------------------------------------- Voice

std::vector<double> dft_power(const std::vector<double>& x) {
  const std::size_t n = x.size();
  std::vector<double> p(n / 2 + 1);
  for (std::size_t k = 0; k < p.size(); ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      s += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n));
    }
    p[k] = std::norm(s);
  }
  return p;
}

void voice_suite(Evidence& ev, const runner::DemoSet& demo) {
  using namespace voice;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  double worst_f0 = 0.0;
  int tones = 0;
  for (double hz = 80.0; hz <= 400.0; hz += 10.0, ++tones) {
    const auto contour = f0_contour(frame_signal(test::sine(hz, 0.3, 0.5, phase(rng))));
    for (double f : contour) worst_f0 = std::max(worst_f0, f > 0.0 ? std::abs(f - hz) / hz : 1.0);
  }
  ev.require(worst_f0 <= 0.02, "F0 error " + fmt("%.4f", worst_f0));
  ev.note(std::to_string(tones) + " tones, worst F0 error " + fmt("%.3f", 100 * worst_f0) + "%");

  double worst_band = 0.0;
  std::normal_distribution<double> noise(0.0, 0.3);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> x(400);
    for (auto& v : x) v = noise(rng);
    const auto bands = band_energies(x, 16000);
    const auto p = dft_power(x);
    double in_range = 0.0, total = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double f = 16000.0 * static_cast<double>(k) / 400.0;
      if (f >= 20.0 && f <= 8000.0) in_range += p[k];
    }
    for (double b : bands) total += b;
    worst_band = std::max(worst_band, std::abs(total - in_range) / in_range);
  }
  ev.require(worst_band <= 1e-6, "band partition error " + fmt("%.3g", worst_band));
  ev.note("band partition max rel error " + fmt("%.2g", worst_band));

  const auto library = load_library(demo.root / "voice" / "prototypes", EmotionVocabulary::standard());
  int green = 0;
  for (const auto& e : library) {
    const auto fb = compare_to_prototype(summarize(read_wav(e.clip_path)), e);
    bool all = fb.overall_light == Light::green;
    for (auto l : fb.lights) all = all && l == Light::green;
    green += all;
  }
  ev.require(!library.empty() && green == static_cast<int>(library.size()), "prototype self-comparison not all green");
  ev.note("self-comparison " + std::to_string(green) + "/" + std::to_string(library.size()) + " green");

  const bool edges = light_for(0.25) == Light::green && light_for(std::nextafter(0.25, 1.0)) == Light::yellow &&
                     light_for(0.5) == Light::yellow && light_for(std::nextafter(0.5, 1.0)) == Light::red;
  ev.require(edges, "light boundaries at 0.25/0.5");
  ev.note(std::string("light boundaries ") + (edges ? "exact" : "wrong"));
}

// ----------------------------------------------------------------- Body

void body_suite(Evidence& ev) {
  using namespace body;
  std::mt19937_64 rng(4);
  Trace still;
  for (int i = 0; i < 30; ++i) {
    auto f = runner::synth_gesture("sadness", rng).front();
    f.timestamp_ms = i * 33.0;
    if (!still.empty()) f.joints = still.front().joints;
    still.push_back(f);
  }
  const auto s = extract_features(still);
  const bool limits = s.ke_hands == 0.0 && s.ke_head == 0.0 && s.ke_upper == 0.0 && s.impulsivity == 1.0 &&
                      s.directness == 1.0 && s.fluidity == 1.0 && s.sway == 0.0;
  ev.require(limits, "static trace limits");
  ev.note(std::string("static limits ") + (limits ? "exact" : "off"));

  std::uniform_real_distribution<double> off(-5.0, 5.0);
  double worst_shift = 0.0, worst_ratio = 0.0;
  for (int rep = 0; rep < 60; ++rep) {
    const auto trace = runner::synth_gesture(kBasicEmotions[rep % 6], rng);
    auto moved = trace;
    const Vec3 d{off(rng), off(rng), off(rng)};
    for (auto& f : moved) {
      for (auto& p : f.joints) p = {p.x + d.x, p.y + d.y, p.z + d.z};
    }
    const auto a = extract_features(trace).to_array(), b = extract_features(moved).to_array();
    for (std::size_t i = 0; i < kFeatureCount; ++i) worst_shift = std::max(worst_shift, std::abs(a[i] - b[i]));

    auto slow = trace;
    for (auto& f : slow) f.timestamp_ms *= 2.0;
    const auto fa = extract_features(trace), fb = extract_features(slow);
    for (auto [x, y] : {std::pair{fa.ke_hands, fb.ke_hands}, {fa.ke_head, fb.ke_head}, {fa.ke_upper, fb.ke_upper}}) {
      worst_ratio = std::max(worst_ratio, std::abs(y / x - 0.25) / 0.25);
    }
  }
  ev.require(worst_shift <= 1e-9, "translation changed a feature by " + fmt("%.3g", worst_shift));
  ev.require(worst_ratio <= 1e-6, "time-rescale ratio error " + fmt("%.3g", worst_ratio));
  ev.note("translation max change " + fmt("%.2g", worst_shift) + ", ke ratio rel error " + fmt("%.2g", worst_ratio));

  // Independent nearest-centroid oracle over population-std scaling.
  std::vector<LabeledFeatures> samples;
  for (auto basic : kBasicEmotions) {
    for (int i = 0; i < 10; ++i) samples.push_back({std::string(basic), extract_features(runner::synth_gesture(basic, rng))});
  }
  const auto model = train_centroids(samples);
  std::array<double, kFeatureCount> mean{}, sd{}, lo{}, hi{};
  lo.fill(1e300);
  hi.fill(-1e300);
  for (const auto& x : samples) {
    const auto v = x.features.to_array();
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      mean[k] += v[k] / samples.size();
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  }
  for (const auto& x : samples) {
    const auto v = x.features.to_array();
    for (std::size_t k = 0; k < kFeatureCount; ++k) sd[k] += (v[k] - mean[k]) * (v[k] - mean[k]) / samples.size();
  }
  for (auto& v : sd) v = v > 0.0 ? std::sqrt(v) : 1.0;
  std::map<std::string, std::array<double, kFeatureCount>> centroid;
  std::map<std::string, int> count;
  for (const auto& x : samples) {
    const auto v = x.features.to_array();
    auto& c = centroid[x.label];
    for (std::size_t k = 0; k < kFeatureCount; ++k) c[k] += (v[k] - mean[k]) / sd[k];
    ++count[x.label];
  }
  for (auto& [label, c] : centroid) {
    for (auto& v : c) v /= count[label];
  }
  int agree = 0;
  for (int i = 0; i < 200; ++i) {
    std::array<double, kFeatureCount> v{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const double span = hi[k] - lo[k];
      v[k] = std::uniform_real_distribution<double>(lo[k] - 0.5 * span, hi[k] + 0.5 * span)(rng);
    }
    std::string best;
    double best_d = 1e300;
    for (const auto& [label, c] : centroid) {
      double d = 0.0;
      for (std::size_t k = 0; k < kFeatureCount; ++k) d += std::pow((v[k] - mean[k]) / sd[k] - c[k], 2);
      if (d < best_d) {
        best_d = d;
        best = label;
      }
    }
    agree += classify(BodyFeatures::from_array(v), model).label == best;
  }
  ev.require(agree == 200, "classifier agreed on " + std::to_string(agree) + "/200");
  ev.note("classifier vs oracle " + std::to_string(agree) + "/200");
}

// ----------------------------------------------------------------- Face

double ridge_objective(const std::vector<double>& X, std::size_t d, const std::vector<double>& y,
                       const std::vector<double>& wb, double lambda) {
  long double j = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    long double r = y[i] - wb[d];
    for (std::size_t k = 0; k < d; ++k) r -= X[i * d + k] * wb[k];
    j += r * r;
  }
  for (std::size_t k = 0; k < d; ++k) j += lambda * wb[k] * wb[k];
  return static_cast<double>(j);
}

void face_suite(Evidence& ev) {
  using namespace face;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t d = kFeatureCount;
  const auto problem = [&](std::size_t n, double noise, std::vector<double>& X, std::vector<double>& y,
                           std::vector<double>& truth) {
    truth.assign(d + 1, 0.0);
    for (auto& w : truth) w = g(rng);
    X.assign(n * d, 0.0);
    for (auto& x : X) x = g(rng);
    y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = truth[d] + noise * g(rng);
      for (std::size_t k = 0; k < d; ++k) y[i] += X[i * d + k] * truth[k];
    }
  };

  double worst_recovery = 0.0;
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> X, y, truth;
    problem(120, 0.0, X, y, truth);
    const auto w = ridge_fit(X, d, y, 0.0);
    for (std::size_t k = 0; k <= d; ++k) worst_recovery = std::max(worst_recovery, std::abs(w[k] - truth[k]));
  }
  ev.require(worst_recovery <= 1e-6, "planted recovery error " + fmt("%.3g", worst_recovery));
  ev.note("planted recovery max error " + fmt("%.2g", worst_recovery));

  double worst_grad = 0.0;
  for (double lambda : {0.0, 0.5, 1.0, 25.0}) {
    std::vector<double> X, y, truth;
    problem(200, 0.2, X, y, truth);
    const auto wb = ridge_fit(X, d, y, lambda);
    double g2 = 0.0, y2 = 0.0;
    for (std::size_t k = 0; k < wb.size(); ++k) {
      auto up = wb, down = wb;
      up[k] += 1e-5;
      down[k] -= 1e-5;
      const double gk = (ridge_objective(X, d, y, up, lambda) - ridge_objective(X, d, y, down, lambda)) / 2e-5;
      g2 += gk * gk;
    }
    for (double v : y) y2 += v * v;
    worst_grad = std::max(worst_grad, std::sqrt(g2) / (1e-6 * (1.0 + std::sqrt(y2))));
  }
  ev.require(worst_grad <= 1.0, "gradient norm above bound by factor " + fmt("%.3g", worst_grad));
  ev.note("gradient norm at " + fmt("%.2g", worst_grad) + " of its bound");

  LinearAVModel clamp_model;
  clamp_model.trained = true;
  clamp_model.arousal_bias = 1.7;
  clamp_model.valence_bias = -0.2;
  const auto c = AVPredictor(clamp_model).predict({});
  LinearAVModel lin;
  lin.trained = true;
  lin.arousal_weights[0] = 1.0;
  lin.valence_weights[0] = 1.0;
  AVPredictor smooth(lin);
  FaceFeatureFrame one, none;
  one.features[0] = 1.0;
  const auto s1 = smooth.predict(one);
  const auto s2 = smooth.predict(none);
  LinearAVModel zero;
  zero.trained = true;
  const bool ok = c == AVPoint{1.0, -0.2} && s1 == AVPoint{1.0, 1.0} && s2 == AVPoint{0.7, 0.7} &&
                  AVPredictor(zero).predict(one) == AVPoint{0.0, 0.0};
  ev.require(ok, "clamp/smoothing examples");
  ev.note(std::string("clamp/smoothing examples ") + (ok ? "exact" : "off"));
}

// ------------------------------------------------------------- Platform

void platform_suite(Evidence& ev) {
  using namespace platform;
  const auto cc = chance_corrected_score(36, 60, 6);
  const double oracle = 100.0 * (36.0 * 6 - 60) / (60.0 * 5);
  ev.require(std::abs(cc.percent - oracle) <= 1e-9 && std::abs(cc.percent - 52.0) <= 1e-9 && cc.eligible,
             "CC(36,60,6) = " + fmt("%.12g", cc.percent));
  ev.note("CC(36,60,6) = " + fmt("%.6g", cc.percent) + "% " + (cc.eligible ? "eligible" : "not eligible"));

  double worst_chance = 0.0;
  for (long long k = 2; k <= 20; ++k) worst_chance = std::max(worst_chance, chance_corrected_score(10, 10 * k, k).percent);
  ev.require(worst_chance <= 1e-9, "p = 1/k scored " + fmt("%.3g", worst_chance));
  ev.note("p=1/k max score " + fmt("%.2g", worst_chance) + "%");

  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1.0, 1.0), scale(1e-6, 1.0);
  int invariant = 0;
  for (int i = 0; i < 10000; ++i) {
    const AVPoint p{u(rng), u(rng)};
    const double c = scale(rng);
    invariant += quadrant(p) == quadrant({c * p.arousal, c * p.valence});
  }
  ev.require(invariant == 10000, "quadrant scale invariance " + std::to_string(invariant) + "/10000");
  ev.note("quadrant invariance " + std::to_string(invariant) + "/10000");

  GameState s;
  s.robot = RobotPolicy::parse("every:2");
  AttemptResult hit;
  hit.match = true;
  hit.coins = 2;
  while (!s.finished() && s.turn < 50) s = race_step(s, hit);
  const bool race = s.winner == Winner::player && s.turn == 10 && s.robot_pos == 4;
  ev.require(race, "race: winner " + std::string(to_string(s.winner)) + " on turn " + std::to_string(s.turn));
  ev.note("race won by " + std::string(to_string(s.winner)) + " on turn " + std::to_string(s.turn));

  // Recorded sessions with random results and failures replay to identical bytes.
  const auto& vocab = EmotionVocabulary::standard();
  std::uniform_int_distribution<std::size_t> pick(0, vocab.entries().size() - 1);
  std::uniform_int_distribution<int> mod(0, 2), outcome(0, 4);
  int identical = 0;
  for (int session = 0; session < 50; ++session) {
    SessionRecorder rec({rng(), 8, RobotPolicy::parse(session % 2 ? "every:3" : "random:0.4")}, vocab);
    rec.begin(12);
    rec.control("voice", "start", emotionml::StatusInfo{}, std::nullopt);
    for (int t = 1; t <= 12 && !rec.state().finished(); ++t) {
      rec.set_time(t * 1000);
      const auto& target = vocab.entries()[pick(rng)].label;
      const auto m = static_cast<Modality>(mod(rng));
      rec.turn(t, target, m, "media");
      switch (outcome(rng)) {
        case 0: rec.failure("TurnTimeout"); break;
        case 1: rec.annotation(emotionml::from_internal({u(rng), u(rng)}, m, std::nullopt, t * 1000)); break;
        default:
          rec.annotation(emotionml::from_internal(vocab.at(target).canonical, m, target, t * 1000));
          break;
      }
    }
    rec.finish();
    identical += replay(rec.text(), vocab) == rec.text();
  }
  ev.require(identical == 50, "replay identical for " + std::to_string(identical) + "/50 logs");
  ev.note("replay identical " + std::to_string(identical) + "/50");
}

// ----------------------------------------------------------- End to end

void end_to_end(Evidence& ev, const runner::DemoSet& demo) {
  auto config = runner::RuntimeConfig::load(demo.config, false);
  config.broker_port = 0;
  config.turn_timeout = 2000ms;
  const std::vector<std::string> subs{"face", "voice", "body"};
  const auto play = [&](const std::function<void(runner::LocalCluster&, int)>& hook) {
    runner::LocalCluster cluster(config, ASC_EXE, subs);
    runner::SessionOptions o;
    o.config = cluster.config();
    if (hook) o.on_turn = [&](int t) { hook(cluster, t); };
    return runner::run_session(runner::SessionScript::load(demo.session_script, o.config.vocabulary()), o);
  };

  const auto a = play({});
  const auto b = play({});
  int completed = 0;
  for (const auto& t : a.turns) completed += !t.error;
  ev.require(a.turns.size() == 6 && completed == 6, "only " + std::to_string(completed) + "/6 turns completed");
  ev.require(a.log == b.log, "logs of two seeded runs differ");
  ev.note("6-turn run " + std::to_string(completed) + "/6 completed, logs " + (a.log == b.log ? "identical" : "differ"));

  const auto killed = play([](runner::LocalCluster& c, int turn) {
    if (turn == 2) {
      c.service("body").kill(SIGKILL);
      c.service("body").wait(5s);
    }
  });
  int timeouts = 0;
  for (const auto& t : killed.turns) timeouts += t.error == std::optional<std::string>("TurnTimeout");
  bool parseable = true;
  std::string last_event;
  std::istringstream in(killed.log);
  for (std::string line; std::getline(in, line);) {
    try {
      last_event = nlohmann::json::parse(line).at("event").get<std::string>();
    } catch (const std::exception&) {
      parseable = false;
    }
  }
  ev.require(timeouts == 2, std::to_string(timeouts) + " TurnTimeout entries after killing body");
  ev.require(parseable && last_event == "summary", "log after kill not parseable or not finished");
  ev.note("body killed: " + std::to_string(timeouts) + " TurnTimeout, log " +
          (parseable && last_event == "summary" ? "complete" : "broken"));

  const double total = seconds_since(kStart);
  ev.require(total < 120.0, "whole suite took " + fmt("%.1f", total) + " s");
  ev.note("whole acceptance run " + fmt("%.1f", total) + " s of 120 s");
}

}  // namespace

int main() {
  test::TempDir dir("acceptance");
  const auto demo = runner::make_demo(dir.path(), 1);

  criterion("STOMP suite", 10.0, stomp_suite);
  criterion("EmotionML suite", 0.0, emotionml_suite);
  criterion("Voice DSP", 20.0, [&](Evidence& ev) { voice_suite(ev, demo); });
  criterion("Body", 0.0, body_suite);
  criterion("Face", 0.0, face_suite);
  criterion("Platform", 0.0, platform_suite);
  criterion("End-to-end", 0.0, [&](Evidence& ev) { end_to_end(ev, demo); });

  std::cout << (g_failed == 0 ? "all criteria pass" : std::to_string(g_failed) + " criteria fail") << '\n';
  return g_failed == 0 ? 0 : 1;
}
