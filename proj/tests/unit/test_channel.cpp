#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numeric>

#include "rfdfar/channel.hpp"
#include "rfdfar/random.hpp"

using namespace rfdfar;
using namespace rfdfar::channel;

namespace {

double mean_square(std::span<const double> x) {
  long double s = 0.0L;
  for (double v : x) s += static_cast<long double>(v) * v;
  return static_cast<double>(s / x.size());
}

// Maximal runs of samples strictly below 1.
std::size_t count_dip_runs(const std::vector<double>& env) {
  std::size_t runs = 0;
  bool in = false;
  for (double v : env) {
    if (v < 1.0 && !in) ++runs;
    in = v < 1.0;
  }
  return runs;
}

GestureEnvelopeSpec spec_for(GestureLabel g) {
  GestureEnvelopeSpec s;
  s.gesture = g;
  return s;
}

}  // namespace

TEST_CASE("synth_carrier length and shape") {
  CHECK(synth_carrier(1.0, 1e6, 1e5).size() == 1'000'000);
  const auto t = synth_carrier(0.01, 8000, 1000);
  CHECK(t.size() == 80);
  const double mean = std::accumulate(t.samples.begin(), t.samples.end(), 0.0) / t.size();
  CHECK(std::abs(mean) < 1e-6);
  CHECK(std::abs(std::sqrt(mean_square(t.samples)) - 1.0 / std::sqrt(2.0)) < 1e-6);
  CHECK_THROWS_AS(synth_carrier(1.0, 1000, 600), std::invalid_argument);
  CHECK_THROWS_AS(synth_carrier(0.0, 1000, 100), std::invalid_argument);
}

TEST_CASE("hands-down envelope is the identity") {
  const auto carrier = synth_carrier(0.05, 1e6, 1e5);
  const auto out = apply_gesture_envelope(carrier, spec_for(GestureLabel::HandsDown));
  CHECK(out.samples == carrier.samples);
  CHECK(out.meta.gesture == GestureLabel::HandsDown);
}

TEST_CASE("clapping at 2/s over 3 s has exactly 6 dips") {
  auto s = spec_for(GestureLabel::Clapping);
  s.event_rate = 2.0;
  s.event_depth = 0.5;
  s.event_duration = 0.12;
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    s.rng_seed = seed;
    s.subject_jitter = 0.1;
    const auto env = gesture_envelope(s, 3'000'000, 1e6);
    CHECK(count_dip_runs(env) == 6);
  }
}

TEST_CASE("hands-up holds its attenuation through the middle 60%") {
  auto s = spec_for(GestureLabel::HandsUp);
  s.base_attenuation = 0.5;
  const auto carrier = synth_carrier(1.0, 1e6, 1e5);
  const auto out = apply_gesture_envelope(carrier, s);
  std::span<const double> mid(out.samples.data() + 200'000, 600'000);
  std::span<const double> ref(carrier.samples.data() + 200'000, 600'000);
  const double ratio = std::sqrt(mean_square(mid) / mean_square(ref));
  CHECK(std::abs(ratio - 0.5) <= 0.5 * 0.02);
}

TEST_CASE("envelope energy ordering") {
  const auto carrier = synth_carrier(0.2, 1e6, 1e5);
  const double hd = mean_square(apply_gesture_envelope(carrier, spec_for(GestureLabel::HandsDown)).samples);
  for (double att : {0.999, 0.9, 0.5, 0.1}) {
    auto s = spec_for(GestureLabel::HandsUp);
    s.base_attenuation = att;
    CHECK(hd > mean_square(apply_gesture_envelope(carrier, s).samples));
  }
  auto s = spec_for(GestureLabel::HandsUp);
  s.base_attenuation = 1.0;
  CHECK(hd == mean_square(apply_gesture_envelope(carrier, s).samples));
}

TEST_CASE("composite envelopes sit at the base level with extra dips") {
  auto s = preset_envelope(GestureLabel::AngryDriving);
  s.rng_seed = 5;
  const auto env = gesture_envelope(s, 3'000'000, 1e6);
  const double top = *std::max_element(env.begin(), env.end());
  CHECK(top == s.base_attenuation);
  CHECK(*std::min_element(env.begin(), env.end()) < s.base_attenuation);
}

TEST_CASE("envelope spec validation") {
  auto s = spec_for(GestureLabel::Clapping);
  s.event_rate = 10;
  s.event_duration = 0.2;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = spec_for(GestureLabel::HandsUp);
  s.base_attenuation = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s.base_attenuation = 1.0;
  s.event_depth = 1.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("apply_awgn noiseless sentinel is the identity") {
  const auto carrier = synth_carrier(0.01, 1e6, 1e5);
  CHECK(apply_awgn(carrier, SnrDb::noiseless(), 1).samples == carrier.samples);
}

TEST_CASE("apply_awgn hits the target SNR") {
  const auto clean = synth_carrier(1.0, 1e6, 1e5);
  const auto noisy = apply_awgn(clean, SnrDb(42), 7);
  std::vector<double> noise(clean.size());
  for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = noisy.samples[i] - clean.samples[i];
  const double snr = 10.0 * std::log10(mean_square(clean.samples) / mean_square(noise));
  CHECK(std::abs(snr - 42.0) < 0.1);
}

TEST_CASE("property: injected noise SNR within 0.1 dB for 100k-sample traces") {
  const auto clean = synth_carrier(0.1, 1e6, 1e5);
  for (double target : {59.0, 22.0, 12.0, 0.0, -5.0}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto noisy = apply_awgn(clean, SnrDb(target), seed);
      std::vector<double> noise(clean.size());
      for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = noisy.samples[i] - clean.samples[i];
      const double snr = 10.0 * std::log10(mean_square(clean.samples) / mean_square(noise));
      REQUIRE(std::abs(snr - target) < 0.1);
    }
  }
}

TEST_CASE("apply_awgn is deterministic per seed and rejects silent traces") {
  const auto clean = synth_carrier(0.01, 1e6, 1e5);
  CHECK(apply_awgn(clean, SnrDb(3), 5).samples == apply_awgn(clean, SnrDb(3), 5).samples);
  CHECK(apply_awgn(clean, SnrDb(3), 5).samples != apply_awgn(clean, SnrDb(3), 6).samples);
  Trace zero;
  zero.sample_rate = 1000;
  zero.samples.assign(100, 0.0);
  CHECK_THROWS_AS(apply_awgn(zero, SnrDb(10), 1), std::domain_error);
}

TEST_CASE("environment_snr reproduces every measured anchor") {
  struct Row {
    Environment env;
    std::vector<std::pair<double, double>> points;
  };
  const std::vector<Row> table{
      {Environment::Cafe, {{0, 77.3}, {8, 42}, {17, 20.6}, {25, 5}}},
      {Environment::Outdoor, {{0, 60.7}, {8, 45.1}, {17, 44.9}, {25, 36.7}, {30, 37.3}}},
      {Environment::Office, {{0, 74.3}, {8, 52.1}, {17, 41.6}, {25, 30.6}}},
      {Environment::Corridor, {{0, 76.09}, {8, 49}, {17, 56.4}, {25, 25}, {30, 5}}},
      {Environment::Mall, {{0, 71.3}, {8, 46.49}, {17, 40.2}, {25, 36.51}, {30, 25.9}}},
  };
  for (const auto& row : table) {
    const auto& profile = environment_profile(row.env);
    REQUIRE(profile.anchors.size() == row.points.size());
    for (auto [d, snr] : row.points) CHECK(environment_snr(profile, d).value() == snr);
  }
}

TEST_CASE("environment_snr interpolates linearly without extrapolating") {
  const auto& cafe = environment_profile(Environment::Cafe);
  CHECK(environment_snr(cafe, 12.5).value() == doctest::Approx(31.3).epsilon(1e-12));
  CHECK(environment_snr(environment_profile(Environment::Office), 25).value() == 30.6);
  // The corridor rises between 8 m and 17 m; interpolation keeps that shape.
  CHECK(environment_snr(environment_profile(Environment::Corridor), 12.5).value() ==
        doctest::Approx(52.7).epsilon(1e-12));
  CHECK_THROWS_AS(environment_snr(cafe, -1), std::out_of_range);
  CHECK_THROWS_AS(environment_snr(cafe, 25.5), std::out_of_range);
}

TEST_CASE("environment profiles validate anchor order") {
  EnvironmentProfile p{Environment::Cafe, {{0, SnrDb(10)}}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.anchors = {{0, SnrDb(10)}, {0, SnrDb(5)}};
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK(parse_environment("mall") == Environment::Mall);
  CHECK_FALSE(parse_environment("beach"));
}

TEST_CASE("detect_envelope maps a unit tone to unit amplitude") {
  const auto tone = synth_carrier(0.001, 1e6, 1e5);
  const auto amp = detect_envelope(tone, 1e5);
  for (std::size_t i = 10; i + 10 < amp.size(); ++i) REQUIRE(std::abs(amp.samples[i] - 1.0) < 1e-9);
}

TEST_CASE("generate_dataset counts, labels and determinism") {
  std::vector<GestureEnvelopeSpec> g{preset_envelope(GestureLabel::HandsDown),
                                     preset_envelope(GestureLabel::HandsUp),
                                     preset_envelope(GestureLabel::Clapping)};
  const auto a = generate_dataset(g, 5, 0.02, SnrDb(22), 42);
  REQUIRE(a.size() == 15);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].meta.gesture == g[i / 5].gesture);
    CHECK(a[i].meta.snr_db == 22.0);
    CHECK(a[i].size() == 20'000);
  }
  const auto b = generate_dataset(g, 5, 0.02, SnrDb(22), 42);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].samples == b[i].samples);
  CHECK(a[0].samples != a[1].samples);
  CHECK_THROWS_AS(generate_dataset(g, 0, 0.02, SnrDb(22), 42), std::invalid_argument);
}

TEST_CASE("simulate_trace reuses realisations across SNR levels") {
  const auto spec = preset_envelope(GestureLabel::Clapping);
  const auto a = simulate_trace(spec, 1, 0.01, SnrDb(10), 3);
  const auto b = simulate_trace(spec, 1, 0.01, SnrDb(20), 3);
  const auto c = simulate_trace(spec, 2, 0.01, SnrDb(20), 3);
  CHECK(a.samples != b.samples);
  CHECK(b.samples != c.samples);
  CHECK(a.meta.seed == 3u);
}

TEST_CASE("subject_variant scales parameters within the spread") {
  const auto base = preset_envelope(GestureLabel::AngryDriving);
  CHECK(subject_variant(base, 2, 42, 0.0).event_rate == base.event_rate);
  for (int s = 0; s < 20; ++s) {
    const auto v = subject_variant(base, s, 42, 0.15);
    const double depth_ratio = (1.0 - v.base_attenuation) / (1.0 - base.base_attenuation);
    CHECK(depth_ratio >= 0.85 - 1e-12);
    CHECK(depth_ratio <= 1.15 + 1e-12);
    CHECK(v.event_rate / base.event_rate >= 0.85 - 1e-12);
    CHECK(v.event_rate / base.event_rate <= 1.15 + 1e-12);
    CHECK(v.event_depth == subject_variant(base, s, 42, 0.15).event_depth);
  }
  CHECK(subject_variant(base, 0, 42).event_depth != subject_variant(base, 1, 42).event_depth);
}

TEST_CASE("scale_footprint scales attenuation depths") {
  auto s = preset_envelope(GestureLabel::AngryConversation);
  const auto half = scale_footprint(s, 0.5);
  CHECK(1.0 - half.base_attenuation == doctest::Approx(0.5 * (1.0 - s.base_attenuation)));
  CHECK(half.event_depth == doctest::Approx(0.5 * s.event_depth));
  CHECK_THROWS_AS(scale_footprint(s, -1), std::invalid_argument);
}

TEST_CASE("derived seeds depend on every input") {
  CHECK(derive_seed(1, "a", 0) == derive_seed(1, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(2, "a", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "b", 0));
  CHECK(derive_seed(1, "a", 0) != derive_seed(1, "a", 1));
}
