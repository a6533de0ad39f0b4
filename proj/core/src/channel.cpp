#include "rfdfar/channel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rfdfar/random.hpp"

namespace rfdfar::channel {
namespace {

constexpr double kHandsUpRampFraction = 0.2;

bool in_unit_open_closed(double v) { return v > 0.0 && v <= 1.0; }

std::vector<SnrAnchor> anchors(std::initializer_list<std::pair<double, double>> rows) {
  std::vector<SnrAnchor> out;
  for (auto [d, s] : rows) out.push_back({d, SnrDb(s)});
  return out;
}

double jittered(double value, double rel_std, Rng& rng) {
  if (rel_std <= 0.0) return value;
  std::normal_distribution<double> n(0.0, rel_std);
  return value * std::max(0.0, 1.0 + n(rng));
}

double raised_cosine(double phase) {  // phase in [0,1] -> 0..1..0
  return 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * phase));
}

std::size_t event_count(const GestureEnvelopeSpec& spec, double duration_s) {
  return static_cast<std::size_t>(std::llround(spec.event_rate * duration_s));
}

void hands_up(std::vector<double>& env, const GestureEnvelopeSpec& spec, Rng& rng) {
  const double depth =
      std::clamp(jittered(1.0 - spec.base_attenuation, spec.subject_jitter, rng), 0.0, 1.0);
  const double n = static_cast<double>(env.size());
  for (std::size_t i = 0; i < env.size(); ++i) {
    double pos = (static_cast<double>(i) + 0.5) / n;
    double w = std::min({pos / kHandsUpRampFraction, (1.0 - pos) / kHandsUpRampFraction, 1.0});
    double shape = 0.5 - 0.5 * std::cos(std::numbers::pi * w);
    env[i] = 1.0 - depth * shape;
  }
}

void clapping(std::vector<double>& env, const GestureEnvelopeSpec& spec, double fs, Rng& rng) {
  const double duration = static_cast<double>(env.size()) / fs;
  const std::size_t count = event_count(spec, duration);
  if (count == 0) return;
  const double slot = duration / static_cast<double>(count);
  for (std::size_t e = 0; e < count; ++e) {
    double width = std::clamp(jittered(spec.event_duration, spec.subject_jitter, rng),
                              1.0 / fs, slot);
    double depth = std::clamp(jittered(spec.event_depth, spec.subject_jitter, rng), 0.0, 0.99);
    double start = static_cast<double>(e) * slot + (slot - width) * uniform01(rng);
    auto first = static_cast<std::size_t>(std::llround(start * fs));
    auto last = std::min(env.size(), static_cast<std::size_t>(std::llround((start + width) * fs)));
    // Keep one untouched sample between neighbouring dips.
    if (e + 1 < count) {
      last = std::min(last, static_cast<std::size_t>(std::llround((e + 1) * slot * fs)) - 1);
    }
    for (std::size_t i = first; i < last; ++i) env[i] = 1.0 - depth;
  }
}

void composite(std::vector<double>& env, const GestureEnvelopeSpec& spec, double fs, Rng& rng) {
  const double duration = static_cast<double>(env.size()) / fs;
  std::fill(env.begin(), env.end(), spec.base_attenuation);
  const std::size_t count = event_count(spec, duration);
  for (std::size_t e = 0; e < count; ++e) {
    double width = std::clamp(jittered(spec.event_duration, spec.subject_jitter, rng),
                              2.0 / fs, duration);
    double depth = std::clamp(jittered(spec.event_depth, spec.subject_jitter, rng), 0.0, 0.99);
    double start = (duration - width) * uniform01(rng);
    auto first = static_cast<std::size_t>(std::llround(start * fs));
    auto len = static_cast<std::size_t>(std::llround(width * fs));
    for (std::size_t k = 0; k < len && first + k < env.size(); ++k) {
      double phase = static_cast<double>(k) / static_cast<double>(len);
      env[first + k] *= 1.0 - depth * raised_cosine(phase);
    }
  }
}

}  // namespace

void GestureEnvelopeSpec::validate() const {
  if (!in_unit_open_closed(base_attenuation)) {
    throw std::invalid_argument("envelope: base_attenuation must be in (0, 1]");
  }
  if (!(event_rate >= 0.0) || !std::isfinite(event_rate)) {
    throw std::invalid_argument("envelope: event_rate must be >= 0");
  }
  if (!(event_depth >= 0.0 && event_depth < 1.0)) {
    throw std::invalid_argument("envelope: event_depth must be in [0, 1)");
  }
  if (!(event_duration > 0.0) || !std::isfinite(event_duration)) {
    throw std::invalid_argument("envelope: event_duration must be > 0");
  }
  if (!(subject_jitter >= 0.0) || !std::isfinite(subject_jitter)) {
    throw std::invalid_argument("envelope: subject_jitter must be >= 0");
  }
  if (event_duration * event_rate > 1.0 + 1e-12) {
    throw std::invalid_argument("envelope: event_duration * event_rate must be <= 1");
  }
}

std::string_view to_string(Environment e) noexcept {
  switch (e) {
    case Environment::Cafe: return "cafe";
    case Environment::Outdoor: return "outdoor";
    case Environment::Office: return "office";
    case Environment::Corridor: return "corridor";
    case Environment::Mall: return "mall";
  }
  return "unknown";
}

std::optional<Environment> parse_environment(std::string_view name) noexcept {
  for (auto e : {Environment::Cafe, Environment::Outdoor, Environment::Office,
                 Environment::Corridor, Environment::Mall}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

void EnvironmentProfile::validate() const {
  if (anchors.size() < 2) throw std::invalid_argument("environment profile: need >= 2 anchors");
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    if (!(anchors[i].distance_m >= 0.0)) {
      throw std::invalid_argument("environment profile: negative distance");
    }
    if (i > 0 && !(anchors[i].distance_m > anchors[i - 1].distance_m)) {
      throw std::invalid_argument("environment profile: distances must strictly increase");
    }
  }
}

const EnvironmentProfile& environment_profile(Environment e) {
  static const std::array<EnvironmentProfile, 5> profiles{{
      {Environment::Cafe, anchors({{0, 77.3}, {8, 42}, {17, 20.6}, {25, 5}})},
      {Environment::Outdoor, anchors({{0, 60.7}, {8, 45.1}, {17, 44.9}, {25, 36.7}, {30, 37.3}})},
      {Environment::Office, anchors({{0, 74.3}, {8, 52.1}, {17, 41.6}, {25, 30.6}})},
      {Environment::Corridor, anchors({{0, 76.09}, {8, 49}, {17, 56.4}, {25, 25}, {30, 5}})},
      {Environment::Mall, anchors({{0, 71.3}, {8, 46.49}, {17, 40.2}, {25, 36.51}, {30, 25.9}})},
  }};
  return profiles.at(static_cast<std::size_t>(e));
}

Trace synth_carrier(double duration_s, double sample_rate_hz, double tone_hz) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("synth_carrier: duration must be > 0");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("synth_carrier: sample rate must be > 0");
  if (!(tone_hz > 0.0 && tone_hz < sample_rate_hz / 2.0)) {
    throw std::invalid_argument("synth_carrier: tone must lie in (0, sample_rate/2)");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  if (n == 0) throw std::invalid_argument("synth_carrier: duration shorter than one sample");

  Trace t;
  t.sample_rate = sample_rate_hz;
  t.samples.resize(n);
  const double step = 2.0 * std::numbers::pi * tone_hz / sample_rate_hz;
  for (std::size_t i = 0; i < n; ++i) t.samples[i] = std::sin(step * static_cast<double>(i));
  return t;
}

std::vector<double> gesture_envelope(const GestureEnvelopeSpec& spec, std::size_t n,
                                     double sample_rate_hz) {
  spec.validate();
  std::vector<double> env(n, 1.0);
  Rng rng(spec.rng_seed);
  switch (spec.gesture) {
    case GestureLabel::HandsDown:
      break;
    case GestureLabel::HandsUp:
      hands_up(env, spec, rng);
      break;
    case GestureLabel::Clapping:
      clapping(env, spec, sample_rate_hz, rng);
      break;
    case GestureLabel::NeutralDriving:
    case GestureLabel::AngryDriving:
    case GestureLabel::NeutralConversation:
    case GestureLabel::AngryConversation:
      composite(env, spec, sample_rate_hz, rng);
      break;
  }
  return env;
}

Trace apply_gesture_envelope(const Trace& carrier, const GestureEnvelopeSpec& spec) {
  carrier.validate();
  Trace out = carrier;
  out.meta.gesture = spec.gesture;
  if (spec.gesture == GestureLabel::HandsDown) {
    spec.validate();
    return out;
  }
  auto env = gesture_envelope(spec, carrier.size(), carrier.sample_rate);
  for (std::size_t i = 0; i < env.size(); ++i) out.samples[i] *= env[i];
  return out;
}

Trace apply_awgn(const Trace& clean, SnrDb target, std::uint64_t seed) {
  clean.validate();
  Trace out = clean;
  out.meta.snr_db = target.value();
  if (target.is_noiseless()) return out;

  long double acc = 0.0L;
  for (double s : clean.samples) acc += static_cast<long double>(s) * s;
  const double power = static_cast<double>(acc / clean.samples.size());
  if (!(power > 0.0)) throw std::domain_error("apply_awgn: clean trace has zero power");

  const double variance = noise_mw_for_target_snr(PowerMw(power), target).value();
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, std::sqrt(variance));
  for (double& s : out.samples) s += noise(rng);
  return out;
}

SnrDb environment_snr(const EnvironmentProfile& profile, double distance_m) {
  profile.validate();
  const auto& a = profile.anchors;
  if (!(distance_m >= a.front().distance_m && distance_m <= a.back().distance_m)) {
    throw std::out_of_range("environment_snr: distance " + std::to_string(distance_m) +
                            " m outside [" + std::to_string(a.front().distance_m) + ", " +
                            std::to_string(a.back().distance_m) + "] for " +
                            std::string(to_string(profile.name)));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (distance_m == a[i].distance_m) return a[i].snr;
  }
  auto hi = std::upper_bound(a.begin(), a.end(), distance_m,
                             [](double d, const SnrAnchor& s) { return d < s.distance_m; });
  auto lo = hi - 1;
  double f = (distance_m - lo->distance_m) / (hi->distance_m - lo->distance_m);
  return SnrDb(lo->snr.value() + f * (hi->snr.value() - lo->snr.value()));
}

Trace detect_envelope(const Trace& received, double tone_hz) {
  received.validate();
  if (!(tone_hz > 0.0)) throw std::invalid_argument("detect_envelope: tone must be > 0");
  const auto period = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(received.sample_rate / tone_hz)));
  const auto& x = received.samples;
  const std::size_t n = received.size();
  const std::size_t left = (period - 1) / 2;
  const std::size_t right = period / 2;

  Trace out;
  out.sample_rate = received.sample_rate;
  out.meta = received.meta;
  out.samples.resize(n);
  // Running sum of squares over [lo, hi).
  long double power = 0.0L;
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t want_lo = i >= left ? i - left : 0;
    const std::size_t want_hi = std::min(n, i + right + 1);
    for (; hi < want_hi; ++hi) power += static_cast<long double>(x[hi]) * x[hi];
    for (; lo < want_lo; ++lo) power -= static_cast<long double>(x[lo]) * x[lo];
    const long double mean = power / static_cast<long double>(hi - lo);
    out.samples[i] = std::sqrt(2.0 * static_cast<double>(std::max(0.0L, mean)));
  }
  return out;
}

GestureEnvelopeSpec preset_envelope(GestureLabel g) {
  GestureEnvelopeSpec s;
  s.gesture = g;
  switch (g) {
    case GestureLabel::HandsDown:
      break;
    case GestureLabel::HandsUp:
      s.base_attenuation = 0.999;
      s.subject_jitter = 0.05;
      break;
    case GestureLabel::Clapping:
      s.event_rate = 3.0;
      s.event_depth = 0.006;
      s.event_duration = 0.12;
      s.subject_jitter = 0.05;
      break;
    case GestureLabel::NeutralDriving:
      s.base_attenuation = 0.996;
      s.event_rate = 0.5;
      s.event_depth = 0.004;
      s.event_duration = 0.3;
      s.subject_jitter = 0.1;
      break;
    case GestureLabel::AngryDriving:
      s.base_attenuation = 0.995;
      s.event_rate = 1.5;
      s.event_depth = 0.008;
      s.event_duration = 0.3;
      s.subject_jitter = 0.1;
      break;
    case GestureLabel::NeutralConversation:
      s.base_attenuation = 0.996;
      s.event_rate = 0.5;
      s.event_depth = 0.004;
      s.event_duration = 0.4;
      s.subject_jitter = 0.15;
      break;
    case GestureLabel::AngryConversation:
      s.base_attenuation = 0.995;
      s.event_rate = 1.5;
      s.event_depth = 0.008;
      s.event_duration = 0.3;
      s.subject_jitter = 0.15;
      break;
  }
  return s;
}

GestureEnvelopeSpec countable_clap_preset() {
  GestureEnvelopeSpec s;
  s.gesture = GestureLabel::Clapping;
  s.event_rate = 2.0;
  s.event_depth = 0.54;
  s.event_duration = 0.12;
  s.subject_jitter = 0.02;
  return s;
}

GestureEnvelopeSpec subject_variant(GestureEnvelopeSpec spec, int subject, std::uint64_t seed,
                                    double spread) {
  if (!(spread >= 0.0 && spread < 1.0)) {
    throw std::invalid_argument("subject_variant: spread must be in [0, 1)");
  }
  Rng rng(derive_seed(seed, "subject", static_cast<std::uint64_t>(subject)));
  auto factor = [&] { return 1.0 - spread + 2.0 * spread * uniform01(rng); };
  const double depth = std::min(1.0 - spec.base_attenuation, 1.0) * factor();
  spec.base_attenuation = std::clamp(1.0 - depth, 1e-6, 1.0);
  spec.event_rate *= factor();
  spec.event_depth = std::clamp(spec.event_depth * factor(), 0.0, 0.99);
  spec.event_duration *= factor();
  if (spec.event_rate > 0.0) {
    spec.event_duration = std::min(spec.event_duration, 1.0 / spec.event_rate);
  }
  return spec;
}

GestureEnvelopeSpec scale_footprint(GestureEnvelopeSpec spec, double scale) {
  if (!(scale >= 0.0)) throw std::invalid_argument("scale_footprint: scale must be >= 0");
  spec.base_attenuation = std::clamp(1.0 - (1.0 - spec.base_attenuation) * scale, 1e-6, 1.0);
  spec.event_depth = std::clamp(spec.event_depth * scale, 0.0, 0.99);
  return spec;
}

Trace simulate_trace(const GestureEnvelopeSpec& spec, int repetition, double duration_s,
                     SnrDb snr, std::uint64_t seed, const ChannelConfig& config) {
  if (repetition < 0) throw std::invalid_argument("simulate_trace: repetition must be >= 0");
  std::string key = std::string(to_string(spec.gesture)) + "/" +
                    std::to_string(config.subject.value_or(-1));
  GestureEnvelopeSpec shaped = spec;
  shaped.rng_seed = derive_seed(seed, "envelope/" + key, static_cast<std::uint64_t>(repetition));
  const std::uint64_t noise_seed =
      derive_seed(seed, "noise/" + key, static_cast<std::uint64_t>(repetition));

  Trace t = synth_carrier(duration_s, config.sample_rate_hz, config.tone_hz);
  t = apply_gesture_envelope(t, shaped);
  t = apply_awgn(t, snr, noise_seed);
  if (config.envelope_detection) t = detect_envelope(t, config.tone_hz);
  t.meta.gesture = spec.gesture;
  t.meta.subject = config.subject;
  t.meta.distance_m = config.distance_m;
  t.meta.snr_db = snr.value();
  t.meta.seed = seed;
  return t;
}

std::vector<Trace> generate_dataset(std::span<const GestureEnvelopeSpec> gestures,
                                    int repetitions, double duration_s, SnrDb snr,
                                    std::uint64_t seed, const ChannelConfig& config) {
  if (repetitions < 1) throw std::invalid_argument("generate_dataset: repetitions must be >= 1");
  std::vector<Trace> out;
  out.reserve(gestures.size() * static_cast<std::size_t>(repetitions));
  for (const auto& g : gestures) {
    g.validate();
    for (int r = 0; r < repetitions; ++r) {
      out.push_back(simulate_trace(g, r, duration_s, snr, seed, config));
    }
  }
  return out;
}

}  // namespace rfdfar::channel
