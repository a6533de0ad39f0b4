#pragma once

// Software replacement for the transmitter/receiver pair: a baseband tone,
// gesture-shaped amplitude envelopes, AWGN at an exact SNR and an RSS-style
// envelope detector at the receiver.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rfdfar/trace.hpp"
#include "rfdfar/units.hpp"

namespace rfdfar::channel {

/// How a gesture shapes the received amplitude.
///
/// HandsDown is the identity envelope. HandsUp ramps (raised cosine) to
/// `base_attenuation` over the first 20% of the trace, holds it through the
/// middle 60% and ramps back. Clapping places round(event_rate * T)
/// rectangular dips of `event_depth` and `event_duration`, one per equal
/// slot at a seeded position. Driving and conversation labels hold
/// `base_attenuation` for the whole trace and add round(event_rate * T)
/// raised-cosine dips at seeded positions.
///
/// `subject_jitter` is the relative standard deviation applied per trace (to
/// the HandsUp depth) or per event (to depth and width).
struct GestureEnvelopeSpec {
  GestureLabel gesture = GestureLabel::HandsDown;
  double base_attenuation = 1.0;  // (0, 1]
  double event_rate = 0.0;        // events per second
  double event_depth = 0.0;       // [0, 1)
  double event_duration = 0.1;    // seconds
  double subject_jitter = 0.0;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

enum class Environment { Cafe, Outdoor, Office, Corridor, Mall };

std::string_view to_string(Environment e) noexcept;
std::optional<Environment> parse_environment(std::string_view name) noexcept;

struct SnrAnchor {
  double distance_m;
  SnrDb snr;
};

struct EnvironmentProfile {
  Environment name;
  std::vector<SnrAnchor> anchors;  // strictly increasing distance

  void validate() const;
};

/// Measured average SNR against distance for the five surveyed environments.
const EnvironmentProfile& environment_profile(Environment e);

/// Unit-amplitude sine, round(duration * sample_rate) samples.
Trace synth_carrier(double duration_s, double sample_rate_hz, double tone_hz);

/// Envelope samples for a trace of `n` samples. Exposed for inspection and
/// tests; apply_gesture_envelope multiplies it onto a carrier.
std::vector<double> gesture_envelope(const GestureEnvelopeSpec& spec, std::size_t n,
                                     double sample_rate_hz);

Trace apply_gesture_envelope(const Trace& carrier, const GestureEnvelopeSpec& spec);

/// Adds zero-mean Gaussian noise with variance mean(clean^2) / 10^(snr/10).
Trace apply_awgn(const Trace& clean, SnrDb target, std::uint64_t seed);

/// Piecewise-linear interpolation of the profile; exact at anchors, no
/// extrapolation.
SnrDb environment_snr(const EnvironmentProfile& profile, double distance_m);

/// RSS-style receiver amplitude: sqrt(2 * local mean power) over one tone
/// period, centred, with shrinking windows at the edges. A unit tone maps to
/// 1.0; noise power shows up as a floor under the envelope.
Trace detect_envelope(const Trace& received, double tone_hz);

/// Calibrated default envelope for each gesture.
GestureEnvelopeSpec preset_envelope(GestureLabel g);

/// Clap preset for the event-counting check: dips to 0.46 of the baseline
/// amplitude, just under the half-RMS detector threshold.
GestureEnvelopeSpec countable_clap_preset();

/// Per-subject variant: scales attenuation depth (1 - base_attenuation),
/// event rate, depth and duration by independent factors in
/// [1 - spread, 1 + spread] drawn from derive_seed(seed, "subject", subject).
GestureEnvelopeSpec subject_variant(GestureEnvelopeSpec spec, int subject, std::uint64_t seed,
                                    double spread = 0.15);

/// Multiplies every attenuation depth in the spec by `scale`.
GestureEnvelopeSpec scale_footprint(GestureEnvelopeSpec spec, double scale);

struct ChannelConfig {
  double sample_rate_hz = 1.0e6;
  double tone_hz = 1.0e5;
  bool envelope_detection = true;  // false: return the raw received tone
  std::optional<int> subject;
  std::optional<double> distance_m;
};

/// One labelled received trace. Envelope and noise seeds are derived from
/// `seed` keyed by (gesture, subject, repetition) only, so the same cell
/// sees the same realisation at every SNR.
Trace simulate_trace(const GestureEnvelopeSpec& spec, int repetition, double duration_s,
                     SnrDb snr, std::uint64_t seed, const ChannelConfig& config = {});

/// repetitions x gestures traces, gesture-major.
std::vector<Trace> generate_dataset(std::span<const GestureEnvelopeSpec> gestures,
                                    int repetitions, double duration_s, SnrDb snr,
                                    std::uint64_t seed, const ChannelConfig& config = {});

}  // namespace rfdfar::channel
