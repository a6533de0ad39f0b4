#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfdfar {

enum class GestureLabel {
  HandsDown,
  HandsUp,
  Clapping,
  NeutralDriving,
  AngryDriving,
  NeutralConversation,
  AngryConversation,
};

/// Canonical lowercase name ("hands_down", "clapping", ...).
std::string_view to_string(GestureLabel g) noexcept;
std::optional<GestureLabel> parse_gesture(std::string_view name) noexcept;
std::span<const GestureLabel> all_gestures() noexcept;

struct TraceMeta {
  std::optional<GestureLabel> gesture;
  std::optional<int> subject;
  std::optional<double> snr_db;  // +inf for noiseless traces
  std::optional<double> distance_m;
  std::optional<std::uint64_t> seed;
};

/// Uniformly sampled real amplitude signal.
struct Trace {
  std::vector<double> samples;
  double sample_rate = 1.0;  // Hz
  TraceMeta meta;

  std::size_t size() const noexcept { return samples.size(); }
  double duration() const noexcept { return static_cast<double>(samples.size()) / sample_rate; }

  /// Throws std::invalid_argument unless sample_rate > 0, samples are
  /// non-empty and every sample is finite.
  void validate() const;
};

/// Subject identifier as written to feature tables ("s3").
std::string subject_id(int subject);

}  // namespace rfdfar
