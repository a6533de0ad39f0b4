#pragma once

// Gesture to emotion mapping and sustained-emotion alerting.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfdfar/trace.hpp"

namespace rfdfar::emotion {

enum class EmotionLabel { Neutral, Anger, Fear, Happy, Sad };

std::string_view to_string(EmotionLabel e) noexcept;
std::optional<EmotionLabel> parse_emotion(std::string_view name) noexcept;

EmotionLabel map_gesture(GestureLabel g) noexcept;

/// Accepts an emotion name or a gesture name (mapped through map_gesture).
std::optional<EmotionLabel> parse_emotion_or_gesture(std::string_view name) noexcept;

struct StreamEntry {
  double timestamp = 0.0;  // seconds, start of the window
  EmotionLabel emotion = EmotionLabel::Neutral;
};

struct EmotionStream {
  std::vector<StreamEntry> entries;
  double window_period = 0.1;

  /// Timestamps strictly increasing with uniform spacing `window_period`
  /// (relative tolerance 1e-6). Throws std::invalid_argument otherwise.
  void validate() const;

  /// Uniformly spaced stream starting at `t0`.
  static EmotionStream from_labels(const std::vector<EmotionLabel>& labels, double period,
                                   double t0 = 0.0);
};

struct AlertPolicy {
  double sustain_threshold = 300.0;  // s
  int episode_count_threshold = 3;   // qualifying runs per hour
  double gap_tolerance = 10.0;       // s
  double episode_span = 3600.0;      // s

  void validate() const;
};

enum class AlertKind { Sustained, Repeated };

std::string_view to_string(AlertKind k) noexcept;

struct Alert {
  double start = 0.0;
  double end = 0.0;
  EmotionLabel emotion = EmotionLabel::Neutral;
  AlertKind kind = AlertKind::Sustained;

  friend bool operator==(const Alert&, const Alert&) = default;
};

/// A maximal run of one emotion, bridging interruptions up to the gap tolerance.
struct EmotionRun {
  std::size_t first = 0;  // entry indices
  std::size_t last = 0;
  double start = 0.0;
  double end = 0.0;
  EmotionLabel emotion = EmotionLabel::Neutral;

  double duration() const noexcept { return end - start; }
};

/// Runs of every non-neutral emotion, ordered by start.
std::vector<EmotionRun> find_runs(const EmotionStream& stream, double gap_tolerance);

/// Sustained alerts for runs lasting at least the sustain threshold, plus one
/// repeated alert per greedy group of qualifying runs whose starts fit in one
/// episode span. Sorted by (start, emotion, kind).
std::vector<Alert> aggregate(const EmotionStream& stream, const AlertPolicy& policy = {});

/// CSV with header `time_s,<label column>`; the label column may be named
/// emotion, predicted or label and hold emotion or gesture names. Without a
/// time column, timestamps are row * period.
EmotionStream read_stream_csv(std::istream& in, double period);
void write_stream_csv(std::ostream& out, const EmotionStream& stream);

/// Header `start_s,end_s,emotion,kind`.
void write_alerts_csv(std::ostream& out, const std::vector<Alert>& alerts);
std::vector<Alert> read_alerts_csv(std::istream& in);
std::string format_alert(const Alert& a);

}  // namespace rfdfar::emotion
