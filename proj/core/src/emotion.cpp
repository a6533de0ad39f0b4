#include "rfdfar/emotion.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <tuple>

#include "rfdfar/text.hpp"

namespace rfdfar::emotion {
namespace {

constexpr std::array kEmotions{EmotionLabel::Neutral, EmotionLabel::Anger, EmotionLabel::Fear,
                               EmotionLabel::Happy, EmotionLabel::Sad};

std::string format_seconds(double s) {
  const auto total = static_cast<long long>(std::floor(s));
  const long long h = total / 3600;
  const long long m = (total % 3600) / 60;
  const double sec = s - static_cast<double>(h * 3600 + m * 60);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld:%04.1f", h, m, sec);
  return buf;
}

}  // namespace

std::string_view to_string(EmotionLabel e) noexcept {
  switch (e) {
    case EmotionLabel::Neutral: return "neutral";
    case EmotionLabel::Anger: return "anger";
    case EmotionLabel::Fear: return "fear";
    case EmotionLabel::Happy: return "happy";
    case EmotionLabel::Sad: return "sad";
  }
  return "unknown";
}

std::optional<EmotionLabel> parse_emotion(std::string_view name) noexcept {
  for (auto e : kEmotions) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

EmotionLabel map_gesture(GestureLabel g) noexcept {
  switch (g) {
    case GestureLabel::HandsUp: return EmotionLabel::Fear;
    case GestureLabel::Clapping: return EmotionLabel::Happy;
    case GestureLabel::AngryDriving:
    case GestureLabel::AngryConversation: return EmotionLabel::Anger;
    case GestureLabel::HandsDown:
    case GestureLabel::NeutralDriving:
    case GestureLabel::NeutralConversation: return EmotionLabel::Neutral;
  }
  return EmotionLabel::Neutral;
}

std::optional<EmotionLabel> parse_emotion_or_gesture(std::string_view name) noexcept {
  if (auto e = parse_emotion(name)) return e;
  if (auto g = parse_gesture(name)) return map_gesture(*g);
  return std::nullopt;
}

void EmotionStream::validate() const {
  if (!(window_period > 0.0) || !std::isfinite(window_period)) {
    throw std::invalid_argument("emotion stream: window period must be positive");
  }
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!std::isfinite(entries[i].timestamp)) {
      throw std::invalid_argument("emotion stream: non-finite timestamp");
    }
    if (i == 0) continue;
    const double dt = entries[i].timestamp - entries[i - 1].timestamp;
    if (!(dt > 0.0)) throw std::invalid_argument("emotion stream: timestamps must increase");
    if (std::abs(dt - window_period) > 1e-6 * window_period + 1e-9) {
      throw std::invalid_argument("emotion stream: non-uniform spacing at entry " +
                                  std::to_string(i));
    }
  }
}

EmotionStream EmotionStream::from_labels(const std::vector<EmotionLabel>& labels, double period,
                                         double t0) {
  EmotionStream s;
  s.window_period = period;
  s.entries.reserve(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    s.entries.push_back({t0 + static_cast<double>(i) * period, labels[i]});
  }
  return s;
}

void AlertPolicy::validate() const {
  if (!(sustain_threshold > 0.0) || episode_count_threshold < 1 || !(gap_tolerance > 0.0) ||
      !(episode_span > 0.0)) {
    throw std::invalid_argument("alert policy: all thresholds must be positive");
  }
}

std::string_view to_string(AlertKind k) noexcept {
  return k == AlertKind::Sustained ? "sustained" : "repeated";
}

std::vector<EmotionRun> find_runs(const EmotionStream& stream, double gap_tolerance) {
  stream.validate();
  const auto& e = stream.entries;
  const double period = stream.window_period;
  // Durations come from index differences so they do not depend on the time origin.
  const double tol = gap_tolerance + 1e-9 * period;
  std::vector<EmotionRun> runs;
  for (auto label : kEmotions) {
    if (label == EmotionLabel::Neutral) continue;
    std::optional<EmotionRun> open;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i].emotion != label) continue;
      if (open && static_cast<double>(i - open->last - 1) * period <= tol) {
        open->last = i;
        continue;
      }
      if (open) runs.push_back(*open);
      open = EmotionRun{i, i, 0.0, 0.0, label};
    }
    if (open) runs.push_back(*open);
  }
  for (auto& r : runs) {
    r.start = e[r.first].timestamp;
    r.end = r.start + static_cast<double>(r.last - r.first + 1) * period;
  }
  std::sort(runs.begin(), runs.end(), [](const EmotionRun& a, const EmotionRun& b) {
    return std::tie(a.first, a.emotion) < std::tie(b.first, b.emotion);
  });
  return runs;
}

std::vector<Alert> aggregate(const EmotionStream& stream, const AlertPolicy& policy) {
  policy.validate();
  const auto runs = find_runs(stream, policy.gap_tolerance);
  const double period = stream.window_period;
  const double eps = 1e-9 * period;
  std::vector<Alert> alerts;
  for (auto label : kEmotions) {
    if (label == EmotionLabel::Neutral) continue;
    std::vector<EmotionRun> qualifying;
    for (const auto& r : runs) {
      const double dur = static_cast<double>(r.last - r.first + 1) * period;
      if (r.emotion == label && dur + eps >= policy.sustain_threshold) qualifying.push_back(r);
    }
    for (const auto& r : qualifying) alerts.push_back({r.start, r.end, label, AlertKind::Sustained});

    const auto need = static_cast<std::size_t>(policy.episode_count_threshold);
    std::size_t i = 0;
    while (i < qualifying.size()) {
      std::size_t j = i;
      while (j + 1 < qualifying.size() &&
             static_cast<double>(qualifying[j + 1].first - qualifying[i].first) * period <
                 policy.episode_span - eps) {
        ++j;
      }
      if (j - i + 1 >= need) {
        alerts.push_back({qualifying[i].start, qualifying[j].end, label, AlertKind::Repeated});
        i = j + 1;
      } else {
        ++i;
      }
    }
  }
  std::sort(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
    return std::tie(a.start, a.emotion, a.kind) < std::tie(b.start, b.emotion, b.kind);
  });
  return alerts;
}

EmotionStream read_stream_csv(std::istream& in, double period) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("stream csv: missing header");
  auto header = text::split(text::trim(line), ',');
  std::optional<std::size_t> time_col, label_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto name = text::trim(header[c]);
    if (name == "time_s") time_col = c;
    if (name == "emotion" || name == "predicted" || (name == "label" && !label_col)) label_col = c;
  }
  if (!label_col) {
    throw std::invalid_argument("stream csv: need an emotion, predicted or label column");
  }
  EmotionStream s;
  s.window_period = period;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto fields = text::split(text::trim(line), ',');
    if (fields.size() != header.size()) {
      throw std::invalid_argument("stream csv: row " + std::to_string(row + 1) +
                                  " has the wrong field count");
    }
    auto name = text::trim(fields[*label_col]);
    auto e = parse_emotion_or_gesture(name);
    if (!e) throw std::invalid_argument("stream csv: unknown label '" + std::string(name) + "'");
    const double t = time_col ? text::parse_double(fields[*time_col])
                              : static_cast<double>(row) * period;
    s.entries.push_back({t, *e});
    ++row;
  }
  s.validate();
  return s;
}

void write_stream_csv(std::ostream& out, const EmotionStream& stream) {
  out << "time_s,emotion\n";
  for (const auto& e : stream.entries) {
    out << text::format_double(e.timestamp) << ',' << to_string(e.emotion) << '\n';
  }
}

void write_alerts_csv(std::ostream& out, const std::vector<Alert>& alerts) {
  out << "start_s,end_s,emotion,kind\n";
  for (const auto& a : alerts) {
    out << text::format_double(a.start) << ',' << text::format_double(a.end) << ','
        << to_string(a.emotion) << ',' << to_string(a.kind) << '\n';
  }
  if (!out) throw std::runtime_error("alerts csv: write failed");
}

std::vector<Alert> read_alerts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "start_s,end_s,emotion,kind") {
    throw std::invalid_argument("alerts csv: bad header");
  }
  std::vector<Alert> out;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(text::trim(line), ',');
    if (f.size() != 4) throw std::invalid_argument("alerts csv: expected 4 fields");
    auto e = parse_emotion(f[2]);
    if (!e) throw std::invalid_argument("alerts csv: unknown emotion");
    AlertKind kind;
    if (f[3] == "sustained") {
      kind = AlertKind::Sustained;
    } else if (f[3] == "repeated") {
      kind = AlertKind::Repeated;
    } else {
      throw std::invalid_argument("alerts csv: unknown kind");
    }
    out.push_back({text::parse_double(f[0]), text::parse_double(f[1]), *e, kind});
  }
  return out;
}

std::string format_alert(const Alert& a) {
  std::string s = "ALERT ";
  s += a.kind == AlertKind::Sustained ? "sustained " : "repeated ";
  s += to_string(a.emotion);
  s += " from " + format_seconds(a.start) + " to " + format_seconds(a.end);
  s += " (" + text::format_double(std::round((a.end - a.start) * 10.0) / 10.0) + " s)";
  return s;
}

}  // namespace rfdfar::emotion
