#include "rfdfar/trace.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace rfdfar {
namespace {

constexpr std::array kGestures{
    GestureLabel::HandsDown,          GestureLabel::HandsUp,
    GestureLabel::Clapping,           GestureLabel::NeutralDriving,
    GestureLabel::AngryDriving,       GestureLabel::NeutralConversation,
    GestureLabel::AngryConversation,
};

}  // namespace

std::string_view to_string(GestureLabel g) noexcept {
  switch (g) {
    case GestureLabel::HandsDown: return "hands_down";
    case GestureLabel::HandsUp: return "hands_up";
    case GestureLabel::Clapping: return "clapping";
    case GestureLabel::NeutralDriving: return "neutral_driving";
    case GestureLabel::AngryDriving: return "angry_driving";
    case GestureLabel::NeutralConversation: return "neutral_conversation";
    case GestureLabel::AngryConversation: return "angry_conversation";
  }
  return "unknown";
}

std::optional<GestureLabel> parse_gesture(std::string_view name) noexcept {
  for (GestureLabel g : kGestures) {
    if (to_string(g) == name) return g;
  }
  return std::nullopt;
}

std::span<const GestureLabel> all_gestures() noexcept { return kGestures; }

void Trace::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw std::invalid_argument("trace: sample_rate must be positive");
  }
  if (samples.empty()) throw std::invalid_argument("trace: no samples");
  for (double s : samples) {
    if (!std::isfinite(s)) throw std::invalid_argument("trace: non-finite sample");
  }
}

std::string subject_id(int subject) { return "s" + std::to_string(subject); }

}  // namespace rfdfar
