#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rfdfar/emotion.hpp"

using namespace rfdfar;
using namespace rfdfar::emotion;

namespace {

constexpr auto N = EmotionLabel::Neutral;
constexpr auto A = EmotionLabel::Anger;

struct Seg {
  EmotionLabel e;
  double seconds;
};

EmotionStream build(std::initializer_list<Seg> segs, double period = 1.0, double t0 = 0.0) {
  std::vector<EmotionLabel> labels;
  for (const auto& s : segs) {
    const auto n = static_cast<std::size_t>(std::llround(s.seconds / period));
    labels.insert(labels.end(), n, s.e);
  }
  return EmotionStream::from_labels(labels, period, t0);
}

std::size_t count(const std::vector<Alert>& alerts, AlertKind k) {
  return static_cast<std::size_t>(
      std::count_if(alerts.begin(), alerts.end(), [&](const Alert& a) { return a.kind == k; }));
}

}  // namespace

TEST_CASE("gesture to emotion mapping") {
  CHECK(map_gesture(GestureLabel::HandsDown) == N);
  CHECK(map_gesture(GestureLabel::AngryDriving) == A);
  CHECK(map_gesture(GestureLabel::AngryConversation) == A);
  CHECK(map_gesture(GestureLabel::NeutralConversation) == N);
  CHECK(map_gesture(GestureLabel::HandsUp) == EmotionLabel::Fear);
  CHECK(map_gesture(GestureLabel::Clapping) == EmotionLabel::Happy);
  CHECK(parse_emotion_or_gesture("anger") == A);
  CHECK(parse_emotion_or_gesture("angry_driving") == A);
  CHECK_FALSE(parse_emotion_or_gesture("furious").has_value());
  for (auto e : {N, A, EmotionLabel::Fear, EmotionLabel::Happy, EmotionLabel::Sad}) {
    CHECK(parse_emotion(to_string(e)) == e);
  }
}

TEST_CASE("six minutes of anger raise one sustained alert") {
  const auto alerts = aggregate(build({{N, 30}, {A, 360}, {N, 30}}, 0.1));
  REQUIRE(alerts.size() == 1);
  CHECK(alerts[0].kind == AlertKind::Sustained);
  CHECK(alerts[0].emotion == A);
  CHECK(alerts[0].start == doctest::Approx(30.0));
  CHECK(alerts[0].end == doctest::Approx(390.0));
}

TEST_CASE("four minutes of anger raise nothing") {
  CHECK(aggregate(build({{N, 30}, {A, 240}, {N, 30}}, 0.1)).empty());
}

TEST_CASE("a short interruption is bridged") {
  const auto alerts = aggregate(build({{A, 150}, {N, 8}, {A, 150}}));
  REQUIRE(alerts.size() == 1);
  CHECK(alerts[0].start == 0.0);
  CHECK(alerts[0].end == 308.0);
}

TEST_CASE("an interruption beyond the tolerance splits the run") {
  CHECK(aggregate(build({{A, 150}, {N, 12}, {A, 150}})).empty());
}

TEST_CASE("the sustain threshold is inclusive") {
  CHECK(aggregate(build({{A, 300}}, 0.1)).size() == 1);
  CHECK(aggregate(build({{A, 299.9}}, 0.1)).empty());
}

TEST_CASE("three qualifying runs within an hour raise a repeated alert") {
  const auto s = build({{A, 310}, {N, 600}, {A, 310}, {N, 600}, {A, 310}});
  const auto alerts = aggregate(s);
  CHECK(count(alerts, AlertKind::Sustained) == 3);
  REQUIRE(count(alerts, AlertKind::Repeated) == 1);
  const auto rep = *std::find_if(alerts.begin(), alerts.end(),
                                 [](const Alert& a) { return a.kind == AlertKind::Repeated; });
  CHECK(rep.start == 0.0);
  CHECK(rep.end == 310.0 * 3 + 1200.0);
}

TEST_CASE("runs spread over more than an hour do not repeat") {
  const auto s = build({{A, 310}, {N, 1800}, {A, 310}, {N, 1800}, {A, 310}});
  CHECK(count(aggregate(s), AlertKind::Repeated) == 0);
}

TEST_CASE("runs of different emotions are counted separately") {
  const auto s = build({{A, 310}, {N, 60}, {EmotionLabel::Sad, 310}, {N, 60}, {A, 310}});
  const auto alerts = aggregate(s);
  CHECK(count(alerts, AlertKind::Sustained) == 3);
  CHECK(count(alerts, AlertKind::Repeated) == 0);
  AlertPolicy two;
  two.episode_count_threshold = 2;
  CHECK(count(aggregate(s, two), AlertKind::Repeated) == 1);
}

TEST_CASE("neutral never alerts") {
  CHECK(aggregate(build({{N, 4000}})).empty());
}

TEST_CASE("policy and stream validation") {
  AlertPolicy p;
  p.sustain_threshold = 0.0;
  CHECK_THROWS_AS(aggregate(build({{A, 10}}), p), std::invalid_argument);
  p = {};
  p.gap_tolerance = -1.0;
  CHECK_THROWS_AS(aggregate(build({{A, 10}}), p), std::invalid_argument);
  p = {};
  p.episode_count_threshold = 0;
  CHECK_THROWS_AS(aggregate(build({{A, 10}}), p), std::invalid_argument);

  EmotionStream s = build({{A, 5}});
  s.entries[3].timestamp = s.entries[2].timestamp;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = build({{A, 5}});
  s.entries[4].timestamp += 0.5;
  CHECK_THROWS_AS(aggregate(s), std::invalid_argument);
  CHECK(aggregate(EmotionStream{}).empty());
}

namespace {

EmotionStream random_stream(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> emo(0, 2);
  std::uniform_int_distribution<int> len(1, 400);
  std::vector<EmotionLabel> labels;
  const EmotionLabel pick[3] = {N, A, EmotionLabel::Sad};
  while (labels.size() < n) labels.insert(labels.end(), len(rng), pick[emo(rng)]);
  labels.resize(n);
  return EmotionStream::from_labels(labels, 1.0);
}

}  // namespace

TEST_CASE("property: alerts are ordered, in range and disjoint per emotion and kind") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto s = random_stream(rng, 6000);
    const auto alerts = aggregate(s);
    for (std::size_t i = 0; i < alerts.size(); ++i) {
      CHECK(alerts[i].emotion != N);
      CHECK(alerts[i].start < alerts[i].end);
      CHECK(alerts[i].start >= 0.0);
      CHECK(alerts[i].end <= 6000.0);
      if (i > 0) CHECK(alerts[i - 1].start <= alerts[i].start);
      for (std::size_t j = i + 1; j < alerts.size(); ++j) {
        if (alerts[i].emotion == alerts[j].emotion && alerts[i].kind == alerts[j].kind) {
          CHECK((alerts[i].end <= alerts[j].start || alerts[j].end <= alerts[i].start));
        }
      }
    }
  }
}

TEST_CASE("property: shifting every timestamp shifts every alert") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto s = random_stream(rng, 5000);
    const auto base = aggregate(s);
    const double shift = 1234.0;
    for (auto& e : s.entries) e.timestamp += shift;
    const auto moved = aggregate(s);
    REQUIRE(moved.size() == base.size());
    for (std::size_t i = 0; i < base.size(); ++i) {
      CHECK(moved[i].start == doctest::Approx(base[i].start + shift));
      CHECK(moved[i].end == doctest::Approx(base[i].end + shift));
      CHECK(moved[i].kind == base[i].kind);
    }
  }
}

TEST_CASE("property: extending an isolated run never removes alerts") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> len(200.0, 400.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double a = len(rng);
    const double b = len(rng);
    const auto before = aggregate(build({{N, 60}, {A, a}, {N, 600}, {A, b}, {N, 60}}));
    const auto after = aggregate(build({{N, 60}, {A, a + 30}, {N, 570}, {A, b}, {N, 60}}));
    CHECK(after.size() >= before.size());
  }
}

TEST_CASE("extending a run can merge two alerts into one") {
  const auto before = aggregate(build({{A, 310}, {N, 12}, {A, 310}}));
  const auto after = aggregate(build({{A, 313}, {N, 9}, {A, 310}}));
  CHECK(before.size() == 2);
  REQUIRE(after.size() == 1);
  CHECK(after[0].end == 632.0);
}

TEST_CASE("stream csv") {
  std::istringstream in("time_s,predicted\n0,angry_driving\n0.5,anger\n1.0,neutral\n");
  const auto s = read_stream_csv(in, 0.5);
  REQUIRE(s.entries.size() == 3);
  CHECK(s.entries[0].emotion == A);
  CHECK(s.entries[2].emotion == N);
  CHECK(s.entries[1].timestamp == 0.5);

  std::istringstream no_time("label\nanger\nsad\n");
  const auto t = read_stream_csv(no_time, 2.0);
  CHECK(t.entries[1].timestamp == 2.0);
  CHECK(t.entries[1].emotion == EmotionLabel::Sad);

  std::stringstream rt;
  write_stream_csv(rt, s);
  const auto back = read_stream_csv(rt, 0.5);
  REQUIRE(back.entries.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.entries[i].emotion == s.entries[i].emotion);
    CHECK(back.entries[i].timestamp == s.entries[i].timestamp);
  }

  std::istringstream bad("time_s,emotion\n0,rage\n");
  CHECK_THROWS_AS(read_stream_csv(bad, 1.0), std::invalid_argument);
  std::istringstream no_label("time_s,x\n0,1\n");
  CHECK_THROWS_AS(read_stream_csv(no_label, 1.0), std::invalid_argument);
}

TEST_CASE("alerts csv round trip") {
  const auto alerts = aggregate(build({{A, 310}, {N, 600}, {A, 310}, {N, 600}, {A, 310.5}}, 0.5));
  std::stringstream ss;
  write_alerts_csv(ss, alerts);
  CHECK(ss.str().rfind("start_s,end_s,emotion,kind\n", 0) == 0);
  CHECK(read_alerts_csv(ss) == alerts);
  CHECK(format_alert(alerts.front()).find("anger") != std::string::npos);
}
