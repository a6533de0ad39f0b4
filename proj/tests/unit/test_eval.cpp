#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "rfdfar/eval.hpp"

using namespace rfdfar;
using namespace rfdfar::eval;

namespace {

SweepSpec small_spec() {
  SweepSpec s;
  s.snr_grid = {SnrDb(22)};
  s.gesture_sets = {{GestureLabel::HandsDown, GestureLabel::HandsUp}};
  auto& p = s.pipeline;
  p.subjects = 2;
  p.repetitions = 2;
  p.duration_s = 1.0;
  p.sample_rate_hz = 1.0e5;
  p.tone_hz = 1.0e4;
  p.window_size = 10000;
  p.smooth_len = 101;
  p.levels = 10;
  s.folds = 5;
  return s;
}

std::string report_text(const SweepReport& r) {
  std::ostringstream out;
  write_report(out, r);
  return out.str();
}

}  // namespace

TEST_CASE("gesture set names") {
  const GestureSet s{GestureLabel::HandsDown, GestureLabel::Clapping};
  CHECK(gesture_set_name(s) == "hands_down+clapping");
  CHECK(parse_gesture_set("hands_down+clapping") == s);
  CHECK_THROWS_AS(parse_gesture_set("hands_down"), std::invalid_argument);
  CHECK_THROWS_AS(parse_gesture_set("hands_down+hands_down"), std::invalid_argument);
  CHECK_THROWS_AS(parse_gesture_set("hands_down+jazz_hands"), std::invalid_argument);
}

TEST_CASE("spec file parsing") {
  std::istringstream in(
      "# comment line\n"
      "snr_grid = 59, 12, inf\n"
      "gesture_sets = hands_down+hands_up; hands_down+hands_up+clapping\n"
      "subjects = 3   # trailing comment\n"
      "k = 4\n"
      "weighting = uniform\n"
      "seed = 7\n");
  const auto s = parse_sweep_spec(in);
  REQUIRE(s.snr_grid.size() == 3);
  CHECK(s.snr_grid[1] == SnrDb(12));
  CHECK(s.snr_grid[2].is_noiseless());
  CHECK(s.gesture_sets.size() == 2);
  CHECK(s.pipeline.subjects == 3);
  CHECK(s.pipeline.repetitions == 5);
  CHECK(s.k == 4);
  CHECK(s.weighting == knn::Weighting::Uniform);
  CHECK(s.seed == 7);
}

TEST_CASE("spec file errors name the line") {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      parse_sweep_spec(in);
    } catch (const std::invalid_argument& e) {
      const std::string what = e.what();
      CHECK_MESSAGE(what.find(needle) != std::string::npos, what);
      return;
    }
    FAIL("no error for: " << text);
  };
  fails_with("k = 3\nbogus = 1\n", "line 2");
  fails_with("k = 3\nbogus = 1\n", "bogus");
  fails_with("k = 3\nk = 4\n", "duplicate");
  fails_with("no equals sign\n", "line 1");
  fails_with("folds = 0\n", "folds");
  fails_with("weighting = cubic\n", "cubic");
  fails_with("environment = moon\n", "moon");
  fails_with("snr_grid = 12, abc\n", "line 1");
}

TEST_CASE("spec validation") {
  auto s = small_spec();
  CHECK_NOTHROW(s.validate());
  s.snr_grid.clear();
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_spec();
  s.folds = 100;  // 40 rows per class
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = small_spec();
  s.environment = channel::Environment::Cafe;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);  // no distances
}

TEST_CASE("spec round trip through the file format") {
  auto s = small_spec();
  s.snr_grid.push_back(SnrDb::noiseless());
  s.pipeline.features = features::FeatureSelection::all();
  s.weighting = knn::Weighting::Uniform;
  std::stringstream ss;
  write_sweep_spec(ss, s);
  CHECK(parse_sweep_spec(ss) == s);

  auto e = small_spec();
  e.environment = channel::Environment::Corridor;
  e.distances = {2.5, 12.5};
  std::stringstream es;
  write_sweep_spec(es, e);
  CHECK(parse_sweep_spec(es) == e);
}

TEST_CASE("environment grid follows the attenuation table") {
  auto s = small_spec();
  s.environment = channel::Environment::Cafe;
  s.distances = {5.0, 12.5};
  const auto g = s.grid();
  REQUIRE(g.size() == 2);
  CHECK(g[0].second == 5.0);
  CHECK(g[1].first.value() == doctest::Approx(31.3).epsilon(1e-3));
}

TEST_CASE("report with no rows is header only") {
  SweepReport r;
  r.spec = small_spec();
  r.tool_version = "0.0.0";
  const auto text = report_text(r);
  CHECK(text.rfind("# rfdfar sweep report\n# tool_version=0.0.0\n", 0) == 0);
  const auto last = text.substr(text.rfind('\n', text.size() - 2) + 1);
  CHECK(last == "snr_db,distance_m,gesture_set,windows,accuracy,precision,recall\n");
  std::istringstream in(text);
  CHECK(read_report(in) == r);
}

TEST_CASE("report round trip keeps absent ratios") {
  SweepReport r;
  r.spec = small_spec();
  r.tool_version = std::string(version());
  r.rows.push_back({22.0, std::nullopt, "hands_down+hands_up", 40, 0.875,
                    {{"hands_down", 0.8, 1.0}, {"hands_up", std::nullopt, 0.75}}});
  r.rows.push_back({31.3, 12.5, "hands_down+hands_up", 40, 1.0,
                    {{"hands_down", 1.0, 1.0}, {"hands_up", 1.0, 1.0}}});
  const auto text = report_text(r);
  CHECK(text.find("hands_up:NA") != std::string::npos);
  std::istringstream in(text);
  CHECK(read_report(in) == r);
  std::istringstream junk("snr_db\n1\n");
  CHECK_THROWS(read_report(junk));
}

TEST_CASE("a small sweep is reproducible byte for byte") {
  const auto spec = small_spec();
  const auto a = run_sweep(spec);
  const auto b = run_sweep(spec);
  REQUIRE(a.rows.size() == 1);
  CHECK(a.rows[0].windows == 80);
  CHECK(a.rows[0].classes.size() == 2);
  CHECK(report_text(a) == report_text(b));
  auto other = spec;
  other.seed = 43;
  CHECK(report_text(run_sweep(other)) != report_text(a));
}

TEST_CASE("noiseless traces are separable") {
  auto spec = small_spec();
  spec.snr_grid = {SnrDb::noiseless()};
  const auto r = run_sweep(spec);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].accuracy >= 0.99);
}

TEST_CASE("a failing cell is named in the error") {
  auto spec = small_spec();
  spec.snr_grid = {SnrDb(42)};
  spec.pipeline.tone_hz = 6.0e4;  // above Nyquist
  try {
    run_sweep(spec);
    FAIL("sweep should fail");
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    CHECK_MESSAGE(what.find("snr=42") != std::string::npos, what);
    CHECK_MESSAGE(what.find("hands_down") != std::string::npos, what);
  }
}

TEST_CASE("gesture_table shape and labels") {
  const auto p = small_spec().pipeline;
  const auto t = gesture_table(channel::preset_envelope(GestureLabel::Clapping), SnrDb(42), p, 1);
  CHECK(t.rows() == 40);
  CHECK(t.classes() == std::vector<std::string>{"clapping"});
  CHECK(t.subject_ids() == std::vector<std::string>{"s0", "s1"});
  const auto e = gesture_table(channel::preset_envelope(GestureLabel::AngryDriving), SnrDb(42), p,
                               1, std::nullopt, 1.0, features::LabelKind::Emotion);
  CHECK(e.classes() == std::vector<std::string>{"anger"});
}

TEST_CASE("scenario names") {
  CHECK(parse_scenario("driving") == Scenario::Driving);
  CHECK(parse_scenario("conversation5m") == Scenario::Conversation5m);
  CHECK(to_string(Scenario::Conversation2m) == "conversation2m");
  CHECK_THROWS_AS(parse_scenario("karaoke"), std::invalid_argument);
  CHECK(default_scenario_spec(Scenario::Conversation5m).distance_m == 5.0);
}

TEST_CASE("a reduced scenario reports every metric") {
  auto spec = default_scenario_spec(Scenario::Driving);
  spec.pipeline.subjects = 2;
  spec.pipeline.repetitions = 1;
  spec.pipeline.duration_s = 1.0;
  spec.pipeline.sample_rate_hz = 1.0e5;
  spec.pipeline.tone_hz = 1.0e4;
  spec.pipeline.window_size = 10000;
  spec.pipeline.smooth_len = 101;
  spec.pipeline.levels = 10;
  spec.folds = 5;
  const auto r = run_scenario(Scenario::Driving, spec);
  CHECK(r.individual.size() == 2);
  CHECK(r.loso.per_subject.size() == 2);
  CHECK(r.confusion.total() == 40);
  CHECK(r.confusion.classes() == std::vector<std::string>{"anger", "neutral"});
  std::ostringstream out;
  write_scenario_report(out, r);
  CHECK(out.str().find("\nmetric,value\n") != std::string::npos);
  CHECK(out.str().find("loso") != std::string::npos);
}

TEST_CASE("conversation accuracy holds from 2 m to 5 m") {
  const auto near = run_scenario(Scenario::Conversation2m);
  const auto far = run_scenario(Scenario::Conversation5m);
  CAPTURE(near.kfold_pooled);
  CAPTURE(far.kfold_pooled);
  CHECK(std::abs(near.kfold_pooled - far.kfold_pooled) <= 0.10);
  CHECK(near.spec.snr == SnrDb(42));
}
