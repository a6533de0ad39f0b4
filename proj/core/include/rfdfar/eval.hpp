#pragma once

// End-to-end experiment harness: simulate, denoise, featurize and
// cross-validate over SNR grids, gesture sets and scenarios.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfdfar/channel.hpp"
#include "rfdfar/features.hpp"
#include "rfdfar/knn.hpp"
#include "rfdfar/trace.hpp"
#include "rfdfar/units.hpp"

namespace rfdfar::eval {

std::string_view version() noexcept;

using GestureSet = std::vector<GestureLabel>;

/// "hands_down+hands_up"
std::string gesture_set_name(const GestureSet& set);
GestureSet parse_gesture_set(std::string_view name);

/// Parameters shared by every stage of one data-generating pipeline run.
struct PipelineParams {
  int repetitions = 5;
  int subjects = 5;
  double duration_s = 1.0;
  double subject_spread = 0.15;
  std::size_t window_size = features::kDefaultWindow;
  int levels = 13;
  std::size_t smooth_len = 1001;
  features::FeatureSelection features = features::FeatureSelection::mean_std();
  double sample_rate_hz = 1.0e6;
  double tone_hz = 1.0e5;

  friend bool operator==(const PipelineParams&, const PipelineParams&) = default;
};

/// Featurized table for one gesture preset at one SNR: `subjects` x
/// `repetitions` traces through simulate, denoise and window features.
/// `footprint` scales every attenuation depth (1 = preset).
features::FeatureTable gesture_table(const channel::GestureEnvelopeSpec& preset, SnrDb snr,
                                     const PipelineParams& params, std::uint64_t seed,
                                     std::optional<double> distance_m = std::nullopt,
                                     double footprint = 1.0,
                                     features::LabelKind labels = features::LabelKind::Gesture);

struct SweepSpec {
  std::vector<SnrDb> snr_grid{SnrDb(59), SnrDb(42), SnrDb(22), SnrDb(12), SnrDb(2), SnrDb(0)};
  std::vector<GestureSet> gesture_sets{
      {GestureLabel::HandsDown, GestureLabel::HandsUp},
      {GestureLabel::HandsDown, GestureLabel::HandsUp, GestureLabel::Clapping}};
  PipelineParams pipeline;
  int folds = 10;
  int k = 6;
  knn::Weighting weighting = knn::Weighting::InverseDistance;
  std::uint64_t seed = 42;
  /// When set, the grid comes from environment_snr at `distances`.
  std::optional<channel::Environment> environment;
  std::vector<double> distances;

  /// Throws std::invalid_argument when a grid is empty or a class would have
  /// fewer rows than folds.
  void validate() const;

  /// (snr, distance) points actually swept.
  std::vector<std::pair<SnrDb, std::optional<double>>> grid() const;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Flat `key = value` file; `#` starts a comment. Keys: snr_grid,
/// gesture_sets (`;`-separated sets of `+`-joined names), repetitions,
/// subjects, duration_s, subject_spread, window_size, levels, smooth_len,
/// features, sample_rate_hz, tone_hz, folds, k, weighting, seed,
/// environment, distances. Unknown keys are errors.
SweepSpec parse_sweep_spec(std::istream& in);
SweepSpec load_sweep_spec(const std::filesystem::path& path);
void write_sweep_spec(std::ostream& out, const SweepSpec& spec);

struct ClassScore {
  std::string label;
  std::optional<double> precision;
  std::optional<double> recall;

  friend bool operator==(const ClassScore&, const ClassScore&) = default;
};

struct SweepRow {
  double snr_db = 0.0;
  std::optional<double> distance_m;
  std::string gesture_set;
  std::uint64_t windows = 0;
  double accuracy = 0.0;
  std::vector<ClassScore> classes;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

struct SweepReport {
  SweepSpec spec;
  std::string tool_version;
  std::vector<SweepRow> rows;  // grid order, then gesture-set order

  const SweepRow* find(double snr_db, std::string_view gesture_set) const;
  friend bool operator==(const SweepReport&, const SweepReport&) = default;
};

/// Deterministic given the spec. A failing cell is rethrown with its SNR and
/// gesture named.
SweepReport run_sweep(const SweepSpec& spec);

/// CSV preceded by `# key=value` provenance lines (the full spec and tool
/// version). Byte-stable for equal reports.
void write_report(std::ostream& out, const SweepReport& report);
void write_report(const std::filesystem::path& path, const SweepReport& report);
SweepReport read_report(std::istream& in);

enum class Scenario { Driving, Conversation2m, Conversation5m };

std::string_view to_string(Scenario s) noexcept;
/// Throws std::invalid_argument for unknown names.
Scenario parse_scenario(std::string_view name);

struct ScenarioSpec {
  SnrDb snr{59};
  double distance_m = 0.0;
  double footprint = 1.0;
  PipelineParams pipeline;
  int folds = 10;
  int k = 6;
  knn::Weighting weighting = knn::Weighting::InverseDistance;
  std::uint64_t seed = 42;
};

ScenarioSpec default_scenario_spec(Scenario s);

struct ScenarioReport {
  Scenario scenario = Scenario::Driving;
  ScenarioSpec spec;
  /// Pooled stratified k-fold over every subject.
  double kfold_pooled = 0.0;
  /// Mean of per-subject k-fold accuracies (one model per subject).
  double kfold_individual = 0.0;
  std::vector<knn::SubjectScore> individual;
  knn::LosoResult loso;
  knn::ConfusionMatrix confusion;  // pooled k-fold
};

/// Neutral vs angry for the scenario's label pair, reported with k-fold and
/// leave-one-subject-out accuracy.
ScenarioReport run_scenario(Scenario s, const ScenarioSpec& spec);
ScenarioReport run_scenario(Scenario s);

void write_scenario_report(std::ostream& out, const ScenarioReport& r);

}  // namespace rfdfar::eval
