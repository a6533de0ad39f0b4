#pragma once

// Non-overlapping windows and per-window statistics.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rfdfar/trace.hpp"

namespace rfdfar::features {

inline constexpr std::size_t kDefaultWindow = 100'000;
inline constexpr std::size_t kEntropyBins = 64;

enum class Feature { Mean, Std, Entropy, ZeroCrossings, AvgDerivative };

std::string_view to_string(Feature f) noexcept;
std::optional<Feature> parse_feature(std::string_view name) noexcept;

/// Ordered, duplicate-free subset of features (canonical column order).
class FeatureSelection {
 public:
  FeatureSelection() = default;
  FeatureSelection(std::initializer_list<Feature> fs);

  static FeatureSelection all();
  static FeatureSelection mean_std();
  /// "mean,std" or "all".
  static FeatureSelection parse(std::string_view list);

  void add(Feature f);
  bool contains(Feature f) const noexcept;
  bool empty() const noexcept { return columns_.empty(); }
  std::span<const Feature> columns() const noexcept { return columns_; }
  std::string to_string() const;

 private:
  std::vector<Feature> columns_;
};

/// View onto a trace's samples; valid while the trace lives.
struct Window {
  std::span<const double> samples;
  std::size_t index = 0;
  TraceMeta source_meta;
};

struct FeatureVector {
  double mean = 0.0;
  double std = 0.0;      // population
  double entropy = 0.0;  // bits, 64-bin histogram over [min, max]
  std::size_t zero_crossings = 0;
  double avg_derivative = 0.0;  // mean |x[i+1] - x[i]|
  std::string label;
  std::optional<std::string> subject_id;

  double value(Feature f) const noexcept;
};

/// floor(len / size) windows; the partial tail is dropped.
std::vector<Window> window_trace(const Trace& trace, std::size_t size);

FeatureVector compute_features(const Window& w);

/// Labelled feature rows with a fixed column set.
class FeatureTable {
 public:
  explicit FeatureTable(FeatureSelection columns = FeatureSelection::mean_std());

  const FeatureSelection& selection() const noexcept { return selection_; }
  std::size_t rows() const noexcept { return labels_.size(); }
  std::size_t dims() const noexcept { return selection_.columns().size(); }

  std::span<const double> row(std::size_t i) const;
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  /// Empty string when the row has no subject.
  const std::string& subject(std::size_t i) const { return subjects_.at(i); }
  bool has_subjects() const noexcept;

  void add_row(std::span<const double> values, std::string label, std::string subject = {});
  void add(const FeatureVector& fv);
  void append(const FeatureTable& other);

  /// Rows at `indices`, in that order.
  FeatureTable subset(std::span<const std::size_t> indices) const;

  /// Sorted distinct labels / subjects.
  std::vector<std::string> classes() const;
  std::vector<std::string> subject_ids() const;

  friend bool operator==(const FeatureTable&, const FeatureTable&) = default;

 private:
  FeatureSelection selection_;
  std::vector<double> values_;
  std::vector<std::string> labels_;
  std::vector<std::string> subjects_;
};

inline bool operator==(const FeatureSelection& a, const FeatureSelection& b) {
  return std::equal(a.columns().begin(), a.columns().end(), b.columns().begin(), b.columns().end());
}

enum class LabelKind { Gesture, Emotion };

/// Windows every trace and computes the selected features. Rows inherit the
/// trace's gesture (or its mapped emotion) and subject. Throws on mixed
/// sample rates, empty input or an empty selection.
FeatureTable featurize_dataset(std::span<const Trace> traces, std::size_t size,
                               const FeatureSelection& selected,
                               LabelKind labels = LabelKind::Gesture);

/// Header `mean,std,entropy,zero_crossings,avg_derivative,label,subject_id`
/// with unselected feature columns omitted.
void write_table_csv(std::ostream& out, const FeatureTable& table);
FeatureTable read_table_csv(std::istream& in);

}  // namespace rfdfar::features
