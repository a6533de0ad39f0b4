#pragma once

// k-nearest-neighbour classifier, confusion matrices and cross-validation.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rfdfar/features.hpp"

namespace rfdfar::knn {

inline constexpr double kDistanceEpsilon = 1e-12;

enum class Weighting { Uniform, InverseDistance };

std::string_view to_string(Weighting w) noexcept;
std::optional<Weighting> parse_weighting(std::string_view name) noexcept;

struct Prediction {
  std::string label;
  std::vector<std::pair<std::string, double>> scores;  // every class, sorted by name
};

class KnnModel {
 public:
  /// Throws std::invalid_argument for k < 1 and InvalidTrainingSet when
  /// k exceeds the row count, only one class is present or every feature
  /// column is constant.
  static KnnModel fit(const features::FeatureTable& table, int k,
                      Weighting weighting = Weighting::InverseDistance);

  /// `point` holds one value per selected feature, in selection order.
  Prediction predict(std::span<const double> point) const;
  Prediction predict(const features::FeatureVector& fv) const;

  /// Predicted label for every row; the table must contain the model's features.
  std::vector<std::string> predict_table(const features::FeatureTable& table) const;

  int k() const noexcept { return k_; }
  Weighting weighting() const noexcept { return weighting_; }
  const features::FeatureSelection& selection() const noexcept { return selection_; }
  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::size_t rows() const noexcept { return labels_.size(); }
  std::span<const double> means() const noexcept { return mean_; }
  std::span<const double> stds() const noexcept { return std_; }
  /// Columns that survived the zero-variance check.
  const std::vector<bool>& active() const noexcept { return active_; }

  void save(std::ostream& out) const;
  static KnnModel load(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static KnnModel load(const std::filesystem::path& path);

 private:
  void build_normalized();

  int k_ = 1;
  Weighting weighting_ = Weighting::InverseDistance;
  features::FeatureSelection selection_;
  std::vector<double> raw_;  // row-major, selection_ columns
  std::vector<std::string> labels_;
  std::vector<std::string> classes_;
  std::vector<double> mean_;
  std::vector<double> std_;
  std::vector<bool> active_;
  std::vector<double> norm_;  // row-major, active columns only
  std::vector<std::size_t> label_index_;
};

class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  /// Classes are sorted and deduplicated.
  explicit ConfusionMatrix(std::vector<std::string> classes);
  /// `counts[truth][predicted]` in the given class order.
  ConfusionMatrix(std::vector<std::string> classes,
                  std::vector<std::vector<std::uint64_t>> counts);

  void add(std::string_view truth, std::string_view predicted, std::uint64_t n = 1);
  void merge(const ConfusionMatrix& other);

  const std::vector<std::string>& classes() const noexcept { return classes_; }
  std::uint64_t count(std::size_t truth, std::size_t predicted) const;
  std::uint64_t total() const noexcept;
  std::uint64_t correct() const noexcept;
  std::size_t index_of(std::string_view label) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> classes_;
  std::vector<std::uint64_t> counts_;  // row-major
};

struct Metrics {
  double accuracy = 0.0;
  std::vector<std::optional<double>> precision;  // absent when nothing was predicted as c
  std::vector<std::optional<double>> recall;     // absent when c never occurs
};

/// Throws std::invalid_argument on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

/// Stratified k-fold: each class is shuffled with one Rng seeded by `seed`
/// (classes in sorted order) and dealt round-robin into folds, continuing
/// the counter across classes. Needs folds <= rows and at least 2 rows per
/// class; a class smaller than `folds` is simply absent from some folds.
std::vector<std::size_t> stratified_folds(const features::FeatureTable& table, int folds,
                                          std::uint64_t seed);

ConfusionMatrix kfold_cv(const features::FeatureTable& table, int folds, int k,
                         Weighting weighting, std::uint64_t seed);

struct SubjectScore {
  std::string subject;
  double accuracy = 0.0;
  std::size_t rows = 0;
};

struct LosoResult {
  std::vector<SubjectScore> per_subject;  // sorted by subject id
  ConfusionMatrix pooled;

  double mean_accuracy() const noexcept;
};

/// One split per subject. Throws std::invalid_argument when any row lacks a
/// subject id or fewer than two subjects are present.
LosoResult loso_cv(const features::FeatureTable& table, int k, Weighting weighting);

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm);

}  // namespace rfdfar::knn
