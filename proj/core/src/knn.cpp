#include "rfdfar/knn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>

#include "rfdfar/errors.hpp"
#include "rfdfar/log.hpp"
#include "rfdfar/parallel.hpp"
#include "rfdfar/random.hpp"
#include "rfdfar/text.hpp"

namespace rfdfar::knn {

using features::FeatureTable;

namespace {

constexpr std::string_view kModelMagic = "rfdfar-knn";
constexpr int kModelVersion = 1;

std::vector<std::size_t> column_map(const features::FeatureSelection& model,
                                    const features::FeatureSelection& table) {
  std::vector<std::size_t> map;
  const auto cols = table.columns();
  for (auto f : model.columns()) {
    auto it = std::find(cols.begin(), cols.end(), f);
    if (it == cols.end()) {
      throw std::invalid_argument("feature '" + std::string(features::to_string(f)) +
                                  "' missing from input table");
    }
    map.push_back(static_cast<std::size_t>(it - cols.begin()));
  }
  return map;
}

std::string expect_key(std::istream& in, std::string_view key) {
  std::string line;
  if (!std::getline(in, line)) {
    throw std::invalid_argument("model file: missing '" + std::string(key) + "' line");
  }
  auto t = text::trim(line);
  if (t.substr(0, key.size()) != key || (t.size() > key.size() && t[key.size()] != ' ')) {
    throw std::invalid_argument("model file: expected '" + std::string(key) + "', got '" +
                                std::string(t) + "'");
  }
  return std::string(text::trim(t.substr(key.size())));
}

std::vector<double> parse_doubles(std::string_view s) {
  std::vector<double> out;
  if (text::trim(s).empty()) return out;
  for (auto part : text::split(s, ',')) out.push_back(text::parse_double(text::trim(part)));
  return out;
}

}  // namespace

std::string_view to_string(Weighting w) noexcept {
  return w == Weighting::Uniform ? "uniform" : "inverse_distance";
}

std::optional<Weighting> parse_weighting(std::string_view name) noexcept {
  if (name == "uniform") return Weighting::Uniform;
  if (name == "inverse_distance" || name == "inverse") return Weighting::InverseDistance;
  return std::nullopt;
}

KnnModel KnnModel::fit(const FeatureTable& table, int k, Weighting weighting) {
  if (k < 1) throw std::invalid_argument("knn: k must be at least 1");
  if (static_cast<std::size_t>(k) > table.rows()) {
    throw InvalidTrainingSet("knn: k=" + std::to_string(k) + " exceeds the " +
                             std::to_string(table.rows()) + " training rows");
  }
  auto classes = table.classes();
  if (classes.size() < 2) throw InvalidTrainingSet("knn: training set needs at least 2 classes");

  KnnModel m;
  m.k_ = k;
  m.weighting_ = weighting;
  m.selection_ = table.selection();
  m.classes_ = std::move(classes);
  const std::size_t d = table.dims();
  const std::size_t n = table.rows();
  m.raw_.reserve(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = table.row(i);
    m.raw_.insert(m.raw_.end(), r.begin(), r.end());
    m.labels_.push_back(table.label(i));
  }
  m.mean_.assign(d, 0.0);
  m.std_.assign(d, 0.0);
  for (std::size_t c = 0; c < d; ++c) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += m.raw_[i * d + c];
    const double mean = static_cast<double>(s / n);
    long double sq = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long double dv = m.raw_[i * d + c] - mean;
      sq += dv * dv;
    }
    m.mean_[c] = mean;
    m.std_[c] = std::sqrt(static_cast<double>(sq / n));
  }
  m.build_normalized();
  return m;
}

void KnnModel::build_normalized() {
  const std::size_t d = selection_.columns().size();
  const std::size_t n = labels_.size();
  active_.assign(d, true);
  std::size_t kept = 0;
  for (std::size_t c = 0; c < d; ++c) {
    if (!(std_[c] > 1e-14 * std::abs(mean_[c])) || !(std_[c] > 0.0)) {
      active_[c] = false;
      log::warn("knn: dropping zero-variance feature '" +
                std::string(features::to_string(selection_.columns()[c])) + "'");
    } else {
      ++kept;
    }
  }
  if (kept == 0) throw InvalidTrainingSet("knn: every feature column is constant");
  norm_.clear();
  norm_.reserve(n * kept);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < d; ++c) {
      if (active_[c]) norm_.push_back((raw_[i * d + c] - mean_[c]) / std_[c]);
    }
  }
  label_index_.clear();
  for (const auto& l : labels_) {
    label_index_.push_back(static_cast<std::size_t>(
        std::lower_bound(classes_.begin(), classes_.end(), l) - classes_.begin()));
  }
}

Prediction KnnModel::predict(std::span<const double> point) const {
  const std::size_t d = selection_.columns().size();
  if (point.size() != d) throw std::invalid_argument("knn: query has the wrong feature count");
  std::vector<double> q;
  for (std::size_t c = 0; c < d; ++c) {
    if (!std::isfinite(point[c])) throw std::invalid_argument("knn: non-finite query feature");
    if (active_[c]) q.push_back((point[c] - mean_[c]) / std_[c]);
  }
  const std::size_t kept = q.size();
  const std::size_t n = labels_.size();
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const double* row = norm_.data() + i * kept;
    for (std::size_t c = 0; c < kept; ++c) {
      const double dv = row[c] - q[c];
      s += dv * dv;
    }
    dist[i] = {std::sqrt(s), i};
  }
  const auto kk = static_cast<std::size_t>(k_);
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(kk), dist.end());

  std::vector<double> score(classes_.size(), 0.0);
  for (std::size_t j = 0; j < kk; ++j) {
    const double w =
        weighting_ == Weighting::Uniform ? 1.0 : 1.0 / (dist[j].first + kDistanceEpsilon);
    score[label_index_[dist[j].second]] += w;
  }
  std::size_t best = 0;
  for (std::size_t c = 1; c < score.size(); ++c) {
    if (score[c] > score[best]) best = c;
  }
  Prediction p;
  p.label = classes_[best];
  for (std::size_t c = 0; c < classes_.size(); ++c) p.scores.emplace_back(classes_[c], score[c]);
  return p;
}

Prediction KnnModel::predict(const features::FeatureVector& fv) const {
  std::vector<double> point;
  for (auto f : selection_.columns()) point.push_back(fv.value(f));
  return predict(point);
}

std::vector<std::string> KnnModel::predict_table(const FeatureTable& table) const {
  const auto map = column_map(selection_, table.selection());
  std::vector<std::string> out;
  out.reserve(table.rows());
  std::vector<double> point(map.size());
  for (std::size_t i = 0; i < table.rows(); ++i) {
    auto r = table.row(i);
    for (std::size_t c = 0; c < map.size(); ++c) point[c] = r[map[c]];
    out.push_back(predict(point).label);
  }
  return out;
}

void KnnModel::save(std::ostream& out) const {
  auto join = [](std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += text::format_double(v[i]);
    }
    return s;
  };
  const std::size_t d = selection_.columns().size();
  out << kModelMagic << ' ' << kModelVersion << '\n';
  out << "k " << k_ << '\n';
  out << "weighting " << to_string(weighting_) << '\n';
  out << "features " << selection_.to_string() << '\n';
  out << "mean " << join(mean_) << '\n';
  out << "std " << join(std_) << '\n';
  out << "rows " << labels_.size() << '\n';
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out << join(std::span<const double>(raw_).subspan(i * d, d)) << ',' << labels_[i] << '\n';
  }
  if (!out) throw std::runtime_error("model file: write failed");
}

KnnModel KnnModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("model file: empty");
  auto head = text::split(text::trim(line), ' ');
  if (head.size() != 2 || head[0] != kModelMagic) {
    throw std::invalid_argument("model file: not an rfdfar k-NN model");
  }
  if (text::parse_int(head[1]) != kModelVersion) {
    throw std::invalid_argument("model file: unsupported version " + std::string(head[1]));
  }
  KnnModel m;
  m.k_ = static_cast<int>(text::parse_int(expect_key(in, "k")));
  auto w = parse_weighting(expect_key(in, "weighting"));
  if (!w) throw std::invalid_argument("model file: unknown weighting");
  m.weighting_ = *w;
  m.selection_ = features::FeatureSelection::parse(expect_key(in, "features"));
  const std::size_t d = m.selection_.columns().size();
  if (d == 0) throw std::invalid_argument("model file: no features");
  m.mean_ = parse_doubles(expect_key(in, "mean"));
  m.std_ = parse_doubles(expect_key(in, "std"));
  if (m.mean_.size() != d || m.std_.size() != d) {
    throw std::invalid_argument("model file: normalization width does not match features");
  }
  const auto rows = text::parse_int(expect_key(in, "rows"));
  if (rows < 1) throw std::invalid_argument("model file: no training rows");
  for (long long i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) throw std::invalid_argument("model file: truncated rows");
    auto f = text::split(text::trim(line), ',');
    if (f.size() != d + 1) throw std::invalid_argument("model file: bad row width");
    for (std::size_t c = 0; c < d; ++c) m.raw_.push_back(text::parse_double(f[c]));
    m.labels_.emplace_back(text::trim(f[d]));
  }
  std::set<std::string> cls(m.labels_.begin(), m.labels_.end());
  m.classes_.assign(cls.begin(), cls.end());
  if (m.k_ < 1 || static_cast<std::size_t>(m.k_) > m.labels_.size() || m.classes_.size() < 2) {
    throw InvalidTrainingSet("model file: inconsistent k or class set");
  }
  m.build_normalized();
  return m;
}

void KnnModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  save(out);
}

KnnModel KnnModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return load(in);
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes) {
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  classes_ = std::move(classes);
  counts_.assign(classes_.size() * classes_.size(), 0);
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes,
                                 std::vector<std::vector<std::uint64_t>> counts)
    : ConfusionMatrix(classes) {
  if (classes_.size() != classes.size() || counts.size() != classes.size()) {
    throw std::invalid_argument("confusion matrix: counts must be square over distinct classes");
  }
  for (std::size_t t = 0; t < classes.size(); ++t) {
    if (counts[t].size() != classes.size()) {
      throw std::invalid_argument("confusion matrix: counts must be square");
    }
    for (std::size_t p = 0; p < classes.size(); ++p) add(classes[t], classes[p], counts[t][p]);
  }
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
  if (it == classes_.end() || *it != label) {
    throw std::invalid_argument("confusion matrix: unknown class '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - classes_.begin());
}

void ConfusionMatrix::add(std::string_view truth, std::string_view predicted, std::uint64_t n) {
  counts_[index_of(truth) * classes_.size() + index_of(predicted)] += n;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.classes_ != classes_) {
    throw std::invalid_argument("confusion matrix: cannot merge different class sets");
  }
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::uint64_t ConfusionMatrix::count(std::size_t truth, std::size_t predicted) const {
  if (truth >= classes_.size() || predicted >= classes_.size()) {
    throw std::out_of_range("confusion matrix: index out of range");
  }
  return counts_[truth * classes_.size() + predicted];
}

std::uint64_t ConfusionMatrix::total() const noexcept {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::correct() const noexcept {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < classes_.size(); ++c) s += counts_[c * classes_.size() + c];
  return s;
}

Metrics metrics(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw std::invalid_argument("metrics: empty confusion matrix");
  const std::size_t n = cm.classes().size();
  Metrics m;
  m.accuracy = static_cast<double>(cm.correct()) / static_cast<double>(total);
  for (std::size_t c = 0; c < n; ++c) {
    std::uint64_t row = 0, col = 0;
    for (std::size_t o = 0; o < n; ++o) {
      row += cm.count(c, o);
      col += cm.count(o, c);
    }
    const auto diag = static_cast<double>(cm.count(c, c));
    m.precision.push_back(col ? std::optional(diag / static_cast<double>(col)) : std::nullopt);
    m.recall.push_back(row ? std::optional(diag / static_cast<double>(row)) : std::nullopt);
  }
  return m;
}

std::vector<std::size_t> stratified_folds(const FeatureTable& table, int folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("kfold: need at least 2 folds");
  const auto classes = table.classes();
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < table.rows(); ++i) members[table.label(i)].push_back(i);
  if (table.rows() < static_cast<std::size_t>(folds)) {
    throw std::invalid_argument("kfold: " + std::to_string(table.rows()) + " rows cannot fill " +
                                std::to_string(folds) + " folds");
  }
  for (const auto& [label, rows] : members) {
    if (rows.size() < 2) {
      throw std::invalid_argument("kfold: class '" + label +
                                  "' has a single row and cannot be stratified");
    }
  }
  Rng rng(seed);
  std::vector<std::size_t> fold(table.rows());
  std::size_t next = 0;
  for (auto& [label, rows] : members) {
    shuffle(std::span<std::size_t>(rows), rng);
    for (std::size_t i : rows) fold[i] = next++ % static_cast<std::size_t>(folds);
  }
  return fold;
}

ConfusionMatrix kfold_cv(const FeatureTable& table, int folds, int k, Weighting weighting,
                         std::uint64_t seed) {
  const auto fold = stratified_folds(table, folds, seed);
  const auto nf = static_cast<std::size_t>(folds);
  std::vector<ConfusionMatrix> parts(nf, ConfusionMatrix(table.classes()));
  parallel_for(nf, [&](std::size_t f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? test : train).push_back(i);
    const auto model = KnnModel::fit(table.subset(train), k, weighting);
    const auto held = table.subset(test);
    const auto pred = model.predict_table(held);
    for (std::size_t i = 0; i < held.rows(); ++i) parts[f].add(held.label(i), pred[i]);
  });
  ConfusionMatrix cm(table.classes());
  for (const auto& p : parts) cm.merge(p);
  return cm;
}

double LosoResult::mean_accuracy() const noexcept {
  if (per_subject.empty()) return 0.0;
  double s = 0.0;
  for (const auto& p : per_subject) s += p.accuracy;
  return s / static_cast<double>(per_subject.size());
}

LosoResult loso_cv(const FeatureTable& table, int k, Weighting weighting) {
  if (!table.has_subjects()) throw std::invalid_argument("loso: every row needs a subject id");
  const auto subjects = table.subject_ids();
  if (subjects.size() < 2) throw std::invalid_argument("loso: need at least 2 subjects");
  LosoResult res;
  res.per_subject.resize(subjects.size());
  std::vector<ConfusionMatrix> parts(subjects.size(), ConfusionMatrix(table.classes()));
  parallel_for(subjects.size(), [&](std::size_t s) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < table.rows(); ++i) {
      (table.subject(i) == subjects[s] ? test : train).push_back(i);
    }
    const auto model = KnnModel::fit(table.subset(train), k, weighting);
    const auto held = table.subset(test);
    const auto pred = model.predict_table(held);
    for (std::size_t i = 0; i < held.rows(); ++i) parts[s].add(held.label(i), pred[i]);
    res.per_subject[s] = {subjects[s], metrics(parts[s]).accuracy, held.rows()};
  });
  res.pooled = ConfusionMatrix(table.classes());
  for (const auto& p : parts) res.pooled.merge(p);
  return res;
}

void write_confusion_csv(std::ostream& out, const ConfusionMatrix& cm) {
  out << "truth\\predicted";
  for (const auto& c : cm.classes()) out << ',' << c;
  out << '\n';
  for (std::size_t t = 0; t < cm.classes().size(); ++t) {
    out << cm.classes()[t];
    for (std::size_t p = 0; p < cm.classes().size(); ++p) out << ',' << cm.count(t, p);
    out << '\n';
  }
}

}  // namespace rfdfar::knn
