#include "rfdfar/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include "rfdfar/emotion.hpp"
#include "rfdfar/text.hpp"

namespace rfdfar::features {
namespace {

constexpr std::array kAllFeatures{Feature::Mean, Feature::Std, Feature::Entropy,
                                  Feature::ZeroCrossings, Feature::AvgDerivative};

}  // namespace

std::string_view to_string(Feature f) noexcept {
  switch (f) {
    case Feature::Mean: return "mean";
    case Feature::Std: return "std";
    case Feature::Entropy: return "entropy";
    case Feature::ZeroCrossings: return "zero_crossings";
    case Feature::AvgDerivative: return "avg_derivative";
  }
  return "unknown";
}

std::optional<Feature> parse_feature(std::string_view name) noexcept {
  for (Feature f : kAllFeatures) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

FeatureSelection::FeatureSelection(std::initializer_list<Feature> fs) {
  for (Feature f : fs) add(f);
}

FeatureSelection FeatureSelection::all() {
  FeatureSelection s;
  for (Feature f : kAllFeatures) s.add(f);
  return s;
}

FeatureSelection FeatureSelection::mean_std() { return {Feature::Mean, Feature::Std}; }

FeatureSelection FeatureSelection::parse(std::string_view list) {
  list = text::trim(list);
  if (list == "all") return all();
  FeatureSelection s;
  if (list.empty()) return s;
  for (auto part : text::split(list, ',')) {
    auto f = parse_feature(text::trim(part));
    if (!f) throw std::invalid_argument("unknown feature '" + std::string(part) + "'");
    s.add(*f);
  }
  return s;
}

void FeatureSelection::add(Feature f) {
  if (contains(f)) return;
  columns_.push_back(f);
  std::sort(columns_.begin(), columns_.end());
}

bool FeatureSelection::contains(Feature f) const noexcept {
  return std::find(columns_.begin(), columns_.end(), f) != columns_.end();
}

std::string FeatureSelection::to_string() const {
  std::string out;
  for (Feature f : columns_) {
    if (!out.empty()) out += ',';
    out += features::to_string(f);
  }
  return out;
}

double FeatureVector::value(Feature f) const noexcept {
  switch (f) {
    case Feature::Mean: return mean;
    case Feature::Std: return std;
    case Feature::Entropy: return entropy;
    case Feature::ZeroCrossings: return static_cast<double>(zero_crossings);
    case Feature::AvgDerivative: return avg_derivative;
  }
  return 0.0;
}

std::vector<Window> window_trace(const Trace& trace, std::size_t size) {
  if (size < 2) throw std::invalid_argument("window_trace: window size must be >= 2");
  std::vector<Window> out;
  const std::size_t count = trace.size() / size;
  out.reserve(count);
  std::span<const double> all(trace.samples);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({all.subspan(i * size, size), i, trace.meta});
  }
  return out;
}

FeatureVector compute_features(const Window& w) {
  FeatureVector fv;
  if (w.source_meta.gesture) fv.label = std::string(rfdfar::to_string(*w.source_meta.gesture));
  if (w.source_meta.subject) fv.subject_id = subject_id(*w.source_meta.subject);

  const auto x = w.samples;
  const std::size_t n = x.size();
  if (n == 0) throw std::invalid_argument("compute_features: empty window");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("compute_features: non-finite sample");
  }
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) {
    fv.mean = lo;
    return fv;
  }

  long double sum = 0.0L;
  for (double v : x) sum += v;
  const double mean = static_cast<double>(sum / n);
  fv.mean = mean;

  long double sq = 0.0L;
  for (double v : x) sq += static_cast<long double>(v - mean) * (v - mean);
  fv.std = std::sqrt(static_cast<double>(sq / n));

  std::array<std::size_t, kEntropyBins> hist{};
  const double scale = static_cast<double>(kEntropyBins) / (hi - lo);
  for (double v : x) {
    auto b = static_cast<std::size_t>((v - lo) * scale);
    hist[std::min(b, kEntropyBins - 1)]++;
  }
  double entropy = 0.0;
  for (std::size_t c : hist) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(n);
    entropy -= p * std::log2(p);
  }
  fv.entropy = std::max(0.0, entropy);

  // Sign changes of the mean-removed signal; exact zeros carry the previous sign.
  int last_sign = 0;
  for (double v : x) {
    const double c = v - mean;
    const int s = (c > 0.0) - (c < 0.0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++fv.zero_crossings;
    last_sign = s;
  }

  long double deriv = 0.0L;
  for (std::size_t i = 1; i < n; ++i) deriv += std::abs(x[i] - x[i - 1]);
  fv.avg_derivative = n > 1 ? static_cast<double>(deriv / (n - 1)) : 0.0;
  return fv;
}

FeatureTable::FeatureTable(FeatureSelection columns) : selection_(std::move(columns)) {
  if (selection_.empty()) throw std::invalid_argument("feature table: empty feature selection");
}

std::span<const double> FeatureTable::row(std::size_t i) const {
  if (i >= rows()) throw std::out_of_range("feature table: row out of range");
  return std::span<const double>(values_).subspan(i * dims(), dims());
}

bool FeatureTable::has_subjects() const noexcept {
  return !subjects_.empty() &&
         std::all_of(subjects_.begin(), subjects_.end(), [](const auto& s) { return !s.empty(); });
}

void FeatureTable::add_row(std::span<const double> values, std::string label, std::string subject) {
  if (values.size() != dims()) throw std::invalid_argument("feature table: row width mismatch");
  values_.insert(values_.end(), values.begin(), values.end());
  labels_.push_back(std::move(label));
  subjects_.push_back(std::move(subject));
}

void FeatureTable::add(const FeatureVector& fv) {
  std::vector<double> values;
  values.reserve(dims());
  for (Feature f : selection_.columns()) values.push_back(fv.value(f));
  add_row(values, fv.label, fv.subject_id.value_or(""));
}

void FeatureTable::append(const FeatureTable& other) {
  if (!(other.selection_ == selection_)) {
    throw std::invalid_argument("feature table: cannot append tables with different columns");
  }
  values_.insert(values_.end(), other.values_.begin(), other.values_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
  subjects_.insert(subjects_.end(), other.subjects_.begin(), other.subjects_.end());
}

FeatureTable FeatureTable::subset(std::span<const std::size_t> indices) const {
  FeatureTable out(selection_);
  for (std::size_t i : indices) out.add_row(row(i), labels_.at(i), subjects_.at(i));
  return out;
}

std::vector<std::string> FeatureTable::classes() const {
  std::set<std::string> s(labels_.begin(), labels_.end());
  return {s.begin(), s.end()};
}

std::vector<std::string> FeatureTable::subject_ids() const {
  std::set<std::string> s;
  for (const auto& id : subjects_) {
    if (!id.empty()) s.insert(id);
  }
  return {s.begin(), s.end()};
}

FeatureTable featurize_dataset(std::span<const Trace> traces, std::size_t size,
                               const FeatureSelection& selected, LabelKind labels) {
  if (selected.empty()) throw std::invalid_argument("featurize_dataset: empty feature selection");
  if (traces.empty()) throw std::invalid_argument("featurize_dataset: no traces");
  const double rate = traces.front().sample_rate;
  for (const auto& t : traces) {
    if (t.sample_rate != rate) {
      throw std::invalid_argument("featurize_dataset: mixed sample rates");
    }
  }
  FeatureTable table(selected);
  for (const auto& t : traces) {
    for (const auto& w : window_trace(t, size)) {
      FeatureVector fv = compute_features(w);
      if (labels == LabelKind::Emotion && t.meta.gesture) {
        fv.label = std::string(emotion::to_string(emotion::map_gesture(*t.meta.gesture)));
      }
      table.add(fv);
    }
  }
  return table;
}

void write_table_csv(std::ostream& out, const FeatureTable& table) {
  for (Feature f : table.selection().columns()) out << to_string(f) << ',';
  out << "label,subject_id\n";
  const auto cols = table.selection().columns();
  for (std::size_t i = 0; i < table.rows(); ++i) {
    auto r = table.row(i);
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (cols[c] == Feature::ZeroCrossings) {
        out << static_cast<unsigned long long>(r[c]) << ',';
      } else {
        out << text::format_double(r[c]) << ',';
      }
    }
    out << table.label(i) << ',' << table.subject(i) << '\n';
  }
  if (!out) throw std::runtime_error("feature csv: write failed");
}

FeatureTable read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("feature csv: missing header");
  auto header = text::split(text::trim(line), ',');
  FeatureSelection sel;
  std::vector<Feature> order;
  std::optional<std::size_t> label_col, subject_col;
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto name = text::trim(header[c]);
    if (name == "label") {
      label_col = c;
    } else if (name == "subject_id") {
      subject_col = c;
    } else if (auto f = parse_feature(name)) {
      sel.add(*f);
      order.push_back(*f);
    } else {
      throw std::invalid_argument("feature csv: unknown column '" + std::string(name) + "'");
    }
  }
  if (!label_col) throw std::invalid_argument("feature csv: missing label column");
  FeatureTable table(sel);
  const auto cols = sel.columns();
  std::vector<double> values(cols.size());
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(text::trim(line), ',');
    if (fields.size() != header.size()) {
      throw std::invalid_argument("feature csv line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(header.size()) + " fields");
    }
    std::size_t fi = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (c == *label_col || (subject_col && c == *subject_col)) continue;
      auto pos = std::find(cols.begin(), cols.end(), order[fi++]) - cols.begin();
      values[static_cast<std::size_t>(pos)] = text::parse_double(fields[c]);
    }
    table.add_row(values, std::string(text::trim(fields[*label_col])),
                  subject_col ? std::string(text::trim(fields[*subject_col])) : std::string());
  }
  return table;
}

}  // namespace rfdfar::features
