#include "rfdfar/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rfdfar/channel.hpp"
#include "rfdfar/log.hpp"
#include "rfdfar/parallel.hpp"
#include "rfdfar/preprocess.hpp"
#include "rfdfar/text.hpp"

#ifndef RFDFAR_VERSION
#define RFDFAR_VERSION "0.0.0"
#endif

namespace rfdfar::eval {

using features::FeatureTable;

namespace {

constexpr std::string_view kReportBanner = "# rfdfar sweep report";
constexpr std::string_view kReportColumns =
    "snr_db,distance_m,gesture_set,windows,accuracy,precision,recall";

std::string join_doubles(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += text::format_double(v[i]);
  }
  return s;
}

std::vector<double> parse_doubles(std::string_view s) {
  std::vector<double> out;
  if (text::trim(s).empty()) return out;
  for (auto part : text::split(s, ',')) out.push_back(text::parse_double(text::trim(part)));
  return out;
}

int parse_positive(std::string_view key, std::string_view value) {
  const auto v = text::parse_int(value);
  if (v < 1 || v > 1'000'000'000) {
    throw std::invalid_argument(std::string(key) + " must be a positive integer");
  }
  return static_cast<int>(v);
}

std::string format_optional(const std::optional<double>& v) {
  return v ? text::format_double(*v) : std::string("NA");
}

std::optional<double> parse_optional(std::string_view s) {
  if (s == "NA") return std::nullopt;
  return text::parse_double(s);
}

std::string format_class_scores(const std::vector<ClassScore>& cs, bool precision) {
  std::string s;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i) s += ';';
    s += cs[i].label + ':' + format_optional(precision ? cs[i].precision : cs[i].recall);
  }
  return s;
}

std::vector<std::pair<std::string, std::optional<double>>> parse_class_scores(
    std::string_view s) {
  std::vector<std::pair<std::string, std::optional<double>>> out;
  for (auto part : text::split(s, ';')) {
    auto colon = part.find(':');
    if (colon == std::string_view::npos) {
      throw std::invalid_argument("report: malformed class score '" + std::string(part) + "'");
    }
    out.emplace_back(std::string(part.substr(0, colon)), parse_optional(part.substr(colon + 1)));
  }
  return out;
}

std::string cell_name(SnrDb snr, GestureLabel g) {
  return "snr=" + text::format_double(snr.value()) + " gesture=" + std::string(to_string(g));
}

}  // namespace

std::string_view version() noexcept { return RFDFAR_VERSION; }

std::string gesture_set_name(const GestureSet& set) {
  std::string s;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) s += '+';
    s += to_string(set[i]);
  }
  return s;
}

GestureSet parse_gesture_set(std::string_view name) {
  GestureSet set;
  for (auto part : text::split(text::trim(name), '+')) {
    auto g = parse_gesture(text::trim(part));
    if (!g) throw std::invalid_argument("unknown gesture '" + std::string(part) + "'");
    if (std::find(set.begin(), set.end(), *g) != set.end()) {
      throw std::invalid_argument("gesture '" + std::string(part) + "' repeated in set");
    }
    set.push_back(*g);
  }
  if (set.size() < 2) throw std::invalid_argument("a gesture set needs at least 2 gestures");
  return set;
}

FeatureTable gesture_table(const channel::GestureEnvelopeSpec& preset, SnrDb snr,
                           const PipelineParams& params, std::uint64_t seed,
                           std::optional<double> distance_m, double footprint,
                           features::LabelKind labels) {
  if (params.subjects < 1 || params.repetitions < 1) {
    throw std::invalid_argument("pipeline: subjects and repetitions must be >= 1");
  }
  const auto reps = static_cast<std::size_t>(params.repetitions);
  const std::size_t n = static_cast<std::size_t>(params.subjects) * reps;
  std::vector<FeatureTable> parts(n, FeatureTable(params.features));
  parallel_for(n, [&](std::size_t i) {
    const int subject = static_cast<int>(i / reps);
    const int rep = static_cast<int>(i % reps);
    auto spec = channel::subject_variant(preset, subject, seed, params.subject_spread);
    spec = channel::scale_footprint(spec, footprint);
    channel::ChannelConfig cfg;
    cfg.sample_rate_hz = params.sample_rate_hz;
    cfg.tone_hz = params.tone_hz;
    cfg.subject = subject;
    cfg.distance_m = distance_m;
    const Trace raw = channel::simulate_trace(spec, rep, params.duration_s, snr, seed, cfg);
    const Trace clean = dsp::denoise(raw, params.levels, params.smooth_len);
    parts[i] = features::featurize_dataset(std::span(&clean, 1), params.window_size,
                                           params.features, labels);
  });
  FeatureTable out(params.features);
  for (const auto& p : parts) out.append(p);
  return out;
}

void SweepSpec::validate() const {
  if (environment ? distances.empty() : snr_grid.empty()) {
    throw std::invalid_argument("sweep: empty SNR grid");
  }
  if (gesture_sets.empty()) throw std::invalid_argument("sweep: no gesture sets");
  for (const auto& set : gesture_sets) {
    if (set.size() < 2) throw std::invalid_argument("sweep: gesture sets need 2+ gestures");
  }
  if (folds < 2) throw std::invalid_argument("sweep: folds must be >= 2");
  if (k < 1) throw std::invalid_argument("sweep: k must be >= 1");
  if (pipeline.features.empty()) throw std::invalid_argument("sweep: empty feature selection");
  if (!(pipeline.duration_s > 0.0)) throw std::invalid_argument("sweep: duration must be > 0");
  if (pipeline.window_size < 2) throw std::invalid_argument("sweep: window_size must be >= 2");
  const auto samples =
      static_cast<std::size_t>(std::llround(pipeline.duration_s * pipeline.sample_rate_hz));
  const std::size_t per_class = static_cast<std::size_t>(pipeline.subjects) *
                                static_cast<std::size_t>(pipeline.repetitions) *
                                (samples / pipeline.window_size);
  if (per_class < static_cast<std::size_t>(folds)) {
    throw std::invalid_argument("sweep: " + std::to_string(per_class) +
                                " windows per class cannot fill " + std::to_string(folds) +
                                " folds");
  }
}

std::vector<std::pair<SnrDb, std::optional<double>>> SweepSpec::grid() const {
  std::vector<std::pair<SnrDb, std::optional<double>>> out;
  if (environment) {
    const auto& profile = channel::environment_profile(*environment);
    for (double d : distances) out.emplace_back(channel::environment_snr(profile, d), d);
  } else {
    for (auto s : snr_grid) out.emplace_back(s, std::nullopt);
  }
  return out;
}

SweepSpec parse_sweep_spec(std::istream& in) {
  SweepSpec spec;
  std::set<std::string> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = text::trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("spec line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key(text::trim(body.substr(0, eq)));
    const auto value = text::trim(body.substr(eq + 1));
    if (!seen.insert(key).second) {
      throw std::invalid_argument("spec line " + std::to_string(lineno) + ": duplicate key '" +
                                  key + "'");
    }
    try {
      auto& p = spec.pipeline;
      if (key == "snr_grid") {
        spec.snr_grid.clear();
        for (double v : parse_doubles(value)) {
          spec.snr_grid.push_back(v == std::numeric_limits<double>::infinity() ? SnrDb::noiseless()
                                                                             : SnrDb(v));
        }
      } else if (key == "gesture_sets") {
        spec.gesture_sets.clear();
        for (auto part : text::split(value, ';')) {
          spec.gesture_sets.push_back(parse_gesture_set(part));
        }
      } else if (key == "repetitions") {
        p.repetitions = parse_positive(key, value);
      } else if (key == "subjects") {
        p.subjects = parse_positive(key, value);
      } else if (key == "duration_s") {
        p.duration_s = text::parse_double(value);
      } else if (key == "subject_spread") {
        p.subject_spread = text::parse_double(value);
      } else if (key == "window_size") {
        p.window_size = static_cast<std::size_t>(parse_positive(key, value));
      } else if (key == "levels") {
        p.levels = parse_positive(key, value);
      } else if (key == "smooth_len") {
        p.smooth_len = static_cast<std::size_t>(parse_positive(key, value));
      } else if (key == "features") {
        p.features = features::FeatureSelection::parse(value);
      } else if (key == "sample_rate_hz") {
        p.sample_rate_hz = text::parse_double(value);
      } else if (key == "tone_hz") {
        p.tone_hz = text::parse_double(value);
      } else if (key == "folds") {
        spec.folds = parse_positive(key, value);
      } else if (key == "k") {
        spec.k = parse_positive(key, value);
      } else if (key == "weighting") {
        auto w = knn::parse_weighting(value);
        if (!w) throw std::invalid_argument("unknown weighting '" + std::string(value) + "'");
        spec.weighting = *w;
      } else if (key == "seed") {
        const auto v = text::parse_int(value);
        if (v < 0) throw std::invalid_argument("seed must be non-negative");
        spec.seed = static_cast<std::uint64_t>(v);
      } else if (key == "environment") {
        if (value.empty() || value == "none") {
          spec.environment.reset();
        } else {
          auto e = channel::parse_environment(value);
          if (!e) throw std::invalid_argument("unknown environment '" + std::string(value) + "'");
          spec.environment = *e;
        }
      } else if (key == "distances") {
        spec.distances = parse_doubles(value);
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("spec line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  spec.validate();
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return parse_sweep_spec(in);
}

void write_sweep_spec(std::ostream& out, const SweepSpec& spec) {
  std::vector<double> grid;
  for (auto s : spec.snr_grid) grid.push_back(s.value());
  std::string sets;
  for (std::size_t i = 0; i < spec.gesture_sets.size(); ++i) {
    if (i) sets += ';';
    sets += gesture_set_name(spec.gesture_sets[i]);
  }
  const auto& p = spec.pipeline;
  out << "snr_grid=" << join_doubles(grid) << '\n'
      << "gesture_sets=" << sets << '\n'
      << "repetitions=" << p.repetitions << '\n'
      << "subjects=" << p.subjects << '\n'
      << "duration_s=" << text::format_double(p.duration_s) << '\n'
      << "subject_spread=" << text::format_double(p.subject_spread) << '\n'
      << "window_size=" << p.window_size << '\n'
      << "levels=" << p.levels << '\n'
      << "smooth_len=" << p.smooth_len << '\n'
      << "features=" << p.features.to_string() << '\n'
      << "sample_rate_hz=" << text::format_double(p.sample_rate_hz) << '\n'
      << "tone_hz=" << text::format_double(p.tone_hz) << '\n'
      << "folds=" << spec.folds << '\n'
      << "k=" << spec.k << '\n'
      << "weighting=" << knn::to_string(spec.weighting) << '\n'
      << "seed=" << spec.seed << '\n'
      << "environment=" << (spec.environment ? channel::to_string(*spec.environment) : "none")
      << '\n'
      << "distances=" << join_doubles(spec.distances) << '\n';
}

const SweepRow* SweepReport::find(double snr_db, std::string_view gesture_set) const {
  for (const auto& r : rows) {
    if (r.snr_db == snr_db && r.gesture_set == gesture_set) return &r;
  }
  return nullptr;
}

SweepReport run_sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<GestureLabel> gestures;
  for (const auto& set : spec.gesture_sets) {
    for (auto g : set) {
      if (std::find(gestures.begin(), gestures.end(), g) == gestures.end()) gestures.push_back(g);
    }
  }
  const auto grid = spec.grid();

  SweepReport report;
  report.spec = spec;
  report.tool_version = std::string(version());
  for (const auto& [snr, distance] : grid) {
    std::map<GestureLabel, FeatureTable> tables;
    for (auto g : gestures) {
      try {
        tables.emplace(g, gesture_table(channel::preset_envelope(g), snr, spec.pipeline,
                                        spec.seed, distance));
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("sweep cell " + cell_name(snr, g) + ": " + e.what());
      } catch (const std::exception& e) {
        throw std::runtime_error("sweep cell " + cell_name(snr, g) + ": " + e.what());
      }
    }
    for (const auto& set : spec.gesture_sets) {
      FeatureTable table(spec.pipeline.features);
      for (auto g : set) table.append(tables.at(g));
      const auto name = gesture_set_name(set);
      knn::ConfusionMatrix cm;
      try {
        cm = knn::kfold_cv(table, spec.folds, spec.k, spec.weighting, spec.seed);
      } catch (const std::exception& e) {
        throw std::runtime_error("sweep cell snr=" + text::format_double(snr.value()) +
                                 " set=" + name + ": " + e.what());
      }
      const auto m = knn::metrics(cm);
      SweepRow row;
      row.snr_db = snr.value();
      row.distance_m = distance;
      row.gesture_set = name;
      row.windows = cm.total();
      row.accuracy = m.accuracy;
      for (std::size_t c = 0; c < cm.classes().size(); ++c) {
        row.classes.push_back({cm.classes()[c], m.precision[c], m.recall[c]});
      }
      log::info("sweep " + name + " @ " + text::format_double(row.snr_db) +
                " dB: accuracy " + text::format_double(row.accuracy));
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

void write_report(std::ostream& out, const SweepReport& report) {
  out << kReportBanner << '\n';
  out << "# tool_version=" << report.tool_version << '\n';
  std::ostringstream spec;
  write_sweep_spec(spec, report.spec);
  std::istringstream lines(spec.str());
  for (std::string line; std::getline(lines, line);) out << "# " << line << '\n';
  out << kReportColumns << '\n';
  for (const auto& r : report.rows) {
    out << text::format_double(r.snr_db) << ','
        << (r.distance_m ? text::format_double(*r.distance_m) : std::string()) << ','
        << r.gesture_set << ',' << r.windows << ',' << text::format_double(r.accuracy) << ','
        << format_class_scores(r.classes, true) << ',' << format_class_scores(r.classes, false)
        << '\n';
  }
  if (!out) throw std::runtime_error("report: write failed");
}

void write_report(const std::filesystem::path& path, const SweepReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  write_report(out, report);
  out.close();
  if (!out) throw std::runtime_error("report: failed writing '" + path.string() + "'");
}

SweepReport read_report(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kReportBanner) {
    throw std::invalid_argument("report: missing banner line");
  }
  SweepReport report;
  std::ostringstream spec_text;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      auto kv = std::string_view(line).substr(2);
      if (kv.rfind("tool_version=", 0) == 0) {
        report.tool_version = std::string(kv.substr(13));
      } else {
        spec_text << kv << '\n';
      }
      continue;
    }
    if (line != kReportColumns) throw std::invalid_argument("report: bad column header");
    header_seen = true;
    break;
  }
  if (!header_seen) throw std::invalid_argument("report: missing column header");
  std::istringstream spec_in(spec_text.str());
  report.spec = parse_sweep_spec(spec_in);

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = text::split(line, ',');
    if (f.size() != 7) throw std::invalid_argument("report: expected 7 fields");
    SweepRow r;
    r.snr_db = text::parse_double(f[0]);
    if (!f[1].empty()) r.distance_m = text::parse_double(f[1]);
    r.gesture_set = std::string(f[2]);
    r.windows = static_cast<std::uint64_t>(text::parse_int(f[3]));
    r.accuracy = text::parse_double(f[4]);
    auto prec = parse_class_scores(f[5]);
    auto rec = parse_class_scores(f[6]);
    if (prec.size() != rec.size()) throw std::invalid_argument("report: class list mismatch");
    for (std::size_t c = 0; c < prec.size(); ++c) {
      if (prec[c].first != rec[c].first) throw std::invalid_argument("report: class mismatch");
      r.classes.push_back({prec[c].first, prec[c].second, rec[c].second});
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

std::string_view to_string(Scenario s) noexcept {
  switch (s) {
    case Scenario::Driving: return "driving";
    case Scenario::Conversation2m: return "conversation2m";
    case Scenario::Conversation5m: return "conversation5m";
  }
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (auto s : {Scenario::Driving, Scenario::Conversation2m, Scenario::Conversation5m}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown scenario '" + std::string(name) +
                              "' (expected driving, conversation2m or conversation5m)");
}

ScenarioSpec default_scenario_spec(Scenario s) {
  ScenarioSpec spec;
  spec.pipeline.subjects = 5;
  switch (s) {
    case Scenario::Driving:
      spec.snr = SnrDb(59);
      spec.pipeline.repetitions = 4;
      spec.pipeline.duration_s = 3.0;
      spec.pipeline.subject_spread = 0.2;
      break;
    case Scenario::Conversation2m:
    case Scenario::Conversation5m:
      spec.snr = SnrDb(42);
      spec.distance_m = s == Scenario::Conversation2m ? 2.0 : 5.0;
      spec.footprint = s == Scenario::Conversation2m ? 1.0 : 0.8;
      spec.pipeline.repetitions = 2;
      spec.pipeline.duration_s = 3.0;
      spec.pipeline.subject_spread = 0.2;
      break;
  }
  return spec;
}

ScenarioReport run_scenario(Scenario s, const ScenarioSpec& spec) {
  const bool driving = s == Scenario::Driving;
  const auto neutral = driving ? GestureLabel::NeutralDriving : GestureLabel::NeutralConversation;
  const auto angry = driving ? GestureLabel::AngryDriving : GestureLabel::AngryConversation;

  FeatureTable table(spec.pipeline.features);
  for (auto g : {neutral, angry}) {
    table.append(gesture_table(channel::preset_envelope(g), spec.snr, spec.pipeline, spec.seed,
                               spec.distance_m, spec.footprint, features::LabelKind::Emotion));
  }

  ScenarioReport r;
  r.scenario = s;
  r.spec = spec;
  r.confusion = knn::kfold_cv(table, spec.folds, spec.k, spec.weighting, spec.seed);
  r.kfold_pooled = knn::metrics(r.confusion).accuracy;

  for (const auto& subject : table.subject_ids()) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < table.rows(); ++i) {
      if (table.subject(i) == subject) idx.push_back(i);
    }
    const auto own = table.subset(idx);
    const auto cm = knn::kfold_cv(own, spec.folds, spec.k, spec.weighting, spec.seed);
    r.individual.push_back({subject, knn::metrics(cm).accuracy, own.rows()});
  }
  double sum = 0.0;
  for (const auto& i : r.individual) sum += i.accuracy;
  r.kfold_individual = sum / static_cast<double>(r.individual.size());

  r.loso = knn::loso_cv(table, spec.k, spec.weighting);
  return r;
}

ScenarioReport run_scenario(Scenario s) { return run_scenario(s, default_scenario_spec(s)); }

void write_scenario_report(std::ostream& out, const ScenarioReport& r) {
  out << "# rfdfar scenario report\n"
      << "# tool_version=" << version() << '\n'
      << "# scenario=" << to_string(r.scenario) << '\n'
      << "# snr_db=" << text::format_double(r.spec.snr.value()) << '\n'
      << "# distance_m=" << text::format_double(r.spec.distance_m) << '\n'
      << "# footprint=" << text::format_double(r.spec.footprint) << '\n'
      << "# subjects=" << r.spec.pipeline.subjects << '\n'
      << "# repetitions=" << r.spec.pipeline.repetitions << '\n'
      << "# duration_s=" << text::format_double(r.spec.pipeline.duration_s) << '\n'
      << "# subject_spread=" << text::format_double(r.spec.pipeline.subject_spread) << '\n'
      << "# folds=" << r.spec.folds << '\n'
      << "# k=" << r.spec.k << '\n'
      << "# weighting=" << knn::to_string(r.spec.weighting) << '\n'
      << "# seed=" << r.spec.seed << '\n'
      << "metric,value\n"
      << "kfold_pooled," << text::format_double(r.kfold_pooled) << '\n'
      << "kfold_individual," << text::format_double(r.kfold_individual) << '\n'
      << "loso_mean," << text::format_double(r.loso.mean_accuracy()) << '\n'
      << "loso_pooled," << text::format_double(knn::metrics(r.loso.pooled).accuracy) << '\n';
  for (const auto& i : r.individual) {
    out << "kfold_individual:" << i.subject << ',' << text::format_double(i.accuracy) << '\n';
  }
  for (const auto& i : r.loso.per_subject) {
    out << "loso:" << i.subject << ',' << text::format_double(i.accuracy) << '\n';
  }
}

}  // namespace rfdfar::eval
