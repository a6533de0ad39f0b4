#include "rfdfar_cli/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "rfdfar/channel.hpp"
#include "rfdfar/emotion.hpp"
#include "rfdfar/eval.hpp"
#include "rfdfar/features.hpp"
#include "rfdfar/knn.hpp"
#include "rfdfar/log.hpp"
#include "rfdfar/preprocess.hpp"
#include "rfdfar/text.hpp"
#include "rfdfar/trace_io.hpp"

namespace rfdfar::cli {
namespace {

struct Common {
  std::uint64_t seed = 42;
  std::string out;
  std::string format = "csv";
  bool verbose = false;
};

// Runtime failure with a message for stderr; maps to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback, bool binary = false) {
    if (path.empty() || path == "-") {
      stream_ = &fallback;
      return;
    }
    file_.open(path, binary ? std::ios::binary : std::ios::out);
    if (!file_) throw DataError("cannot open '" + path + "' for writing");
    stream_ = &file_;
  }
  std::ostream& get() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw DataError("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return in;
}

features::FeatureTable read_tables(const std::vector<std::string>& paths) {
  std::optional<features::FeatureTable> all;
  for (const auto& p : paths) {
    auto in = open_input(p);
    auto t = features::read_table_csv(in);
    if (all) {
      all->append(t);
    } else {
      all = std::move(t);
    }
  }
  if (!all) throw DataError("no feature tables given");
  return *all;
}

void write_trace_out(const Trace& t, const Common& c, std::ostream& out) {
  const auto fmt = io::parse_trace_format(c.format);
  if (fmt == io::TraceFormat::Binary) {
    if (c.out.empty() || c.out == "-") throw DataError("binary output needs --out <file>");
    io::write_trace(c.out, t, fmt);
    return;
  }
  Output o(c.out, out);
  io::write_trace_csv(o.get(), t);
  o.finish();
}

std::string percent(double v) { return text::format_double(std::round(v * 10000.0) / 100.0); }

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Device-free gesture and emotion recognition from simulated RF amplitude traces",
               "rfdfar"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(eval::version()));

  Common common;
  app.add_option("--seed", common.seed, "Master seed for every random stage")
      ->capture_default_str();
  app.add_option("--out", common.out, "Output path (stdout when omitted, CSV only)");
  app.add_option("--format", common.format, "Trace output format")
      ->check(CLI::IsMember({"csv", "binary"}))
      ->capture_default_str();
  app.add_flag("--verbose,-v", common.verbose, "Log progress to stderr");

  std::function<void()> action;

  // simulate
  auto* sim = app.add_subcommand("simulate", "Synthesize one received trace");
  std::string sim_gesture;
  double sim_snr = std::numeric_limits<double>::infinity();
  std::optional<std::string> sim_env;
  std::optional<double> sim_distance;
  double sim_duration = 1.0, sim_rate = 1.0e6, sim_tone = 1.0e5, sim_spread = 0.15;
  double sim_footprint = 1.0;
  int sim_rep = 0;
  std::optional<int> sim_subject;
  bool sim_raw = false, sim_countable = false;
  sim->add_option("--gesture", sim_gesture, "Gesture label")
      ->required()
      ->check([](const std::string& s) {
        return parse_gesture(s) ? std::string() : "unknown gesture '" + s + "'";
      });
  auto* snr_opt = sim->add_option("--snr", sim_snr, "Target SNR in dB (default: noiseless)");
  sim->add_option("--environment", sim_env, "Take the SNR from an environment profile")
      ->check(CLI::IsMember({"cafe", "outdoor", "office", "corridor", "mall"}))
      ->excludes(snr_opt);
  sim->add_option("--distance", sim_distance, "Distance in metres (with --environment)");
  sim->add_option("--duration", sim_duration, "Seconds")->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim->add_option("--rep", sim_rep, "Repetition index")->check(CLI::NonNegativeNumber);
  sim->add_option("--subject", sim_subject, "Simulated subject index")
      ->check(CLI::NonNegativeNumber);
  sim->add_option("--spread", sim_spread, "Per-subject parameter spread")->capture_default_str();
  sim->add_option("--footprint", sim_footprint, "Scale of the gesture's attenuation depth")
      ->capture_default_str();
  sim->add_option("--sample-rate", sim_rate, "Hz")->capture_default_str();
  sim->add_option("--tone", sim_tone, "Tone frequency in Hz")->capture_default_str();
  sim->add_flag("--raw", sim_raw, "Emit the received tone instead of its envelope");
  sim->add_flag("--countable", sim_countable, "Use the deep clap preset for event counting");
  sim->callback([&] {
    action = [&] {
      auto g = *parse_gesture(sim_gesture);
      auto spec = sim_countable && g == GestureLabel::Clapping ? channel::countable_clap_preset()
                                                               : channel::preset_envelope(g);
      if (sim_subject) spec = channel::subject_variant(spec, *sim_subject, common.seed, sim_spread);
      spec = channel::scale_footprint(spec, sim_footprint);
      SnrDb snr = std::isinf(sim_snr) ? SnrDb::noiseless() : SnrDb(sim_snr);
      if (sim_env) {
        if (!sim_distance) throw CLI::ValidationError("--environment needs --distance");
        snr = channel::environment_snr(
            channel::environment_profile(*channel::parse_environment(*sim_env)), *sim_distance);
      }
      channel::ChannelConfig cfg;
      cfg.sample_rate_hz = sim_rate;
      cfg.tone_hz = sim_tone;
      cfg.envelope_detection = !sim_raw;
      cfg.subject = sim_subject;
      cfg.distance_m = sim_distance;
      write_trace_out(channel::simulate_trace(spec, sim_rep, sim_duration, snr, common.seed, cfg),
                      common, out);
    };
  });

  // denoise
  auto* den = app.add_subcommand("denoise", "Haar DWT + SURE shrinkage + moving average");
  std::string den_in;
  int den_levels = dsp::kDefaultLevels;
  std::size_t den_smooth = dsp::kDefaultSmoothLen;
  den->add_option("--in", den_in, "Input trace (CSV or binary)")->required();
  den->add_option("--levels", den_levels, "Decomposition depth")->check(CLI::PositiveNumber)
      ->capture_default_str();
  den->add_option("--smooth", den_smooth, "Moving-average length in samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  den->callback([&] {
    action = [&] { write_trace_out(dsp::denoise(io::read_trace(den_in), den_levels, den_smooth),
                                   common, out); };
  });

  // featurize
  auto* fea = app.add_subcommand("featurize", "Window traces and compute features");
  std::vector<std::string> fea_in;
  std::size_t fea_window = features::kDefaultWindow;
  std::string fea_features = "mean,std", fea_labels = "gesture";
  fea->add_option("--in", fea_in, "Input traces")->required();
  fea->add_option("--window", fea_window, "Window size in samples")->capture_default_str();
  fea->add_option("--features", fea_features, "Comma list or 'all'")->capture_default_str();
  fea->add_option("--labels", fea_labels, "Row label kind")
      ->check(CLI::IsMember({"gesture", "emotion"}))
      ->capture_default_str();
  fea->callback([&] {
    action = [&] {
      std::vector<Trace> traces;
      for (const auto& p : fea_in) traces.push_back(io::read_trace(p));
      auto sel = features::FeatureSelection::parse(fea_features);
      auto table = features::featurize_dataset(
          traces, fea_window, sel,
          fea_labels == "emotion" ? features::LabelKind::Emotion : features::LabelKind::Gesture);
      Output o(common.out, out);
      features::write_table_csv(o.get(), table);
      o.finish();
    };
  });

  // train
  auto* trn = app.add_subcommand("train", "Fit a k-NN model on feature tables");
  std::vector<std::string> trn_in;
  int knn_k = 6;
  std::string knn_weighting = "inverse_distance";
  auto add_knn_opts = [&](CLI::App* sub) {
    sub->add_option("--k", knn_k, "Neighbours")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--weighting", knn_weighting, "Vote weighting")
        ->check(CLI::IsMember({"uniform", "inverse_distance"}))
        ->capture_default_str();
  };
  trn->add_option("--in", trn_in, "Feature CSV files")->required();
  add_knn_opts(trn);
  trn->callback([&] {
    action = [&] {
      auto model =
          knn::KnnModel::fit(read_tables(trn_in), knn_k, *knn::parse_weighting(knn_weighting));
      Output o(common.out, out);
      model.save(o.get());
      o.finish();
    };
  });

  // predict
  auto* pre = app.add_subcommand("predict", "Classify feature rows with a saved model");
  std::string pre_model;
  std::vector<std::string> pre_in;
  pre->add_option("--model", pre_model, "Model file from 'train'")->required();
  pre->add_option("--in", pre_in, "Feature CSV files")->required();
  pre->callback([&] {
    action = [&] {
      auto model = knn::KnnModel::load(std::filesystem::path(pre_model));
      auto table = read_tables(pre_in);
      auto pred = model.predict_table(table);
      Output o(common.out, out);
      o.get() << "row,predicted,label\n";
      std::size_t hits = 0;
      for (std::size_t i = 0; i < pred.size(); ++i) {
        o.get() << i << ',' << pred[i] << ',' << table.label(i) << '\n';
        hits += pred[i] == table.label(i);
      }
      o.finish();
      log::info("predict: " + std::to_string(hits) + "/" + std::to_string(pred.size()) +
                " rows match their label");
    };
  });

  // cv
  auto* cv = app.add_subcommand("cv", "Cross-validate k-NN on feature tables");
  std::vector<std::string> cv_in;
  int cv_folds = 10;
  bool cv_loso = false;
  cv->add_option("--in", cv_in, "Feature CSV files")->required();
  cv->add_option("--folds", cv_folds, "Stratified folds")->check(CLI::Range(2, 1 << 30))
      ->capture_default_str();
  cv->add_flag("--loso", cv_loso, "Leave-one-subject-out instead of k-fold");
  add_knn_opts(cv);
  cv->callback([&] {
    action = [&] {
      auto table = read_tables(cv_in);
      auto w = *knn::parse_weighting(knn_weighting);
      Output o(common.out, out);
      if (cv_loso) {
        auto r = knn::loso_cv(table, knn_k, w);
        o.get() << "subject,accuracy,rows\n";
        for (const auto& s : r.per_subject) {
          o.get() << s.subject << ',' << text::format_double(s.accuracy) << ',' << s.rows << '\n';
        }
        o.get() << "mean," << text::format_double(r.mean_accuracy()) << ','
                << r.pooled.total() << '\n';
      } else {
        auto cm = knn::kfold_cv(table, cv_folds, knn_k, w, common.seed);
        auto m = knn::metrics(cm);
        o.get() << "# accuracy=" << text::format_double(m.accuracy) << '\n';
        knn::write_confusion_csv(o.get(), cm);
        if (!common.out.empty() && common.out != "-") {
          out << "accuracy " << percent(m.accuracy) << "% over " << cm.total() << " windows\n";
        }
      }
      o.finish();
    };
  });

  // alerts
  auto* alr = app.add_subcommand("alerts", "Turn a per-window emotion stream into alerts");
  std::string alr_in;
  double alr_period = 0.1;
  emotion::AlertPolicy policy;
  alr->add_option("--in", alr_in, "Stream CSV (time_s optional; emotion/predicted/label)")
      ->required();
  alr->add_option("--period", alr_period, "Seconds per window")->check(CLI::PositiveNumber)
      ->capture_default_str();
  alr->add_option("--sustain", policy.sustain_threshold, "Seconds for a sustained alert")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  alr->add_option("--episodes", policy.episode_count_threshold, "Qualifying runs per hour")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  alr->add_option("--gap", policy.gap_tolerance, "Tolerated interruption in seconds")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  alr->callback([&] {
    action = [&] {
      auto in = open_input(alr_in);
      auto stream = emotion::read_stream_csv(in, alr_period);
      auto alerts = emotion::aggregate(stream, policy);
      if (!common.out.empty() && common.out != "-") {
        Output o(common.out, out);
        emotion::write_alerts_csv(o.get(), alerts);
        o.finish();
      }
      for (const auto& a : alerts) out << emotion::format_alert(a) << '\n';
      if (alerts.empty()) out << "no alerts\n";
    };
  });

  // sweep
  auto* swp = app.add_subcommand("sweep", "Accuracy across an SNR grid and gesture sets");
  std::string swp_spec;
  swp->add_option("--spec", swp_spec, "Flat key=value spec file (defaults otherwise)");
  swp->callback([&] {
    action = [&] {
      eval::SweepSpec spec;
      if (!swp_spec.empty()) spec = eval::load_sweep_spec(swp_spec);
      if (app.get_option("--seed")->count() > 0 || swp_spec.empty()) spec.seed = common.seed;
      auto report = eval::run_sweep(spec);
      Output o(common.out, out, true);
      eval::write_report(o.get(), report);
      o.finish();
    };
  });

  // scenario
  auto* scn = app.add_subcommand("scenario", "Neutral vs angry scenario with k-fold and LOSO");
  std::string scn_name;
  std::optional<int> scn_subjects, scn_reps;
  std::optional<double> scn_duration, scn_spread;
  scn->add_option("name", scn_name, "driving, conversation2m or conversation5m")
      ->required()
      ->check(CLI::IsMember({"driving", "conversation2m", "conversation5m"}));
  scn->add_option("--subjects", scn_subjects, "Simulated subjects")->check(CLI::Range(2, 1000));
  scn->add_option("--repetitions", scn_reps, "Repetitions per subject")
      ->check(CLI::PositiveNumber);
  scn->add_option("--duration", scn_duration, "Seconds per trace")->check(CLI::PositiveNumber);
  scn->add_option("--spread", scn_spread, "Per-subject parameter spread");
  add_knn_opts(scn);
  scn->callback([&] {
    action = [&] {
      auto s = eval::parse_scenario(scn_name);
      auto spec = eval::default_scenario_spec(s);
      spec.seed = common.seed;
      spec.k = knn_k;
      spec.weighting = *knn::parse_weighting(knn_weighting);
      if (scn_subjects) spec.pipeline.subjects = *scn_subjects;
      if (scn_reps) spec.pipeline.repetitions = *scn_reps;
      if (scn_duration) spec.pipeline.duration_s = *scn_duration;
      if (scn_spread) spec.pipeline.subject_spread = *scn_spread;
      auto r = eval::run_scenario(s, spec);
      Output o(common.out, out);
      eval::write_scenario_report(o.get(), r);
      o.finish();
    };
  });

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << eval::version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "rfdfar: " << e.what() << '\n';
    const CLI::App* active = &app;
    for (const auto* sub : app.get_subcommands()) active = sub;
    err << active->help();
    return kExitUsage;
  }

  log::set_level(common.verbose ? log::Level::Info : log::Level::Warn);
  try {
    if (action) action();
  } catch (const CLI::ValidationError& e) {
    err << "rfdfar: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "rfdfar: error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace rfdfar::cli
