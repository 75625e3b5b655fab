// gazeintent: synthesize, segment, extract, fit, train, evaluate, ablate,
// replay and benchmark. Exit status 0 ok, 1 usage error, 2 data error.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gazeintent/gazeintent.hpp"

namespace gi = gazeintent;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct Output {
  std::string path;

  // Writes through a buffer so a failing command leaves no partial file.
  template <typename Fn>
  void emit(Fn&& fn) const {
    std::ostringstream buf;
    fn(buf);
    if (path.empty() || path == "-") {
      std::cout << buf.str();
    } else {
      gi::io::write_file(path, buf.str());
    }
  }
};

std::istringstream open_input(const std::string& path) { return std::istringstream(gi::io::read_file(path)); }

std::vector<gi::GazeSample> load_samples(const std::string& path) {
  auto in = open_input(path);
  return gi::io::read_samples(in);
}

gi::LabeledFeatureTable load_features(const std::string& path) {
  auto in = open_input(path);
  return gi::io::read_features(in);
}

gi::IntentModel load_model(const std::string& path) {
  auto in = open_input(gi::io::resolve_model_path(path).string());
  return gi::io::read_model(in);
}

gi::GenerativeSpec load_spec(const std::string& path) {
  if (path.empty()) return gi::default_generative_spec();
  auto in = open_input(path);
  return gi::io::read_spec(in);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

/// "published", "all", "selected" (Welch screening over the table) or a
/// comma-separated list of feature names.
std::vector<gi::Feature> resolve_features(const std::string& choice, const gi::LabeledFeatureTable* table) {
  if (choice == "published") return gi::published_feature_selection();
  if (choice == "all") return {gi::all_features().begin(), gi::all_features().end()};
  if (choice == "selected") {
    if (!table) throw gi::Error(gi::ErrorCode::kConfiguration, "feature screening needs a feature table");
    return gi::select_features(*table).features;
  }
  std::vector<gi::Feature> out;
  for (const std::string& name : split_list(choice)) {
    const auto f = gi::feature_from_name(name);
    if (!f) throw gi::Error(gi::ErrorCode::kFormat, "unknown feature '" + name + "'");
    out.push_back(*f);
  }
  std::sort(out.begin(), out.end(), [](gi::Feature a, gi::Feature b) { return gi::index_of(a) < gi::index_of(b); });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw gi::Error(gi::ErrorCode::kFormat, "empty feature list");
  return out;
}

gi::LabeledFeatureTable rows_of(const gi::LabeledFeatureTable& table, const gi::Condition& c) {
  gi::LabeledFeatureTable out;
  for (const auto& r : table) {
    if (r.condition == c && r.label != gi::Label::kUnlabeled) out.push_back(r);
  }
  if (out.empty()) throw gi::Error(gi::ErrorCode::kIncompleteData, "no labeled rows for " + gi::to_string(c));
  return out;
}

std::vector<double> parse_grid(const std::string& text, const char* what) {
  std::vector<double> out;
  for (const std::string& item : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError(what, "'" + item + "' is not a number");
    }
  }
  return out;
}

void print_metrics(std::ostream& out, const gi::Metrics& m) {
  out << std::setprecision(6) << "accuracy " << m.accuracy << "  f1 " << m.f1 << "  auc ";
  if (m.auc) {
    out << *m.auc;
  } else {
    out << "n/a";
  }
  out << "  mean_us " << m.latency.mean_us << "  p99_us " << m.latency.p99_us << '\n';
}

// Condition option accepting the eight names; validation is deferred to parse_condition.
CLI::Option* add_condition(CLI::App* cmd, std::string& target, bool required = true) {
  auto* opt = cmd->add_option("--condition", target, "Condition, e.g. simple-large-dense");
  if (required) opt->required();
  return opt;
}

void add_detector_options(CLI::App* cmd, gi::DetectorConfig& cfg) {
  cmd->add_option("--saccade-threshold", cfg.saccade_velocity_thresh, "deg/s")->capture_default_str();
  cmd->add_option("--fixation-threshold", cfg.fixation_velocity_thresh, "deg/s")->capture_default_str();
  cmd->add_option("--dispersion", cfg.fixation_dispersion_thresh, "deg")->capture_default_str();
  cmd->add_option("--min-fixation", cfg.fixation_min_duration_ms, "ms")->capture_default_str();
}

void latency_histogram(std::ostream& out, const std::vector<double>& micros) {
  static constexpr double kEdges[] = {0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000};
  constexpr std::size_t kBuckets = std::size(kEdges);
  std::vector<std::size_t> counts(kBuckets, 0);
  for (double us : micros) {
    std::size_t b = kBuckets - 1;
    for (std::size_t i = 1; i < kBuckets; ++i) {
      if (us < kEdges[i]) {
        b = i - 1;
        break;
      }
    }
    ++counts[b];
  }
  out << "bucket_lo_us,bucket_hi_us,count\n";
  for (std::size_t i = 0; i < kBuckets; ++i) {
    out << kEdges[i] << ',';
    if (i + 1 < kBuckets) out << kEdges[i + 1];
    out << ',' << counts[i] << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaze-based selection intent: data generation, training, evaluation and replay"};
  app.require_subcommand(1);
  int verbosity = 0;
  app.add_flag("-v,--verbose", verbosity, "Print progress to stderr");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic feature tables, streams or the generative spec");
  synth->require_subcommand(1);

  std::string condition_name;
  std::string spec_path;
  std::uint64_t seed = 0;
  Output out;

  std::size_t n_true = 0;
  std::size_t n_false = 0;
  auto* synth_features = synth->add_subcommand("features", "Sample labeled feature rows (JSONL)");
  synth_features->add_option("--condition", condition_name, "Condition name, or 'all'")->required();
  synth_features->add_option("--n-true", n_true, "True rows")->required();
  synth_features->add_option("--n-false", n_false, "False rows")->required();
  synth_features->add_option("--seed", seed, "RNG seed")->required();
  synth_features->add_option("--spec", spec_path, "Generative spec JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  synth_features->add_option("-o,--out", out.path, "Output path (default stdout)");

  gi::ScenarioConfig scenario;
  std::size_t trials = 10;
  std::string schedule_kind = "random";
  std::string truth_path;
  auto* synth_stream = synth->add_subcommand("stream", "Script a raw gaze stream with ground truth");
  add_condition(synth_stream, condition_name);
  synth_stream->add_option("--trials", trials, "Number of selection trials")->capture_default_str();
  synth_stream->add_option("--schedule", schedule_kind, "random | dwell-stress")
      ->check(CLI::IsMember({"random", "dwell-stress"}))
      ->capture_default_str();
  synth_stream->add_option("--rate", scenario.sample_rate_hz, "Sample rate (Hz)")->capture_default_str();
  synth_stream->add_option("--seed", seed, "RNG seed")->required();
  synth_stream->add_option("-o,--out", out.path, "Sample JSONL path (default stdout)");
  synth_stream->add_option("--truth", truth_path, "Ground-truth JSONL path")->required();

  auto* synth_spec = synth->add_subcommand("spec", "Write the built-in generative spec (JSON)");
  synth_spec->add_option("-o,--out", out.path, "Output path (default stdout)");

  // segment
  std::string in_path;
  gi::DetectorConfig detector;
  auto* segment = app.add_subcommand("segment", "Segment a sample stream into fixations and saccades (JSONL)");
  segment->add_option("-i,--in", in_path, "Sample JSONL")->required()->check(CLI::ExistingFile);
  segment->add_option("-o,--out", out.path, "Output path (default stdout)");
  add_detector_options(segment, detector);

  // extract
  gi::WindowOptions window;
  auto* extract = app.add_subcommand("extract", "Labeled decision windows from a sample stream (JSONL)");
  extract->add_option("-i,--in", in_path, "Sample JSONL")->required()->check(CLI::ExistingFile);
  add_condition(extract, condition_name);
  extract->add_option("--k-pairs", window.k_pairs, "Fixation/saccade pairs in Coefficient K")->capture_default_str();
  extract->add_option("-o,--out", out.path, "Output path (default stdout)");
  add_detector_options(extract, detector);

  // fit
  std::string features_choice = "published";
  auto* fit = app.add_subcommand("fit", "Fit the class-conditional densities of one condition (JSON)");
  fit->add_option("-i,--in", in_path, "Feature JSONL")->required()->check(CLI::ExistingFile);
  add_condition(fit, condition_name);
  fit->add_option("--features", features_choice, "published | all | selected | name,name,...")
      ->capture_default_str();
  fit->add_option("-o,--out", out.path, "Output path (default stdout)");

  // train
  std::string sigma_text = "30";
  std::string c_text = "30";
  std::string mask_text = "All";
  std::string test_out;
  std::size_t folds = 5;
  auto* train = app.add_subcommand("train", "Sample, split, cross-validate and train a model (JSON)");
  train->add_option("-i,--in", in_path, "Feature JSONL")->required()->check(CLI::ExistingFile);
  add_condition(train, condition_name, false);
  train->add_option("--seed", seed, "RNG seed")->required();
  train->add_option("--sigma", sigma_text, "Kernel width, or comma-separated grid")->capture_default_str();
  train->add_option("--c", c_text, "Box constraint, or comma-separated grid")->capture_default_str();
  train->add_option("--folds", folds, "Cross-validation folds when a grid is given")->capture_default_str();
  train->add_option("--mask", mask_text, "All | No1stFixation | No2ndFixation | NoSaccade | ObservationData")
      ->capture_default_str();
  train->add_option("--features", features_choice, "published | all | selected | name,name,...")
      ->capture_default_str();
  train->add_option("-o,--out", out.path, "Model JSON path")->required();
  train->add_option("--test-out", test_out, "Also write the held-out test rows (JSONL)");

  // eval
  std::string model_path;
  auto* eval = app.add_subcommand("eval", "Evaluate a model on labeled rows (CSV)");
  eval->add_option("-m,--model", model_path, "Model JSON (relative paths also searched in $GAZEINTENT_MODEL_DIR)")
      ->required();
  eval->add_option("-t,--test", in_path, "Feature JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("-o,--out", out.path, "CSV path (default stdout)");

  // ablate
  auto* ablate = app.add_subcommand("ablate", "Train and test every feature mask on one split (CSV)");
  ablate->add_option("-i,--in", in_path, "Feature JSONL")->required()->check(CLI::ExistingFile);
  add_condition(ablate, condition_name, false);
  ablate->add_option("--seed", seed, "RNG seed")->required();
  ablate->add_option("--sigma", sigma_text, "Kernel width, or comma-separated grid")->capture_default_str();
  ablate->add_option("--c", c_text, "Box constraint, or comma-separated grid")->capture_default_str();
  ablate->add_option("--features", features_choice, "published | all | selected | name,name,...")
      ->capture_default_str();
  ablate->add_option("-o,--out", out.path, "CSV path (default stdout)");

  // replay
  std::string policies_text = "model,dwell,oracle";
  std::string json_out;
  auto* replay = app.add_subcommand("replay", "Score selection policies on an annotated stream");
  replay->add_option("-i,--in", in_path, "Sample JSONL")->required()->check(CLI::ExistingFile);
  replay->add_option("--truth", truth_path, "Ground-truth JSONL")->required()->check(CLI::ExistingFile);
  replay->add_option("-m,--model", model_path, "Model JSON (needed by the model policy)");
  replay->add_option("--policies", policies_text, "Comma-separated: model, dwell, oracle")->capture_default_str();
  replay->add_option("-o,--out", out.path, "CSV path (default stdout)");
  replay->add_option("--json", json_out, "Also write the full report as JSON");
  add_detector_options(replay, detector);

  // bench
  std::size_t repeat = 1;
  auto* bench = app.add_subcommand("bench", "Per-decision inference latency histogram (CSV)");
  bench->add_option("-m,--model", model_path, "Model JSON")->required();
  auto* bench_test = bench->add_option("-t,--test", in_path, "Feature JSONL to classify")->check(CLI::ExistingFile);
  std::string stream_path;
  auto* bench_stream =
      bench->add_option("--stream", stream_path, "Sample JSONL run through the engine")->check(CLI::ExistingFile);
  bench_test->excludes(bench_stream);
  bench->add_option("--repeat", repeat, "Passes over the input")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("-o,--out", out.path, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  auto log = [&](const std::string& msg) {
    if (verbosity > 0) std::cerr << msg << '\n';
  };

  try {
    if (*synth_features) {
      const gi::GenerativeSpec spec = load_spec(spec_path);
      std::vector<gi::Condition> conditions;
      if (condition_name == "all") {
        conditions.assign(gi::all_conditions().begin(), gi::all_conditions().end());
      } else {
        conditions.push_back(gi::parse_condition(condition_name));
      }
      out.emit([&](std::ostream& os) {
        for (std::size_t i = 0; i < conditions.size(); ++i) {
          // Seeds derive from the condition, so "all" repeats each single-condition table.
          const auto rows = gi::gen_features(spec, conditions[i], n_true, n_false,
                                             seed + 0x9E3779B97F4A7C15ULL * gi::index_of(conditions[i]));
          gi::io::write_features(os, rows);
        }
      });
    } else if (*synth_stream) {
      scenario.condition = gi::parse_condition(condition_name);
      scenario.validate();
      const auto schedule = schedule_kind == "random" ? gi::random_task_schedule(scenario, trials, seed)
                                                      : gi::dwell_stress_schedule(scenario, trials, seed);
      const gi::SyntheticStream stream = gi::gen_stream(scenario, schedule, seed + 1);
      std::ostringstream truth;
      gi::io::write_ground_truth(truth, stream.truth);
      out.emit([&](std::ostream& os) { gi::io::write_samples(os, stream.samples); });
      gi::io::write_file(truth_path, truth.str());
      log("samples " + std::to_string(stream.samples.size()) + ", trials " +
          std::to_string(stream.truth.trials.size()));
    } else if (*synth_spec) {
      out.emit([&](std::ostream& os) { gi::io::write_spec(os, gi::default_generative_spec()); });
    } else if (*segment) {
      detector.validate();
      const auto samples = load_samples(in_path);
      const auto events = gi::segment(samples, detector);
      out.emit([&](std::ostream& os) { gi::io::write_events(os, events); });
    } else if (*extract) {
      detector.validate();
      const gi::Condition condition = gi::parse_condition(condition_name);
      const auto samples = load_samples(in_path);
      const auto events = gi::segment(samples, detector);
      const auto rows = gi::labeled_windows(events, condition, window);
      out.emit([&](std::ostream& os) { gi::io::write_features(os, rows); });
      log("windows " + std::to_string(rows.size()));
    } else if (*fit) {
      const gi::Condition condition = gi::parse_condition(condition_name);
      const auto table = load_features(in_path);
      const auto features = resolve_features(features_choice, &table);
      const auto model = gi::build_bayes_model(rows_of(table, condition), condition, features);
      out.emit([&](std::ostream& os) { gi::io::write_bayes_model(os, model); });
    } else if (*train || *ablate) {
      const auto table = load_features(in_path);
      if (table.empty()) throw gi::Error(gi::ErrorCode::kIncompleteData, "empty feature table");
      const gi::Condition condition =
          condition_name.empty() ? table.front().condition : gi::parse_condition(condition_name);
      const auto features = resolve_features(features_choice, &table);
      const auto rows = rows_of(table, condition);
      gi::TrainOptions options;
      options.sigma_grid = parse_grid(sigma_text, "--sigma");
      options.c_grid = parse_grid(c_text, "--c");
      options.folds = folds;
      if (options.sigma_grid.empty() || options.c_grid.empty()) {
        throw gi::Error(gi::ErrorCode::kEmptyGrid, "--sigma and --c need at least one value");
      }

      if (*ablate) {
        const auto results = gi::ablation_run(rows, condition, features, gi::all_masks(), options, seed);
        out.emit([&](std::ostream& os) { gi::io::write_metrics_csv(os, results); });
      } else {
        std::vector<bool> is_true(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) is_true[i] = rows[i].label == gi::Label::kTrue;
        const gi::SplitIndices split = gi::sample_and_split(is_true, seed);
        auto gather = [&](const std::vector<std::size_t>& idx) {
          std::vector<gi::ObservationVector> g;
          g.reserve(idx.size());
          for (std::size_t i : idx) g.push_back(rows[i]);
          return g;
        };
        const auto train_rows = gather(split.train);
        const auto val_rows = gather(split.val);
        const auto test_rows = gather(split.test);
        gi::GridResult grid;
        const gi::IntentModel model = gi::train_intent_model(train_rows, val_rows, condition, features,
                                                             gi::parse_mask(mask_text), options, seed, &grid);
        std::ostringstream model_json;
        gi::io::write_model(model_json, model);
        gi::io::write_file(out.path, model_json.str());
        if (!test_out.empty()) {
          std::ostringstream test_jsonl;
          gi::io::write_features(test_jsonl, test_rows);
          gi::io::write_file(test_out, test_jsonl.str());
        }
        std::cerr << "sigma " << model.svm.sigma << "  C " << model.svm.c << "  support vectors "
                  << model.svm.support_vectors.rows() << '\n';
        std::cerr << "test: ";
        print_metrics(std::cerr, gi::evaluate(model, test_rows));
      }
    } else if (*eval) {
      const gi::IntentModel model = load_model(model_path);
      const auto rows = load_features(in_path);
      std::vector<gi::ObservationVector> test;
      for (const auto& r : rows) {
        if (r.label == gi::Label::kUnlabeled) continue;
        if (r.condition != model.bayes.condition) {
          throw gi::Error(gi::ErrorCode::kConfiguration, "test rows are not from the model's condition");
        }
        test.push_back(r);
      }
      const gi::AblationRow row{model.mask, gi::evaluate(model, test),
                                static_cast<std::size_t>(model.svm.support_vectors.rows())};
      out.emit([&](std::ostream& os) { gi::io::write_metrics_csv(os, std::span(&row, 1)); });
    } else if (*replay) {
      detector.validate();
      std::vector<gi::Policy> policies;
      for (const std::string& p : split_list(policies_text)) policies.push_back(gi::parse_policy(p));
      const auto samples = load_samples(in_path);
      auto truth_in = open_input(truth_path);
      const gi::GroundTruth truth = gi::io::read_ground_truth(truth_in);
      std::optional<gi::IntentModel> model;
      if (!model_path.empty()) model = load_model(model_path);
      gi::EngineConfig cfg;
      cfg.detector = detector;
      const gi::ReplayReport report = gi::replay_eval(samples, truth, policies, model ? &*model : nullptr, cfg);
      out.emit([&](std::ostream& os) { gi::io::write_replay_csv(os, report); });
      if (!json_out.empty()) {
        std::ostringstream js;
        gi::io::write_replay_json(js, report);
        gi::io::write_file(json_out, js.str());
      }
    } else if (*bench) {
      const gi::IntentModel model = load_model(model_path);
      std::vector<double> micros;
      if (!stream_path.empty()) {
        const auto samples = load_samples(stream_path);
        for (std::size_t r = 0; r < repeat; ++r) {
          for (const auto& d : gi::stream_decisions(model, samples, model.bayes.condition)) {
            micros.push_back(d.latency_us);
          }
        }
      } else {
        if (in_path.empty()) throw CLI::RequiredError("--test or --stream");
        const auto rows = load_features(in_path);
        if (rows.empty()) throw gi::Error(gi::ErrorCode::kIncompleteData, "empty feature table");
        const gi::Encoder enc(model.bayes, model.mask);
        Eigen::VectorXd input(enc.dim());
        for (std::size_t r = 0; r < repeat; ++r) {
          for (const auto& row : rows) {
            const auto t0 = std::chrono::steady_clock::now();
            enc.encode(row, input);
            const double d = gi::predict(model.svm, input).decision_value;
            const auto t1 = std::chrono::steady_clock::now();
            if (!std::isfinite(d)) throw gi::Error(gi::ErrorCode::kInvalidObservation, "non-finite decision");
            micros.push_back(std::chrono::duration<double, std::micro>(t1 - t0).count());
          }
        }
      }
      const gi::LatencySummary s = gi::summarize_latency(micros);
      std::cerr << "decisions " << micros.size() << "  mean_us " << s.mean_us << "  p99_us " << s.p99_us
                << "  max_us " << s.max_us << '\n';
      out.emit([&](std::ostream& os) { latency_histogram(os, micros); });
    }
  } catch (const CLI::ParseError& e) {
    std::cerr << "gazeintent: " << e.what() << '\n';
    return kExitUsage;
  } catch (const gi::Error& e) {
    std::cerr << "gazeintent: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "gazeintent: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
