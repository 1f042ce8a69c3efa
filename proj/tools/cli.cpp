#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ciforge/csv_io.hpp"
#include "ciforge/errors.hpp"
#include "ciforge/estimators.hpp"
#include "ciforge/evaluation.hpp"
#include "ciforge/report.hpp"
#include "ciforge/simulation.hpp"

namespace ciforge::cli {

namespace fs = std::filesystem;

namespace {

struct EstimateArgs {
  std::string in;
  std::string out;
  std::string method = "bbc-f";
  std::string sided = "one";
  std::string metric = "auc";
  std::string quantile = "interpolated";
  std::string in_bag = "multiplicity";
  double coverage = 0.95;
  double threshold = 0.5;
  std::size_t bootstraps = 1000;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct SimulateArgs {
  std::size_t n = 500;
  std::size_t configs = 100;
  double balance = 0.5;
  double alpha = 24.0;
  double beta = 6.0;
  std::uint64_t seed = 1;
  std::size_t rep = 0;
  std::string out_dir = ".";
};

struct BenchmarkArgs {
  std::string spec;
  std::string out_dir = ".";
  std::size_t jobs = 1;
  bool run_log = false;
  bool record_times = false;
};

struct BenchTimeArgs {
  std::string axis = "n";
  std::vector<std::size_t> values;
  std::size_t reps = 100;
  std::size_t bootstraps = 1000;
  std::size_t n = 500;
  std::size_t configs = 5;
  std::size_t folds = 3;
  std::uint64_t seed = 1;
  std::string out;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write '" + path.string() + "'");
  f << text;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory '" + dir.string() + "': " + ec.message());
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err) {
  EstimatorConfig cfg;
  cfg.method = parse_method(a.method);
  cfg.bootstraps = a.bootstraps;
  cfg.coverage = a.coverage;
  cfg.sided = parse_sidedness(a.sided);
  cfg.metric = parse_metric(a.metric);
  cfg.metric.threshold = a.threshold;
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  if (a.quantile == "interpolated") {
    cfg.quantile = QuantileRule::Interpolated;
  } else if (a.quantile == "lower") {
    cfg.quantile = QuantileRule::LowerOrderStatistic;
  } else {
    throw InputError("quantile rule must be 'interpolated' or 'lower'");
  }
  if (a.in_bag == "multiplicity") {
    cfg.in_bag = InBagWeighting::Multiplicity;
  } else if (a.in_bag == "distinct") {
    cfg.in_bag = InBagWeighting::DistinctRows;
  } else {
    throw InputError("in-bag weighting must be 'multiplicity' or 'distinct'");
  }
  cfg.validate();

  const PredictionMatrix pm = read_prediction_csv(a.in);
  if (pm.configs() == 1) err << "warning: no selection bias with a single configuration\n";

  const EstimateResult result = estimate(pm, cfg);
  const std::string text = estimate_to_json(result, pm).dump(2) + "\n";
  out << text;
  if (!a.out.empty()) write_text(a.out, text);
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  SimScenario s;
  s.samples = a.n;
  s.configs = a.configs;
  s.balance = a.balance;
  s.alpha = a.alpha;
  s.beta = a.beta;
  s.seed = a.seed;
  s.validate();

  const SimulatedDataset data = generate_scenario(s, a.rep);
  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  write_prediction_csv(dir / "preds.csv", data.pm);
  write_truth_csv(dir / "truth.csv", data.true_auc);
  out << "folds: " << data.folds << "\n"
      << "minority: " << data.minority_count << "\n";
  return kExitOk;
}

int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  std::ifstream f(a.spec, std::ios::binary);
  if (!f) throw InputError("cannot open spec '" + a.spec + "'");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("spec is not valid JSON: ") + e.what());
  }
  BenchmarkSpec spec = spec_from_json(doc);
  spec.jobs = a.jobs;

  const BenchmarkReport report = run_benchmark(spec);
  const fs::path dir(a.out_dir);
  ensure_dir(dir);
  write_text(dir / "report.json", benchmark_to_json(report).dump(2) + "\n");
  const std::string table = format_benchmark_table(report);
  write_text(dir / "report.txt", table);
  if (a.run_log) {
    std::ostringstream log;
    write_run_log(log, report, a.record_times);
    write_text(dir / "run_log.csv", log.str());
  }
  out << table;
  return kExitOk;
}

int cmd_bench_time(const BenchTimeArgs& a, std::ostream& out) {
  const TimingAxis axis = parse_axis(a.axis);
  if (a.values.empty()) throw InputError("--values needs at least one value");
  TimingSettings settings;
  settings.samples = a.n;
  settings.configs = a.configs;
  settings.folds = a.folds;
  settings.bootstraps = a.bootstraps;
  settings.repetitions = a.reps;
  settings.seed = a.seed;
  if (a.bootstraps < EstimatorConfig::kMinBootstraps) {
    throw InputError("number of bootstraps must be at least " +
                     std::to_string(EstimatorConfig::kMinBootstraps));
  }

  const auto rows = time_profile(axis, a.values, settings);
  std::ostringstream csv;
  write_timing_csv(csv, axis, rows);
  out << csv.str();
  if (!a.out.empty()) write_text(a.out, csv.str());
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bias-corrected confidence intervals for the winner of a cross-validated model selection"};
  app.name("ciforge");
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate a CI from a prediction matrix CSV");
  estimate_cmd->add_option("--in", est.in, "Prediction CSV (sample_id,fold,label,c0,...)")->required();
  estimate_cmd->add_option("--out", est.out, "Also write the JSON report to this file");
  estimate_cmd->add_option("--method", est.method, "bbc | bbc-f | nb")->capture_default_str();
  estimate_cmd->add_option("--coverage", est.coverage, "Nominal coverage")->capture_default_str();
  estimate_cmd->add_option("--sided", est.sided, "one | two")->capture_default_str();
  estimate_cmd->add_option("--bootstraps", est.bootstraps, "Bootstrap count B")->capture_default_str();
  estimate_cmd->add_option("--seed", est.seed, "Random seed")->capture_default_str();
  estimate_cmd->add_option("--metric", est.metric, "auc | accuracy")->capture_default_str();
  estimate_cmd->add_option("--threshold", est.threshold, "Accuracy threshold")->capture_default_str();
  estimate_cmd->add_option("--quantile", est.quantile, "interpolated | lower")->capture_default_str();
  estimate_cmd->add_option("--in-bag", est.in_bag, "multiplicity | distinct")->capture_default_str();
  estimate_cmd->add_option("--jobs", est.jobs, "Worker threads")->envname("CIFORGE_JOBS")->capture_default_str();

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Write a simulated prediction matrix and truth file");
  simulate_cmd->add_option("--n", sim.n, "Sample count")->capture_default_str();
  simulate_cmd->add_option("--configs", sim.configs, "Configuration count")->capture_default_str();
  simulate_cmd->add_option("--balance", sim.balance, "Minority class probability")->capture_default_str();
  simulate_cmd->add_option("--alpha", sim.alpha, "Beta alpha of the true AUCs")->capture_default_str();
  simulate_cmd->add_option("--beta", sim.beta, "Beta beta of the true AUCs")->capture_default_str();
  simulate_cmd->add_option("--seed", sim.seed, "Scenario seed")->capture_default_str();
  simulate_cmd->add_option("--rep", sim.rep, "Repetition index")->capture_default_str();
  simulate_cmd->add_option("--out-dir", sim.out_dir, "Output directory")->capture_default_str();

  BenchmarkArgs bench;
  auto* benchmark_cmd = app.add_subcommand("benchmark", "Run a simulated inclusion/tightness grid");
  benchmark_cmd->add_option("--spec", bench.spec, "Grid spec JSON")->required();
  benchmark_cmd->add_option("--out-dir", bench.out_dir, "Output directory")->capture_default_str();
  benchmark_cmd->add_option("--jobs", bench.jobs, "Worker threads")->envname("CIFORGE_JOBS")->capture_default_str();
  benchmark_cmd->add_flag("--run-log", bench.run_log, "Also write run_log.csv");
  benchmark_cmd->add_flag("--record-times", bench.record_times, "Write wall times into run_log.csv");

  BenchTimeArgs timing;
  auto* time_cmd = app.add_subcommand("bench-time", "Median running time of bbc and bbc-f along one axis");
  time_cmd->add_option("--axis", timing.axis, "n | c | k")->capture_default_str();
  time_cmd->add_option("--values", timing.values, "Comma-separated axis values")->delimiter(',')->required();
  time_cmd->add_option("--reps", timing.reps, "Timed repetitions per value")->capture_default_str();
  time_cmd->add_option("--bootstraps", timing.bootstraps, "Bootstrap count B")->capture_default_str();
  time_cmd->add_option("--n", timing.n, "Fixed sample count")->capture_default_str();
  time_cmd->add_option("--configs", timing.configs, "Fixed configuration count")->capture_default_str();
  time_cmd->add_option("--folds", timing.folds, "Fixed fold count")->capture_default_str();
  time_cmd->add_option("--seed", timing.seed, "Seed")->capture_default_str();
  time_cmd->add_option("--out", timing.out, "Also write the CSV to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (*estimate_cmd) return cmd_estimate(est, out, err);
    if (*simulate_cmd) return cmd_simulate(sim, out);
    if (*benchmark_cmd) return cmd_benchmark(bench, out);
    if (*time_cmd) return cmd_bench_time(timing, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const EstimationError& e) {
    err << "estimation error: " << e.what() << "\n";
    return kExitEstimationError;
  }
  return kExitInputError;
}

}  // namespace ciforge::cli
