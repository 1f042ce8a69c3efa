#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ciforge/estimators.hpp"
#include "ciforge/quantile.hpp"
#include "ciforge/simulation.hpp"

namespace ciforge {

enum class RunStatus { Ok, Failed };

/// Outcome of one method on one dataset.
struct RunRecord {
  Method method = Method::Bbc;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double point_estimate = 0.0;
  double true_perf = 0.0;
  std::chrono::nanoseconds wall_time{0};
  RunStatus status = RunStatus::Ok;
  std::size_t winner = 0;
  std::string error;  // set when status == Failed
};

struct InclusionTightness {
  double inclusion = 0.0;       // fraction of runs with true_perf >= ci_low
  double mean_tightness = 0.0;  // mean of true_perf - ci_low over all runs
};

/// Throws InputError on an empty sequence. Failed runs must be filtered out by
/// the caller.
InclusionTightness inclusion_and_tightness(std::span<const RunRecord> runs);

struct BinomialTest {
  double p_value = 1.0;
  bool reject = false;
};

/// One-sided exact test of H0: p >= p0 against H1: p < p0.
/// p_value = P(X <= successes) for X ~ Binomial(n, p0), summed in log space.
BinomialTest exact_binomial_test(std::size_t successes, std::size_t n,
                                 double p0, double level = 0.05);

enum class Verdict { NotRejected, Rejected, Insufficient };

std::string_view to_string(Verdict verdict) noexcept;

/// Below this many runs the binomial test is reported as insufficient.
inline constexpr std::size_t kMinRunsForVerdict = 20;

struct MethodSummary {
  Method method = Method::Bbc;
  double inclusion = 0.0;
  double mean_tightness = 0.0;
  std::size_t n_runs = 0;
  std::size_t failures = 0;
  Verdict verdict = Verdict::Insufficient;
  double p_value = 1.0;
  int rank = 0;
  double mean_point_bias = 0.0;  // mean of point_estimate - true_perf
};

/// Ranks within one table row: non-rejected before rejected; non-rejected by
/// ascending tightness; rejected by ascending |inclusion - target|; exact ties
/// share the best rank. Insufficient verdicts rank as non-rejected.
std::vector<int> rank_methods(std::span<const MethodSummary> summaries,
                              double target = 0.95);

struct BenchmarkSpec {
  std::vector<SimScenario> scenarios;
  std::vector<Method> methods{Method::Bbc, Method::BbcF, Method::Naive};
  std::size_t repetitions = 200;
  double coverage = 0.95;
  std::size_t bootstraps = 1000;
  Sidedness sided = Sidedness::OneSided;
  std::uint64_t seed = 1;
  std::size_t jobs = 1;

  void validate() const;
};

/// Per-repetition quantities shared by all methods.
struct RepetitionInfo {
  std::size_t rep = 0;
  std::size_t folds = 0;
  std::size_t full_winner = 0;
  double apparent_perf = 0.0;  // pooled full-data metric of the winner
  double winner_true_perf = 0.0;
};

struct CellReport {
  SimScenario scenario;
  std::vector<MethodSummary> methods;
  std::vector<RepetitionInfo> repetitions;
  std::vector<std::vector<RunRecord>> runs;  // runs[rep][method]
  double mean_apparent_bias = 0.0;  // uncorrected winner estimate minus truth
};

struct BenchmarkReport {
  BenchmarkSpec spec;
  std::vector<CellReport> cells;
  std::vector<double> average_rank;  // per method, over cells
};

/// Scenario seed used for cell `cell` of a benchmark with master seed `seed`.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell) noexcept;

/// Generates every repetition of every cell, runs each method and aggregates.
/// Estimator failures are recorded per run and excluded from that method's
/// n_runs.
BenchmarkReport run_benchmark(const BenchmarkSpec& spec);

/// Summary of the runs of one method. Failed runs count only as failures.
MethodSummary summarize_method(Method method, std::span<const RunRecord> runs,
                               double coverage);

// ---------------------------------------------------------------------------
// Timing study
// ---------------------------------------------------------------------------

enum class TimingAxis { Samples, Configs, Folds };

std::string_view to_string(TimingAxis axis) noexcept;
TimingAxis parse_axis(std::string_view text);

struct TimingSettings {
  std::size_t samples = 500;
  std::size_t configs = 5;
  std::size_t folds = 3;
  std::size_t bootstraps = 1000;
  std::size_t repetitions = 100;
  std::uint64_t seed = 1;
};

struct TimingRow {
  std::size_t value = 0;
  // Medians in milliseconds. "total" covers preparation (sorting, fold
  // conversion, full-data winner) plus the bootstrap loop.
  double bbc_total_ms = 0.0;
  double bbc_bootstrap_ms = 0.0;
  double bbcf_total_ms = 0.0;
  double bbcf_bootstrap_ms = 0.0;

  double total_ratio() const noexcept { return bbc_total_ms / bbcf_total_ms; }
  double bootstrap_ratio() const noexcept {
    return bbc_bootstrap_ms / bbcf_bootstrap_ms;
  }
};

/// Median single-threaded times of bbc and bbc_f while one of N, C, K varies.
/// One warm-up run per value is discarded.
std::vector<TimingRow> time_profile(TimingAxis axis,
                                    std::span<const std::size_t> values,
                                    const TimingSettings& settings = {});

double median(std::vector<double> values);

}  // namespace ciforge
