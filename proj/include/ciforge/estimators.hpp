#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "ciforge/core.hpp"
#include "ciforge/errors.hpp"
#include "ciforge/metrics.hpp"
#include "ciforge/parallel.hpp"
#include "ciforge/quantile.hpp"
#include "ciforge/rng.hpp"

namespace ciforge {

enum class Method { Bbc, BbcF, Naive };

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);

/// How in-bag rows drawn more than once enter the in-bag metric.
enum class InBagWeighting { Multiplicity, DistinctRows };

struct EstimatorConfig {
  Method method = Method::BbcF;
  std::size_t bootstraps = 1000;
  double coverage = 0.95;
  Sidedness sided = Sidedness::OneSided;
  MetricId metric = MetricId::auc();
  std::uint64_t seed = 0;
  QuantileRule quantile = QuantileRule::Interpolated;
  InBagWeighting in_bag = InBagWeighting::Multiplicity;
  // Worker threads for the bootstrap loop. Results do not depend on it.
  std::size_t jobs = 1;

  static constexpr std::size_t kMinBootstraps = 50;

  /// Throws InputError on B < 50 or coverage outside (0, 1).
  void validate() const;

  /// Total draws allowed across all bootstraps, redraws included.
  std::size_t attempt_budget() const noexcept { return 100 * bootstraps; }
};

struct PhaseTimes {
  std::chrono::nanoseconds prepare{0};
  std::chrono::nanoseconds bootstrap{0};
};

struct EstimateResult {
  Method method = Method::BbcF;
  std::size_t winner = 0;
  double point_estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> bootstrap_values;
  std::size_t attempts = 0;
  EstimatorConfig config;
  // Wall-clock phase times; informational, never part of a deterministic report.
  PhaseTimes times;
};

/// Index of the best value; ties go to the lowest index.
inline std::size_t select_winner(std::span<const double> perf, bool higher_is_better) {
  if (perf.empty()) throw InputError("winner selection over zero configurations");
  std::size_t best = 0;
  for (std::size_t j = 1; j < perf.size(); ++j) {
    if (higher_is_better ? perf[j] > perf[best] : perf[j] < perf[best]) best = j;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Selection bootstrap engine
//
// Rows of a matrix are resampled with replacement. Each draw is scored by an
// evaluator: a winner column is chosen on the in-bag rows and its score on the
// out-of-bag rows is recorded. Drawing one row per fold of a fold-performance
// matrix gives BBC-F; drawing one row per sample gives BBC.
// ---------------------------------------------------------------------------

template <class E>
concept ColumnEvaluator =
    requires(const E& e, std::size_t j, std::span<const std::uint32_t> w) {
      { e.rows() } -> std::convertible_to<std::size_t>;
      { e.columns() } -> std::convertible_to<std::size_t>;
      { e.higher_is_better() } -> std::convertible_to<bool>;
      { e.score(j, w) } -> std::same_as<std::optional<double>>;
    };

/// Evaluators may also pick the in-bag winner in one pass over all columns,
/// using `scratch` (one slot per column) as workspace.
template <class E>
concept FastWinnerSelection =
    requires(const E& e, std::span<const std::uint32_t> w, std::span<double> scratch) {
      { e.select(w, scratch) } -> std::same_as<std::optional<std::size_t>>;
    };

/// Pooled metric of a prediction column over integer sample weights.
class PooledMetricEvaluator {
 public:
  PooledMetricEvaluator(const PredictionMatrix& pm, const MetricId& metric);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return columns_; }
  bool higher_is_better() const noexcept { return higher_is_better_; }

  std::optional<double> score(std::size_t column,
                              std::span<const std::uint32_t> weights) const {
    return std::visit(
        [&](const auto& cols) { return cols[column].weighted(weights); },
        columns_data_);
  }

 private:
  std::size_t rows_;
  std::size_t columns_;
  bool higher_is_better_;
  std::variant<std::vector<PresortedAuc>, std::vector<PresortedAccuracy>>
      columns_data_;
};

/// Weighted mean of a fold-performance column over integer fold weights.
class FoldMeanEvaluator {
 public:
  explicit FoldMeanEvaluator(const FoldPerformanceMatrix& perf);

  std::size_t rows() const noexcept { return perf_->folds(); }
  std::size_t columns() const noexcept { return perf_->configs(); }
  bool higher_is_better() const noexcept {
    return perf_->metric().higher_is_better();
  }

  std::optional<double> score(std::size_t column,
                              std::span<const std::uint32_t> weights) const {
    const auto values = perf_->column(column);
    double total = 0.0;
    std::uint64_t weight = 0;
    for (std::size_t k = 0; k < values.size(); ++k) {
      total += weights[k] * values[k];
      weight += weights[k];
    }
    if (weight == 0) return std::nullopt;
    return total / static_cast<double>(weight);
  }

  // Every column shares the same total weight, so the best weighted sum is
  // the best weighted mean.
  std::optional<std::size_t> select(std::span<const std::uint32_t> weights,
                                    std::span<double> sums) const {
    const std::size_t cols = perf_->configs();
    std::fill(sums.begin(), sums.end(), 0.0);
    std::uint64_t total = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      total += weights[k];
      const double w = weights[k];
      const double* row = rows_.data() + k * cols;
      for (std::size_t j = 0; j < cols; ++j) sums[j] += w * row[j];
    }
    if (total == 0) return std::nullopt;
    return select_winner(sums, higher_is_better());
  }

 private:
  const FoldPerformanceMatrix* perf_;
  std::vector<double> rows_;  // row-major copy of the fold-performance matrix
};

struct BootstrapPlan {
  std::size_t bootstraps = 1000;
  std::uint64_t seed = 0;
  std::size_t attempt_budget = 100000;
  InBagWeighting in_bag = InBagWeighting::Multiplicity;
  std::size_t jobs = 1;
};

struct BootstrapRun {
  std::vector<double> values;  // values[b] is the b-th bootstrap statistic
  std::size_t attempts = 0;
};

namespace detail {

// Splits [0, count) into contiguous chunks so each worker reuses its buffers.
inline std::size_t chunk_count(std::size_t count, std::size_t jobs) {
  if (jobs <= 1) return 1;
  return std::min(count, jobs * 4);
}

// Shared redraw budget. Each chunk counts its own attempts and publishes them
// when it finishes; a chunk stops as soon as its own count plus everything
// already published reaches the budget. Both quantities are lower bounds of
// the total the run needs, so exhaustion is reported exactly when the sum of
// the per-bootstrap attempt counts exceeds the budget, whatever the thread
// interleaving.
class AttemptCounter {
 public:
  explicit AttemptCounter(std::size_t budget) : budget_(budget) {}

  bool allows(std::size_t local) const noexcept {
    return local + published_.load(std::memory_order_relaxed) < budget_ &&
           !exhausted_.load(std::memory_order_relaxed);
  }
  void publish(std::size_t local) noexcept {
    published_.fetch_add(local, std::memory_order_relaxed);
  }
  void mark_exhausted() noexcept { exhausted_.store(true, std::memory_order_relaxed); }

  bool exhausted() const noexcept {
    return exhausted_.load(std::memory_order_relaxed);
  }
  std::size_t used() const noexcept {
    return std::min(published_.load(std::memory_order_relaxed), budget_);
  }
  std::size_t budget() const noexcept { return budget_; }

 private:
  std::size_t budget_;
  std::atomic<std::size_t> published_{0};
  std::atomic<bool> exhausted_{false};
};

// Attempt accounting of one chunk; publishes on scope exit.
class ChunkAttempts {
 public:
  explicit ChunkAttempts(AttemptCounter& counter) : counter_(counter) {}
  ChunkAttempts(const ChunkAttempts&) = delete;
  ChunkAttempts& operator=(const ChunkAttempts&) = delete;
  ~ChunkAttempts() { counter_.publish(local_); }

  bool take() noexcept {
    if (!counter_.allows(local_)) {
      counter_.mark_exhausted();
      return false;
    }
    ++local_;
    return true;
  }

 private:
  AttemptCounter& counter_;
  std::size_t local_ = 0;
};

[[noreturn]] void throw_budget_exhausted(std::size_t budget,
                                         std::string_view advice);

}  // namespace detail

/// Generic row bootstrap with in-bag winner selection and out-of-bag scoring.
/// Bootstrap b draws from its own stream Rng::for_stream(seed, {b}); a draw is
/// redrawn when the out-of-bag set is empty or the evaluator rejects the
/// in-bag or out-of-bag weights.
template <ColumnEvaluator E>
BootstrapRun run_selection_bootstrap(const E& eval, const BootstrapPlan& plan) {
  const std::size_t rows = eval.rows();
  const std::size_t cols = eval.columns();
  const bool higher = eval.higher_is_better();

  BootstrapRun run;
  run.values.assign(plan.bootstraps, 0.0);
  detail::AttemptCounter counter(plan.attempt_budget);

  const std::size_t chunks = detail::chunk_count(plan.bootstraps, plan.jobs);
  parallel_for(chunks, plan.jobs, [&](std::size_t chunk) {
    const std::size_t begin = plan.bootstraps * chunk / chunks;
    const std::size_t end = plan.bootstraps * (chunk + 1) / chunks;
    detail::ChunkAttempts attempts(counter);
    const StreamFamily streams(plan.seed);

    std::vector<std::uint32_t> counts(rows);
    std::vector<std::uint32_t> in_weights(rows);
    std::vector<std::uint32_t> oob(rows);
    std::vector<double> in_scores(cols);

    for (std::size_t b = begin; b < end; ++b) {
      Rng rng = streams.stream(b);
      for (;;) {
        if (!attempts.take()) return;
        draw_counts(rng, counts);

        bool any_oob = false;
        for (std::size_t i = 0; i < rows; ++i) {
          oob[i] = counts[i] == 0 ? 1u : 0u;
          any_oob |= counts[i] == 0;
        }
        if (!any_oob) continue;

        std::span<const std::uint32_t> in_bag = counts;
        if (plan.in_bag == InBagWeighting::DistinctRows) {
          for (std::size_t i = 0; i < rows; ++i) in_weights[i] = counts[i] ? 1u : 0u;
          in_bag = in_weights;
        }

        std::size_t winner = 0;
        if constexpr (FastWinnerSelection<E>) {
          const auto w = eval.select(in_bag, in_scores);
          if (!w) continue;
          winner = *w;
        } else {
          bool admissible = true;
          for (std::size_t j = 0; j < cols; ++j) {
            const auto s = eval.score(j, in_bag);
            if (!s) {
              admissible = false;
              break;
            }
            in_scores[j] = *s;
          }
          if (!admissible) continue;
          winner = select_winner(in_scores, higher);
        }
        const auto held_out = eval.score(winner, oob);
        if (!held_out) continue;
        run.values[b] = *held_out;
        break;
      }
    }
  });

  if (counter.exhausted()) {
    detail::throw_budget_exhausted(counter.budget(),
                                   "try bbc-f, fewer rejected draws, or more data");
  }
  run.attempts = counter.used();
  return run;
}

/// Bootstrap of one fixed column scored on its in-bag rows (no selection).
template <ColumnEvaluator E>
BootstrapRun run_fixed_bootstrap(const E& eval, std::size_t column,
                                 const BootstrapPlan& plan) {
  const std::size_t rows = eval.rows();

  BootstrapRun run;
  run.values.assign(plan.bootstraps, 0.0);
  detail::AttemptCounter counter(plan.attempt_budget);

  const std::size_t chunks = detail::chunk_count(plan.bootstraps, plan.jobs);
  parallel_for(chunks, plan.jobs, [&](std::size_t chunk) {
    const std::size_t begin = plan.bootstraps * chunk / chunks;
    const std::size_t end = plan.bootstraps * (chunk + 1) / chunks;
    detail::ChunkAttempts attempts(counter);
    const StreamFamily streams(plan.seed);
    std::vector<std::uint32_t> counts(rows);
    std::vector<std::uint32_t> in_weights(rows);

    for (std::size_t b = begin; b < end; ++b) {
      Rng rng = streams.stream(b);
      for (;;) {
        if (!attempts.take()) return;
        draw_counts(rng, counts);
        std::span<const std::uint32_t> in_bag = counts;
        if (plan.in_bag == InBagWeighting::DistinctRows) {
          for (std::size_t i = 0; i < rows; ++i) in_weights[i] = counts[i] ? 1u : 0u;
          in_bag = in_weights;
        }
        const auto s = eval.score(column, in_bag);
        if (!s) continue;
        run.values[b] = *s;
        break;
      }
    }
  });

  if (counter.exhausted()) {
    detail::throw_budget_exhausted(counter.budget(), "the data have too few minority samples");
  }
  run.attempts = counter.used();
  return run;
}

/// Metric of every configuration over all samples, pooled across folds.
std::vector<double> pooled_performance(const PredictionMatrix& pm,
                                       const MetricId& metric);

/// Mean over folds of each fold-performance column.
std::vector<double> fold_means(const FoldPerformanceMatrix& perf);

/// Bootstrap Bias Correction over samples.
EstimateResult bbc(const PredictionMatrix& pm, const EstimatorConfig& cfg);

/// Bootstrap Bias Correction over folds.
EstimateResult bbc_f(const PredictionMatrix& pm, const EstimatorConfig& cfg);

/// Bootstrap of the full-data winner only; ignores selection bias.
EstimateResult naive_bootstrap(const PredictionMatrix& pm,
                               const EstimatorConfig& cfg);

/// Dispatches on cfg.method.
EstimateResult estimate(const PredictionMatrix& pm, const EstimatorConfig& cfg);

/// Fills point estimate and interval of `result` from a finished bootstrap run.
void summarize_bootstrap(EstimateResult& result, BootstrapRun run);

}  // namespace ciforge
