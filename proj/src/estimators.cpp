#include "ciforge/estimators.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ciforge {

std::string_view to_string(Method method) noexcept {
  switch (method) {
    case Method::Bbc: return "bbc";
    case Method::BbcF: return "bbc-f";
    case Method::Naive: return "nb";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "bbc") return Method::Bbc;
  if (name == "bbc-f" || name == "bbcf" || name == "bbc_f") return Method::BbcF;
  if (name == "nb" || name == "naive") return Method::Naive;
  throw InputError("unknown method '" + std::string(name) + "' (expected bbc, bbc-f or nb)");
}

void EstimatorConfig::validate() const {
  if (bootstraps < kMinBootstraps) {
    throw InputError("number of bootstraps must be at least " + std::to_string(kMinBootstraps));
  }
  if (!(coverage > 0.0 && coverage < 1.0)) throw InputError("coverage must lie in (0, 1)");
}

FoldMeanEvaluator::FoldMeanEvaluator(const FoldPerformanceMatrix& perf)
    : perf_(&perf), rows_(perf.folds() * perf.configs()) {
  for (std::size_t k = 0; k < perf.folds(); ++k) {
    for (std::size_t j = 0; j < perf.configs(); ++j) rows_[k * perf.configs() + j] = perf.at(k, j);
  }
}

namespace detail {

void throw_budget_exhausted(std::size_t budget, std::string_view advice) {
  throw RedrawBudgetExhausted("bootstrap redraw budget of " + std::to_string(budget) +
                              " draws exhausted; " + std::string(advice));
}

}  // namespace detail

PooledMetricEvaluator::PooledMetricEvaluator(const PredictionMatrix& pm, const MetricId& metric)
    : rows_(pm.samples()), columns_(pm.configs()), higher_is_better_(metric.higher_is_better()) {
  if (metric.tag == MetricTag::Auc) {
    std::vector<PresortedAuc> cols;
    cols.reserve(columns_);
    for (std::size_t j = 0; j < columns_; ++j) cols.emplace_back(pm.column(j), pm.labels());
    columns_data_ = std::move(cols);
  } else {
    std::vector<PresortedAccuracy> cols;
    cols.reserve(columns_);
    for (std::size_t j = 0; j < columns_; ++j) {
      cols.emplace_back(pm.column(j), pm.labels(), metric.threshold);
    }
    columns_data_ = std::move(cols);
  }
}

std::vector<double> pooled_performance(const PredictionMatrix& pm, const MetricId& metric) {
  std::vector<double> perf(pm.configs());
  for (std::size_t j = 0; j < pm.configs(); ++j) perf[j] = evaluate(metric, pm.column(j), pm.labels());
  return perf;
}

std::vector<double> fold_means(const FoldPerformanceMatrix& perf) {
  std::vector<double> means(perf.configs());
  for (std::size_t j = 0; j < perf.configs(); ++j) {
    const auto col = perf.column(j);
    means[j] = std::accumulate(col.begin(), col.end(), 0.0) / static_cast<double>(col.size());
  }
  return means;
}

void summarize_bootstrap(EstimateResult& result, BootstrapRun run) {
  result.bootstrap_values = std::move(run.values);
  result.attempts = run.attempts;
  const auto& values = result.bootstrap_values;
  result.point_estimate =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  const Interval ci =
      ci_from_bootstrap(values, result.config.coverage, result.config.sided, result.config.quantile);
  result.ci_low = ci.low;
  result.ci_high = ci.high;
}

namespace {

using Clock = std::chrono::steady_clock;

BootstrapPlan plan_for(const EstimatorConfig& cfg) {
  return {cfg.bootstraps, cfg.seed, cfg.attempt_budget(), cfg.in_bag, cfg.jobs};
}

// Only the preselected column is ever scored by the naive bootstrap.
class SingleColumnEvaluator {
 public:
  SingleColumnEvaluator(const PredictionMatrix& pm, std::size_t column, const MetricId& metric)
      : rows_(pm.samples()), higher_is_better_(metric.higher_is_better()) {
    if (metric.tag == MetricTag::Auc) {
      column_ = PresortedAuc(pm.column(column), pm.labels());
    } else {
      column_ = PresortedAccuracy(pm.column(column), pm.labels(), metric.threshold);
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return 1; }
  bool higher_is_better() const noexcept { return higher_is_better_; }
  std::optional<double> score(std::size_t, std::span<const std::uint32_t> weights) const {
    return std::visit([&](const auto& col) { return col.weighted(weights); }, column_);
  }

 private:
  std::size_t rows_;
  bool higher_is_better_;
  std::variant<PresortedAuc, PresortedAccuracy> column_{PresortedAccuracy({}, {}, 0.5)};
};

EstimateResult start(const EstimatorConfig& cfg, Method method) {
  cfg.validate();
  EstimateResult result;
  result.method = method;
  result.config = cfg;
  result.config.method = method;
  return result;
}

}  // namespace

EstimateResult bbc(const PredictionMatrix& pm, const EstimatorConfig& cfg) {
  EstimateResult result = start(cfg, Method::Bbc);
  const auto t0 = Clock::now();
  const PooledMetricEvaluator eval(pm, cfg.metric);
  result.winner = select_winner(pooled_performance(pm, cfg.metric), cfg.metric.higher_is_better());
  const auto t1 = Clock::now();
  BootstrapRun run = run_selection_bootstrap(eval, plan_for(cfg));
  const auto t2 = Clock::now();
  summarize_bootstrap(result, std::move(run));
  result.times = {t1 - t0, t2 - t1};
  return result;
}

EstimateResult bbc_f(const PredictionMatrix& pm, const EstimatorConfig& cfg) {
  EstimateResult result = start(cfg, Method::BbcF);
  if (pm.folds() < 2) throw EstimationError("bbc-f needs at least 2 folds");
  const auto t0 = Clock::now();
  const FoldPerformanceMatrix perf = fold_performance(pm, cfg.metric);
  const FoldMeanEvaluator eval(perf);
  result.winner = select_winner(fold_means(perf), cfg.metric.higher_is_better());
  const auto t1 = Clock::now();
  BootstrapRun run = run_selection_bootstrap(eval, plan_for(cfg));
  const auto t2 = Clock::now();
  summarize_bootstrap(result, std::move(run));
  result.times = {t1 - t0, t2 - t1};
  return result;
}

EstimateResult naive_bootstrap(const PredictionMatrix& pm, const EstimatorConfig& cfg) {
  EstimateResult result = start(cfg, Method::Naive);
  const auto t0 = Clock::now();
  result.winner = select_winner(pooled_performance(pm, cfg.metric), cfg.metric.higher_is_better());
  const SingleColumnEvaluator eval(pm, result.winner, cfg.metric);
  const auto t1 = Clock::now();
  BootstrapRun run = run_fixed_bootstrap(eval, 0, plan_for(cfg));
  const auto t2 = Clock::now();
  summarize_bootstrap(result, std::move(run));
  result.times = {t1 - t0, t2 - t1};
  return result;
}

EstimateResult estimate(const PredictionMatrix& pm, const EstimatorConfig& cfg) {
  switch (cfg.method) {
    case Method::Bbc: return bbc(pm, cfg);
    case Method::BbcF: return bbc_f(pm, cfg);
    case Method::Naive: return naive_bootstrap(pm, cfg);
  }
  throw InputError("unknown method");
}

}  // namespace ciforge
