#include "ciforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ciforge/errors.hpp"

namespace ciforge {

InclusionTightness inclusion_and_tightness(std::span<const RunRecord> runs) {
  if (runs.empty()) throw InputError("inclusion of zero runs");
  std::size_t covered = 0;
  double tightness = 0.0;
  for (const auto& r : runs) {
    covered += r.true_perf >= r.ci_low;
    tightness += r.true_perf - r.ci_low;
  }
  const auto n = static_cast<double>(runs.size());
  return {static_cast<double>(covered) / n, tightness / n};
}

BinomialTest exact_binomial_test(std::size_t successes, std::size_t n, double p0, double level) {
  if (successes > n) throw InputError("successes exceed trials");
  if (!(p0 > 0.0 && p0 < 1.0)) throw InputError("null proportion must lie in (0, 1)");
  if (successes == n) return {1.0, false};

  const double log_p = std::log(p0);
  const double log_q = std::log1p(-p0);
  const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
  std::vector<double> terms(successes + 1);
  for (std::size_t k = 0; k <= successes; ++k) {
    const double kd = static_cast<double>(k);
    const double nk = static_cast<double>(n - k);
    terms[k] = log_n_fact - std::lgamma(kd + 1.0) - std::lgamma(nk + 1.0) + kd * log_p + nk * log_q;
  }
  const double peak = *std::max_element(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - peak);
  const double p_value = std::min(1.0, std::exp(peak + std::log(sum)));
  return {p_value, p_value < level};
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::NotRejected: return "not_rejected";
    case Verdict::Rejected: return "rejected";
    case Verdict::Insufficient: return "insufficient_n";
  }
  return "?";
}

std::vector<int> rank_methods(std::span<const MethodSummary> summaries, double target) {
  const std::size_t m = summaries.size();
  // A method without a single successful run ranks after every other method.
  auto rejected = [&](std::size_t i) {
    return summaries[i].verdict == Verdict::Rejected || summaries[i].n_runs == 0;
  };
  auto key = [&](std::size_t i) {
    if (summaries[i].n_runs == 0) return std::numeric_limits<double>::infinity();
    return rejected(i) ? std::abs(summaries[i].inclusion - target) : summaries[i].mean_tightness;
  };
  auto before = [&](std::size_t a, std::size_t b) {
    if (rejected(a) != rejected(b)) return !rejected(a);
    return key(a) < key(b);
  };

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), before);

  std::vector<int> ranks(m, 0);
  for (std::size_t pos = 0; pos < m; ++pos) {
    const std::size_t i = order[pos];
    if (pos > 0 && !before(order[pos - 1], i)) {
      ranks[i] = ranks[order[pos - 1]];
    } else {
      ranks[i] = static_cast<int>(pos) + 1;
    }
  }
  return ranks;
}

void BenchmarkSpec::validate() const {
  if (scenarios.empty()) throw InputError("benchmark has no scenarios");
  if (methods.empty()) throw InputError("benchmark has no methods");
  if (repetitions == 0) throw InputError("repetitions must be at least 1");
  if (!(coverage > 0.0 && coverage < 1.0)) throw InputError("coverage must lie in (0, 1)");
  if (bootstraps < EstimatorConfig::kMinBootstraps) {
    throw InputError("number of bootstraps must be at least " +
                     std::to_string(EstimatorConfig::kMinBootstraps));
  }
  for (const auto& s : scenarios) s.validate();
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t cell) noexcept {
  return derive_seed(seed, {0x63656c6cULL, cell});
}

MethodSummary summarize_method(Method method, std::span<const RunRecord> runs, double coverage) {
  MethodSummary summary;
  summary.method = method;
  std::vector<RunRecord> ok;
  for (const auto& r : runs) {
    if (r.status == RunStatus::Ok) {
      ok.push_back(r);
    } else {
      ++summary.failures;
    }
  }
  summary.n_runs = ok.size();
  if (ok.empty()) {
    summary.inclusion = std::numeric_limits<double>::quiet_NaN();
    summary.mean_tightness = std::numeric_limits<double>::quiet_NaN();
    summary.mean_point_bias = std::numeric_limits<double>::quiet_NaN();
    return summary;
  }
  const auto it = inclusion_and_tightness(ok);
  summary.inclusion = it.inclusion;
  summary.mean_tightness = it.mean_tightness;
  double bias = 0.0;
  std::size_t covered = 0;
  for (const auto& r : ok) {
    bias += r.point_estimate - r.true_perf;
    covered += r.true_perf >= r.ci_low;
  }
  summary.mean_point_bias = bias / static_cast<double>(ok.size());
  if (ok.size() < kMinRunsForVerdict) {
    summary.verdict = Verdict::Insufficient;
  } else {
    const auto test = exact_binomial_test(covered, ok.size(), coverage);
    summary.p_value = test.p_value;
    summary.verdict = test.reject ? Verdict::Rejected : Verdict::NotRejected;
  }
  return summary;
}

namespace {

struct RepetitionResult {
  RepetitionInfo info;
  std::vector<RunRecord> runs;
};

RepetitionResult run_repetition(const BenchmarkSpec& spec, const SimScenario& scenario,
                                std::size_t cell, std::size_t rep) {
  const SimulatedDataset data = generate_scenario(scenario, rep);
  const MetricId metric = MetricId::auc();

  RepetitionResult out;
  const auto pooled = pooled_performance(data.pm, metric);
  out.info.rep = rep;
  out.info.folds = data.folds;
  out.info.full_winner = select_winner(pooled, metric.higher_is_better());
  out.info.apparent_perf = pooled[out.info.full_winner];
  out.info.winner_true_perf = data.true_auc[out.info.full_winner];

  for (const Method method : spec.methods) {
    EstimatorConfig cfg;
    cfg.method = method;
    cfg.bootstraps = spec.bootstraps;
    cfg.coverage = spec.coverage;
    cfg.sided = spec.sided;
    cfg.metric = metric;
    cfg.seed = derive_seed(spec.seed, {cell, rep, static_cast<std::uint64_t>(method)});
    cfg.jobs = 1;

    RunRecord record;
    record.method = method;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const EstimateResult r = estimate(data.pm, cfg);
      record.ci_low = r.ci_low;
      record.ci_high = r.ci_high;
      record.point_estimate = r.point_estimate;
      record.winner = r.winner;
      record.true_perf = data.true_auc[r.winner];
    } catch (const EstimationError& e) {
      record.status = RunStatus::Failed;
      record.error = e.what();
    }
    record.wall_time = std::chrono::steady_clock::now() - t0;
    out.runs.push_back(std::move(record));
  }
  return out;
}

}  // namespace

BenchmarkReport run_benchmark(const BenchmarkSpec& spec) {
  spec.validate();
  const std::size_t cells = spec.scenarios.size();
  const std::size_t reps = spec.repetitions;

  std::vector<SimScenario> scenarios = spec.scenarios;
  for (std::size_t c = 0; c < cells; ++c) {
    scenarios[c].seed = cell_seed(spec.seed, c);
    scenarios[c].repetitions = reps;
  }

  std::vector<RepetitionResult> results(cells * reps);
  parallel_for(cells * reps, spec.jobs, [&](std::size_t task) {
    const std::size_t cell = task / reps;
    const std::size_t rep = task % reps;
    results[task] = run_repetition(spec, scenarios[cell], cell, rep);
  });

  BenchmarkReport report;
  report.spec = spec;
  report.average_rank.assign(spec.methods.size(), 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    CellReport cell;
    cell.scenario = scenarios[c];
    double bias = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
      auto& res = results[c * reps + r];
      bias += res.info.apparent_perf - res.info.winner_true_perf;
      cell.repetitions.push_back(res.info);
      cell.runs.push_back(std::move(res.runs));
    }
    cell.mean_apparent_bias = bias / static_cast<double>(reps);

    for (std::size_t m = 0; m < spec.methods.size(); ++m) {
      std::vector<RunRecord> method_runs;
      for (const auto& rep_runs : cell.runs) method_runs.push_back(rep_runs[m]);
      cell.methods.push_back(summarize_method(spec.methods[m], method_runs, spec.coverage));
    }
    const auto ranks = rank_methods(cell.methods, spec.coverage);
    for (std::size_t m = 0; m < ranks.size(); ++m) {
      cell.methods[m].rank = ranks[m];
      report.average_rank[m] += ranks[m];
    }
    report.cells.push_back(std::move(cell));
  }
  for (auto& r : report.average_rank) r /= static_cast<double>(cells);
  return report;
}

std::string_view to_string(TimingAxis axis) noexcept {
  switch (axis) {
    case TimingAxis::Samples: return "n";
    case TimingAxis::Configs: return "c";
    case TimingAxis::Folds: return "k";
  }
  return "?";
}

TimingAxis parse_axis(std::string_view text) {
  if (text == "n" || text == "N") return TimingAxis::Samples;
  if (text == "c" || text == "C") return TimingAxis::Configs;
  if (text == "k" || text == "K") return TimingAxis::Folds;
  throw InputError("timing axis must be n, c or k, got '" + std::string(text) + "'");
}

double median(std::vector<double> values) {
  if (values.empty()) throw InputError("median of an empty sequence");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

std::vector<TimingRow> time_profile(TimingAxis axis, std::span<const std::size_t> values,
                                    const TimingSettings& settings) {
  if (!std::is_sorted(values.begin(), values.end())) {
    throw InputError("timing values must be sorted ascending");
  }
  if (settings.repetitions == 0) throw InputError("timing repetitions must be at least 1");

  // Values are interleaved within each repetition so that slow drift of the
  // machine affects every value alike.
  std::vector<SimulatedDataset> datasets;
  for (const std::size_t v : values) {
    SimScenario scenario;
    scenario.samples = settings.samples;
    scenario.configs = settings.configs;
    std::size_t folds = settings.folds;
    switch (axis) {
      case TimingAxis::Samples: scenario.samples = v; break;
      case TimingAxis::Configs: scenario.configs = v; break;
      case TimingAxis::Folds: folds = v; break;
    }
    scenario.balance = 0.5;
    scenario.seed = derive_seed(settings.seed, {static_cast<std::uint64_t>(axis), v});
    datasets.push_back(generate_with_folds(scenario, 0, folds));
  }

  auto ms = [](std::chrono::nanoseconds d) { return std::chrono::duration<double, std::milli>(d).count(); };
  struct Samples {
    std::vector<double> bbc_total, bbc_boot, bbcf_total, bbcf_boot;
  };
  std::vector<Samples> samples(values.size());
  EstimatorConfig cfg;
  cfg.bootstraps = settings.bootstraps;
  cfg.jobs = 1;
  for (std::size_t r = 0; r <= settings.repetitions; ++r) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      cfg.seed = derive_seed(settings.seed, {values[i], r});
      const EstimateResult a = bbc(datasets[i].pm, cfg);
      const EstimateResult b = bbc_f(datasets[i].pm, cfg);
      if (r == 0) continue;  // warm-up
      auto& out = samples[i];
      out.bbc_total.push_back(ms(a.times.prepare + a.times.bootstrap));
      out.bbc_boot.push_back(ms(a.times.bootstrap));
      out.bbcf_total.push_back(ms(b.times.prepare + b.times.bootstrap));
      out.bbcf_boot.push_back(ms(b.times.bootstrap));
    }
  }

  std::vector<TimingRow> rows;
  for (std::size_t i = 0; i < values.size(); ++i) {
    TimingRow row;
    row.value = values[i];
    row.bbc_total_ms = median(samples[i].bbc_total);
    row.bbc_bootstrap_ms = median(samples[i].bbc_boot);
    row.bbcf_total_ms = median(samples[i].bbcf_total);
    row.bbcf_bootstrap_ms = median(samples[i].bbcf_boot);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ciforge
