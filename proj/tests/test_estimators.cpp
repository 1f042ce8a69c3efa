#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ciforge/estimators.hpp"
#include "ciforge/simulation.hpp"
#include "oracles.hpp"

using namespace ciforge;

namespace {

EstimatorConfig config(Method m, std::size_t b = 200, std::uint64_t seed = 3) {
  EstimatorConfig cfg;
  cfg.method = m;
  cfg.bootstraps = b;
  cfg.seed = seed;
  return cfg;
}

SimulatedDataset small_dataset(std::size_t n = 60, std::size_t c = 6, std::uint64_t seed = 5) {
  SimScenario s;
  s.samples = n;
  s.configs = c;
  s.seed = seed;
  return generate_scenario(s, 0);
}

// Mean aggregation exposed only through score(), so the engine takes its
// generic per-column path.
class PlainFoldMean {
 public:
  explicit PlainFoldMean(const FoldPerformanceMatrix& perf) : inner_(perf) {}
  std::size_t rows() const { return inner_.rows(); }
  std::size_t columns() const { return inner_.columns(); }
  bool higher_is_better() const { return true; }
  std::optional<double> score(std::size_t j, std::span<const std::uint32_t> w) const {
    return inner_.score(j, w);
  }

 private:
  FoldMeanEvaluator inner_;
};

class NeverDefined {
 public:
  std::size_t rows() const { return 5; }
  std::size_t columns() const { return 2; }
  bool higher_is_better() const { return true; }
  std::optional<double> score(std::size_t, std::span<const std::uint32_t>) const { return std::nullopt; }
};

PredictionMatrix separating_matrix() {
  // column 1 separates the classes perfectly, column 0 ranks them backwards
  std::vector<double> scores{0.9, 0.8, 0.7, 0.6, 0.4, 0.3, 0.2, 0.1,  // c0
                             0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9};  // c1
  return PredictionMatrix(8, 2, scores, {0, 0, 0, 0, 1, 1, 1, 1}, {0, 1, 0, 1, 0, 1, 0, 1}, 2);
}

}  // namespace

TEST_SUITE("winner selection") {
  TEST_CASE("ties, singletons and direction") {
    CHECK(select_winner(std::vector<double>{0.7, 0.9, 0.9}, true) == 1);
    CHECK(select_winner(std::vector<double>{0.7}, true) == 0);
    CHECK(select_winner(std::vector<double>{0.3, 0.2}, false) == 1);
    CHECK_THROWS_AS(select_winner(std::vector<double>{}, true), InputError);
  }

  TEST_CASE("full-data winners follow their own rankings") {
    const auto data = small_dataset(80, 12);
    const auto pooled = pooled_performance(data.pm, MetricId::auc());
    const auto means = fold_means(fold_performance(data.pm, MetricId::auc()));
    const auto pooled_best = static_cast<std::size_t>(
        std::max_element(pooled.begin(), pooled.end()) - pooled.begin());
    const auto mean_best =
        static_cast<std::size_t>(std::max_element(means.begin(), means.end()) - means.begin());
    CHECK(bbc(data.pm, config(Method::Bbc)).winner == pooled_best);
    CHECK(naive_bootstrap(data.pm, config(Method::Naive)).winner == pooled_best);
    CHECK(bbc_f(data.pm, config(Method::BbcF)).winner == mean_best);
  }
}

TEST_SUITE("configuration") {
  TEST_CASE("validation") {
    auto cfg = config(Method::Bbc, 49);
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg.bootstraps = 50;
    CHECK_NOTHROW(cfg.validate());
    cfg.coverage = 1.0;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    CHECK(config(Method::Bbc, 1000).attempt_budget() == 100000);
  }

  TEST_CASE("method names") {
    CHECK(parse_method("bbc") == Method::Bbc);
    CHECK(parse_method("bbc-f") == Method::BbcF);
    CHECK(parse_method("nb") == Method::Naive);
    CHECK(to_string(Method::BbcF) == "bbc-f");
    CHECK_THROWS_AS(parse_method("bootstrap"), InputError);
  }
}

TEST_SUITE("bootstrap over samples") {
  TEST_CASE("matches a straight-line reference bit for bit") {
    const auto data = small_dataset(30, 4, 11);
    const auto ref = oracle::bbc(data.pm, 150, 77);
    const auto got = bbc(data.pm, config(Method::Bbc, 150, 77));
    CHECK(got.winner == ref.winner);
    REQUIRE(got.bootstrap_values.size() == ref.values.size());
    for (std::size_t b = 0; b < ref.values.size(); ++b) REQUIRE(got.bootstrap_values[b] == ref.values[b]);
  }

  TEST_CASE("perfect separation gives a degenerate interval at 1") {
    const auto pm = separating_matrix();
    for (Method m : {Method::Bbc, Method::Naive}) {
      const auto r = estimate(pm, config(m, 100));
      CHECK(r.winner == 1);
      CHECK(r.ci_low == 1.0);
      CHECK(r.ci_high == 1.0);
      for (double v : r.bootstrap_values) CHECK(v == 1.0);
    }
  }

  TEST_CASE("values lie in the metric codomain and there are B of them") {
    const auto data = small_dataset();
    for (Method m : {Method::Bbc, Method::BbcF, Method::Naive}) {
      const auto r = estimate(data.pm, config(m, 300));
      CHECK(r.bootstrap_values.size() == 300);
      for (double v : r.bootstrap_values) REQUIRE((v >= 0.0 && v <= 1.0));
      CHECK(r.attempts >= 300);
      CHECK(r.ci_low <= r.ci_high);
    }
  }

  TEST_CASE("strictly increasing transforms change nothing") {
    const auto data = small_dataset(50, 5, 21);
    std::vector<double> scores(data.pm.samples() * data.pm.configs());
    for (std::size_t j = 0; j < data.pm.configs(); ++j) {
      for (std::size_t i = 0; i < data.pm.samples(); ++i) {
        scores[j * data.pm.samples() + i] = std::atan(data.pm.score(i, j)) * 10.0 + 4.0;
      }
    }
    const PredictionMatrix moved(data.pm.samples(), data.pm.configs(), scores,
                                 {data.pm.labels().begin(), data.pm.labels().end()},
                                 {data.pm.fold_of().begin(), data.pm.fold_of().end()}, data.pm.folds());
    for (Method m : {Method::Bbc, Method::BbcF, Method::Naive}) {
      const auto a = estimate(data.pm, config(m));
      const auto b = estimate(moved, config(m));
      CHECK(a.winner == b.winner);
      CHECK(a.bootstrap_values == b.bootstrap_values);
    }
  }

  TEST_CASE("distinct-row weighting is available") {
    const auto data = small_dataset();
    auto cfg = config(Method::Bbc, 200);
    const auto multiplicity = bbc(data.pm, cfg);
    cfg.in_bag = InBagWeighting::DistinctRows;
    const auto distinct = bbc(data.pm, cfg);
    CHECK(distinct.bootstrap_values.size() == 200);
    CHECK(distinct.bootstrap_values != multiplicity.bootstrap_values);
  }

  TEST_CASE("accuracy works as the metric") {
    const auto data = small_dataset();
    auto cfg = config(Method::Bbc);
    cfg.metric = MetricId::accuracy(0.5);
    for (Method m : {Method::Bbc, Method::BbcF, Method::Naive}) {
      cfg.method = m;
      const auto r = estimate(data.pm, cfg);
      CHECK(r.point_estimate > 0.4);
      CHECK(r.point_estimate <= 1.0);
    }
  }
}

TEST_SUITE("bootstrap over folds") {
  TEST_CASE("two-by-two enumeration") {
    // rows are folds: fold 0 = (0.6, 0.8), fold 1 = (1.0, 0.4)
    const FoldPerformanceMatrix perf(2, 2, {0.6, 1.0, 0.8, 0.4}, MetricId::auc());
    const FoldMeanEvaluator eval(perf);

    // Exhaustive: bags (0,0) and (1,1) are equally likely; (0,1) and (1,0) are redrawn.
    double expected = 0.0;
    int kept = 0;
    for (std::uint32_t a = 0; a < 2; ++a) {
      for (std::uint32_t b = 0; b < 2; ++b) {
        std::vector<std::uint32_t> counts(2, 0);
        ++counts[a];
        ++counts[b];
        if (counts[0] && counts[1]) continue;
        std::vector<double> in(2);
        for (std::size_t j = 0; j < 2; ++j) in[j] = *eval.score(j, counts);
        const std::size_t w = select_winner(in, true);
        const std::vector<std::uint32_t> oob{counts[0] ? 0u : 1u, counts[1] ? 0u : 1u};
        expected += *eval.score(w, oob);
        ++kept;
      }
    }
    expected /= kept;
    CHECK(expected == doctest::Approx(0.5).epsilon(1e-15));

    BootstrapPlan plan;
    plan.bootstraps = 10000;
    plan.seed = 12;
    plan.attempt_budget = 100 * plan.bootstraps;
    const auto run = run_selection_bootstrap(eval, plan);
    std::size_t low = 0;
    for (double v : run.values) {
      REQUIRE((v == 0.4 || v == 0.6));
      low += v == 0.4;
    }
    const double mean = std::accumulate(run.values.begin(), run.values.end(), 0.0) / 10000;
    CHECK(std::abs(mean - expected) < 0.02);
    CHECK(std::abs(static_cast<double>(low) / 10000 - 0.5) < 0.02);
    CHECK(run.attempts > 15000);  // half of all draws are redrawn
  }

  TEST_CASE("equal to the generic engine on the fold-performance matrix") {
    const auto data = small_dataset(120, 15, 8);
    const auto cfg = config(Method::BbcF, 500, 41);
    const auto got = bbc_f(data.pm, cfg);

    const auto perf = fold_performance(data.pm, cfg.metric);
    BootstrapPlan plan{cfg.bootstraps, cfg.seed, cfg.attempt_budget(), cfg.in_bag, 1};
    const auto generic = run_selection_bootstrap(PlainFoldMean(perf), plan);
    CHECK(got.bootstrap_values == generic.values);

    const auto ref = oracle::bbc_f(perf, cfg.bootstraps, cfg.seed);
    CHECK(got.winner == ref.winner);
    for (std::size_t b = 0; b < ref.values.size(); ++b) {
      REQUIRE(got.bootstrap_values[b] == doctest::Approx(ref.values[b]).epsilon(1e-12));
    }
  }

  TEST_CASE("a single configuration with equal fold performance") {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
    std::vector<std::uint32_t> folds;
    // Every fold: negatives 0.1, 0.4; positives 0.3, 0.9 -> AUC 0.75
    for (std::uint32_t k = 0; k < 5; ++k) {
      for (double s : {0.1, 0.4}) scores.push_back(s), labels.push_back(0), folds.push_back(k);
      for (double s : {0.3, 0.9}) scores.push_back(s), labels.push_back(1), folds.push_back(k);
    }
    const PredictionMatrix pm(20, 1, scores, labels, folds, 5);
    const auto r = bbc_f(pm, config(Method::BbcF, 100));
    CHECK(r.point_estimate == 0.75);
    CHECK(r.ci_low == 0.75);
    CHECK(r.ci_high == 0.75);
  }

  TEST_CASE("one fold is not enough") {
    const PredictionMatrix pm(4, 1, {0.1, 0.9, 0.2, 0.8}, {0, 1, 0, 1}, {0, 0, 0, 0}, 1);
    CHECK_THROWS_AS(bbc_f(pm, config(Method::BbcF)), EstimationError);
  }
}

TEST_SUITE("naive bootstrap") {
  TEST_CASE("single configuration: both estimates near the full-sample AUC") {
    const auto data = small_dataset(80, 1, 13);
    const double full = auc(data.pm.column(0), data.pm.labels());
    for (Method m : {Method::Bbc, Method::Naive}) {
      const auto r = estimate(data.pm, config(m, 10000, 9));
      double var = 0.0;
      for (double v : r.bootstrap_values) var += (v - r.point_estimate) * (v - r.point_estimate);
      const double sd = std::sqrt(var / (r.bootstrap_values.size() - 1));
      CHECK(r.winner == 0);
      CHECK(std::abs(r.point_estimate - full) < 2.0 * sd);
    }
  }
}

TEST_SUITE("engine") {
  TEST_CASE("results do not depend on the worker count") {
    const auto data = small_dataset(100, 20, 2);
    for (Method m : {Method::Bbc, Method::BbcF, Method::Naive}) {
      auto cfg = config(m, 400, 5);
      const auto one = estimate(data.pm, cfg);
      cfg.jobs = 8;
      const auto eight = estimate(data.pm, cfg);
      CHECK(one.bootstrap_values == eight.bootstrap_values);
      CHECK(one.attempts == eight.attempts);
      CHECK(one.ci_low == eight.ci_low);
      CHECK(one.point_estimate == eight.point_estimate);
    }
  }

  TEST_CASE("redraw budget exhaustion is loud") {
    for (std::size_t jobs : {1, 4}) {
      BootstrapPlan plan;
      plan.bootstraps = 60;
      plan.attempt_budget = 6000;
      plan.jobs = jobs;
      try {
        run_selection_bootstrap(NeverDefined{}, plan);
        FAIL("expected RedrawBudgetExhausted");
      } catch (const RedrawBudgetExhausted& e) {
        CHECK(std::string(e.what()).find("bbc-f") != std::string::npos);
      }
      CHECK_THROWS_AS(run_fixed_bootstrap(NeverDefined{}, 0, plan), RedrawBudgetExhausted);
    }
  }

  TEST_CASE("interval brackets the point estimate on simulated data") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto data = small_dataset(60, 10, seed);
      for (Method m : {Method::Bbc, Method::BbcF, Method::Naive}) {
        for (Sidedness sided : {Sidedness::OneSided, Sidedness::TwoSided}) {
          auto cfg = config(m, 500, seed);
          cfg.sided = sided;
          const auto r = estimate(data.pm, cfg);
          CHECK(r.ci_low <= r.point_estimate);
          CHECK(r.point_estimate <= r.ci_high);
        }
      }
    }
  }

  TEST_CASE("the lower bound can exceed the mean of a skewed sample") {
    // 40 zeros and 960 ones: the 5% quantile is 1 while the mean is 0.96.
    std::vector<double> v(1000, 1.0);
    std::fill(v.begin(), v.begin() + 40, 0.0);
    const auto ci = ci_from_bootstrap(v, 0.95, Sidedness::OneSided);
    CHECK(ci.low == 1.0);
    CHECK(std::accumulate(v.begin(), v.end(), 0.0) / 1000 < ci.low);
  }
}
