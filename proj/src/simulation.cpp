#include "ciforge/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "ciforge/errors.hpp"
#include "ciforge/normal.hpp"

namespace ciforge {

void SimScenario::validate() const {
  if (samples < 10) throw InputError("sample count must be at least 10");
  if (configs < 1) throw InputError("configuration count must be at least 1");
  if (!(balance > 0.0)) throw InputError("minority probability must be > 0");
  if (!(balance <= 0.5)) throw InputError("minority probability must be <= 0.5");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InputError("Beta shape parameters must be > 0");
}

std::size_t minority_count(std::span<const std::uint8_t> labels) noexcept {
  const auto ones = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  return std::min(ones, labels.size() - ones);
}

std::size_t scenario_folds(std::size_t minority) noexcept { return std::min(kMaxFolds, minority); }

std::vector<std::uint8_t> sample_labels(std::size_t n, double balance, Rng& rng) {
  if (!(balance > 0.0 && balance <= 0.5)) throw InputError("minority probability must lie in (0, 0.5]");
  if (n < 4) throw InputError("need at least 4 samples to hold two of each class");
  std::vector<std::uint8_t> labels(n);
  std::bernoulli_distribution draw(balance);
  do {
    for (auto& y : labels) y = draw(rng) ? 1 : 0;
  } while (minority_count(labels) < 2);
  return labels;
}

std::vector<double> sample_true_aucs(std::size_t configs, double alpha, double beta, Rng& rng) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw InputError("Beta shape parameters must be > 0");
  std::gamma_distribution<double> ga(alpha, 1.0);
  std::gamma_distribution<double> gb(beta, 1.0);
  std::vector<double> aucs(configs);
  for (auto& a : aucs) {
    const double x = ga(rng);
    const double y = gb(rng);
    a = x / (x + y);
  }
  return aucs;
}

double mu_from_auc(double auc) {
  if (!(auc > 0.0 && auc < 1.0)) {
    throw InputError("AUC must lie strictly inside (0, 1); the mean shift is infinite otherwise");
  }
  return std::numbers::sqrt2 * normal_quantile(auc);
}

std::vector<double> generate_predictions(std::span<const std::uint8_t> labels,
                                         std::span<const double> mus, Rng& rng) {
  const std::size_t n = labels.size();
  std::vector<double> scores(n * mus.size());
  std::normal_distribution<double> noise(0.0, 1.0);
  for (std::size_t j = 0; j < mus.size(); ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      scores[j * n + i] = noise(rng) + (labels[i] ? mus[j] : 0.0);
    }
  }
  return scores;
}

std::vector<std::uint32_t> assign_folds(std::span<const std::uint8_t> labels, std::size_t folds,
                                        Rng& rng) {
  const std::size_t minority = minority_count(labels);
  if (folds < 2) throw InputError("need at least 2 folds");
  if (folds > minority) {
    throw InputError("fold count " + std::to_string(folds) + " exceeds minority class size " +
                     std::to_string(minority));
  }
  std::vector<std::uint32_t> fold_of(labels.size());
  std::size_t offset = 0;
  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<std::uint32_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = members.size(); i > 1; --i) {
      std::swap(members[i - 1], members[rng.uniform_index(i)]);
    }
    for (std::size_t t = 0; t < members.size(); ++t) {
      fold_of[members[t]] = static_cast<std::uint32_t>((offset + t) % folds);
    }
    offset = (offset + members.size()) % folds;
  }
  return fold_of;
}

namespace {

enum Stage : std::uint64_t { kLabels = 1, kAucs = 2, kScores = 3, kFolds = 4 };

SimulatedDataset generate(const SimScenario& s, std::size_t rep, std::size_t fixed_folds) {
  s.validate();
  Rng label_rng = Rng::for_stream(s.seed, {rep, kLabels});
  Rng auc_rng = Rng::for_stream(s.seed, {rep, kAucs});
  Rng score_rng = Rng::for_stream(s.seed, {rep, kScores});
  Rng fold_rng = Rng::for_stream(s.seed, {rep, kFolds});

  auto labels = sample_labels(s.samples, s.balance, label_rng);
  auto true_auc = sample_true_aucs(s.configs, s.alpha, s.beta, auc_rng);
  std::vector<double> mus(true_auc.size());
  std::transform(true_auc.begin(), true_auc.end(), mus.begin(), mu_from_auc);
  auto scores = generate_predictions(labels, mus, score_rng);

  const std::size_t minority = minority_count(labels);
  const std::size_t folds = fixed_folds ? fixed_folds : scenario_folds(minority);
  auto fold_of = assign_folds(labels, folds, fold_rng);

  return SimulatedDataset{
      PredictionMatrix(s.samples, s.configs, std::move(scores), std::move(labels),
                       std::move(fold_of), folds),
      std::move(true_auc), folds, minority};
}

}  // namespace

SimulatedDataset generate_scenario(const SimScenario& scenario, std::size_t rep) {
  return generate(scenario, rep, 0);
}

SimulatedDataset generate_with_folds(const SimScenario& scenario, std::size_t rep,
                                     std::size_t folds) {
  if (folds < 2) throw InputError("need at least 2 folds");
  return generate(scenario, rep, folds);
}

}  // namespace ciforge
