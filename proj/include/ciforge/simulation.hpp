#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ciforge/core.hpp"
#include "ciforge/rng.hpp"

namespace ciforge {

/// Settings of one synthetic model-selection scenario.
struct SimScenario {
  std::size_t samples = 500;   // N
  std::size_t configs = 100;   // C
  double balance = 0.5;        // P(label == 1), the minority class probability
  double alpha = 24.0;         // Beta shape of the true AUCs
  double beta = 6.0;
  std::uint64_t seed = 1;
  std::size_t repetitions = 200;

  /// Throws InputError when a field is out of range.
  void validate() const;

  friend bool operator==(const SimScenario&, const SimScenario&) = default;
};

struct SimulatedDataset {
  PredictionMatrix pm;
  std::vector<double> true_auc;  // per configuration
  std::size_t folds = 0;
  std::size_t minority_count = 0;
};

inline constexpr std::size_t kMaxFolds = 10;

/// i.i.d. Bernoulli(balance) labels, redrawn as a whole until both classes
/// have at least two members.
std::vector<std::uint8_t> sample_labels(std::size_t n, double balance, Rng& rng);

/// C i.i.d. Beta(alpha, beta) draws, each the ratio of two Gamma draws.
std::vector<double> sample_true_aucs(std::size_t configs, double alpha,
                                     double beta, Rng& rng);

/// Class-1 mean shift that yields the given AUC between N(0,1) and N(mu,1):
/// mu = sqrt(2) * Phi^-1(auc).
double mu_from_auc(double auc);

/// Column-major N x C scores: N(0,1) for label 0, N(mu_j,1) for label 1.
std::vector<double> generate_predictions(std::span<const std::uint8_t> labels,
                                         std::span<const double> mus, Rng& rng);

/// Stratified fold assignment: each class is shuffled and dealt round-robin,
/// so every fold holds at least one sample of each class.
std::vector<std::uint32_t> assign_folds(std::span<const std::uint8_t> labels,
                                        std::size_t folds, Rng& rng);

std::size_t minority_count(std::span<const std::uint8_t> labels) noexcept;

/// Fold count used by the generator: min(10, minority count).
std::size_t scenario_folds(std::size_t minority) noexcept;

/// Repetition `rep` of a scenario. All randomness is drawn from substreams of
/// (scenario.seed, rep), so equal inputs give bit-identical datasets.
SimulatedDataset generate_scenario(const SimScenario& scenario, std::size_t rep);

/// Same generator with an explicit fold count instead of min(10, minority).
SimulatedDataset generate_with_folds(const SimScenario& scenario,
                                     std::size_t rep, std::size_t folds);

}  // namespace ciforge
