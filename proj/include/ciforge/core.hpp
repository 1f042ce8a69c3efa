#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ciforge/metrics.hpp"
#include "ciforge/rng.hpp"

namespace ciforge {

/// Out-of-sample prediction matrix produced by cross-validating C
/// configurations over N samples split into K folds.
///
/// Scores are stored column-major: column j holds configuration j's
/// predictions for samples 0..N-1. Instances are immutable after
/// construction; the constructor enforces every invariant and throws
/// InputError otherwise.
class PredictionMatrix {
 public:
  PredictionMatrix(std::size_t samples, std::size_t configs,
                   std::vector<double> scores_column_major,
                   std::vector<std::uint8_t> labels,
                   std::vector<std::uint32_t> fold_of, std::size_t folds);

  std::size_t samples() const noexcept { return samples_; }
  std::size_t configs() const noexcept { return configs_; }
  std::size_t folds() const noexcept { return folds_; }

  std::span<const double> column(std::size_t config) const noexcept {
    return {scores_.data() + config * samples_, samples_};
  }
  double score(std::size_t sample, std::size_t config) const noexcept {
    return scores_[config * samples_ + sample];
  }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }
  std::span<const std::uint32_t> fold_of() const noexcept { return fold_of_; }

  std::size_t positives() const noexcept { return positives_; }
  std::size_t negatives() const noexcept { return samples_ - positives_; }

 private:
  std::size_t samples_;
  std::size_t configs_;
  std::size_t folds_;
  std::vector<double> scores_;
  std::vector<std::uint8_t> labels_;
  std::vector<std::uint32_t> fold_of_;
  std::size_t positives_ = 0;
};

/// One parsed data row before validation. Label and fold are kept as raw
/// integers so that validation can report contract violations precisely.
struct RawRow {
  std::string sample_id;
  long long fold = 0;
  long long label = 0;
  std::vector<double> scores;
  std::size_t line = 0;  // 1-based source line, 0 if unknown
};

/// Builds a PredictionMatrix from parsed rows. Fold labels are remapped to
/// 0..K-1 in order of first appearance.
PredictionMatrix validate_matrix(std::span<const RawRow> rows);

/// Per-fold metric values, K rows by C columns, stored column-major.
class FoldPerformanceMatrix {
 public:
  FoldPerformanceMatrix(std::size_t folds, std::size_t configs,
                        std::vector<double> perf_column_major, MetricId metric);

  std::size_t folds() const noexcept { return folds_; }
  std::size_t configs() const noexcept { return configs_; }
  const MetricId& metric() const noexcept { return metric_; }

  double at(std::size_t fold, std::size_t config) const noexcept {
    return perf_[config * folds_ + fold];
  }
  std::span<const double> column(std::size_t config) const noexcept {
    return {perf_.data() + config * folds_, folds_};
  }

 private:
  std::size_t folds_;
  std::size_t configs_;
  std::vector<double> perf_;
  MetricId metric_;
};

/// Converts a prediction matrix into its fold-performance matrix. Throws
/// DegenerateFoldError naming the first fold on which the metric is undefined.
FoldPerformanceMatrix fold_performance(const PredictionMatrix& pm,
                                       const MetricId& metric);

struct BootstrapSplit {
  std::vector<std::uint32_t> in_bag;      // with multiplicity, size == rows
  std::vector<std::uint32_t> out_of_bag;  // ascending, distinct
  std::size_t attempts = 1;
};

/// Splits an explicit draw into in-bag and out-of-bag rows. The out-of-bag
/// set may be empty here; draw_bootstrap_split is the function that redraws.
BootstrapSplit split_from_draw(std::size_t rows,
                               std::span<const std::uint32_t> draw);

/// Fills `counts` (size rows) with the multiplicities of `rows` draws with
/// replacement from {0..rows-1}.
inline void draw_counts(Rng& rng, std::span<std::uint32_t> counts) {
  for (auto& c : counts) c = 0;
  const std::size_t rows = counts.size();
  for (std::size_t d = 0; d < rows; ++d) ++counts[rng.uniform_index(rows)];
}

inline constexpr std::size_t kDefaultSplitAttempts = 1000;

/// Draws rows indices with replacement, redrawing while the out-of-bag set is
/// empty. Throws RedrawBudgetExhausted after max_attempts draws.
BootstrapSplit draw_bootstrap_split(std::size_t rows, Rng& rng,
                                    std::size_t max_attempts = kDefaultSplitAttempts);

}  // namespace ciforge
