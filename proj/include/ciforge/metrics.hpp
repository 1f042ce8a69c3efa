#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ciforge {

enum class MetricTag { Auc, Accuracy };

struct MetricId {
  MetricTag tag = MetricTag::Auc;
  // Decision threshold for Accuracy; a score >= threshold predicts class 1.
  double threshold = 0.5;

  static MetricId auc() { return {MetricTag::Auc, 0.5}; }
  static MetricId accuracy(double threshold = 0.5) {
    return {MetricTag::Accuracy, threshold};
  }

  // Every metric in scope is higher-is-better.
  bool higher_is_better() const noexcept { return true; }
  std::string_view name() const noexcept;

  friend bool operator==(const MetricId&, const MetricId&) = default;
};

MetricId parse_metric(std::string_view name);

/// Mann-Whitney AUC with ties counted as one half. O(N log N).
/// Throws DegenerateMetricError when only one class is present.
double auc(std::span<const double> scores, std::span<const std::uint8_t> labels);

/// Fraction of samples with (score >= threshold) == label.
double accuracy(std::span<const double> scores,
                std::span<const std::uint8_t> labels, double threshold = 0.5);

double evaluate(const MetricId& metric, std::span<const double> scores,
                std::span<const std::uint8_t> labels);

/// One score column sorted once, so the AUC of any integer reweighting of its
/// samples (bootstrap multiplicities, out-of-bag indicators) costs O(N).
class PresortedAuc {
 public:
  PresortedAuc(std::span<const double> scores,
               std::span<const std::uint8_t> labels);

  /// Weighted AUC: every sample counts `weights[i]` times. Returns nullopt if
  /// either class has zero total weight.
  std::optional<double> weighted(std::span<const std::uint32_t> weights) const;

  std::size_t size() const noexcept { return codes_.size(); }

 private:
  // (sample index << 1) | label, in ascending score order.
  std::vector<std::uint32_t> codes_;
  // group_end_[g] is one past the last sorted position of tie group g; empty
  // when the column has no ties.
  std::vector<std::uint32_t> group_end_;
};

/// Per-sample correctness of one column under a threshold, for weighted
/// accuracy over bootstrap reweightings.
class PresortedAccuracy {
 public:
  PresortedAccuracy(std::span<const double> scores,
                    std::span<const std::uint8_t> labels, double threshold);

  std::optional<double> weighted(std::span<const std::uint32_t> weights) const;

 private:
  std::vector<std::uint8_t> correct_;
};

}  // namespace ciforge
