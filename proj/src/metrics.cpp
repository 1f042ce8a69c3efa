#include "ciforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ciforge/errors.hpp"

namespace ciforge {

std::string_view MetricId::name() const noexcept {
  return tag == MetricTag::Auc ? "auc" : "accuracy";
}

MetricId parse_metric(std::string_view name) {
  if (name == "auc") return MetricId::auc();
  if (name == "accuracy") return MetricId::accuracy();
  throw InputError("unknown metric '" + std::string(name) + "'");
}

namespace {

void check_lengths(std::span<const double> scores,
                   std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw InputError("scores and labels differ in length");
  }
  for (double s : scores) {
    if (!std::isfinite(s)) throw InputError("non-finite score");
  }
}

std::vector<std::uint32_t> sorted_order(std::span<const double> scores) {
  std::vector<std::uint32_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return scores[a] < scores[b];
  });
  return order;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  check_lengths(scores, labels);
  const auto order = sorted_order(scores);

  // Sum over tie groups of pos_in_group * (neg_below + neg_in_group / 2),
  // kept doubled so it stays an exact integer.
  std::uint64_t twice_wins = 0;
  std::uint64_t neg_below = 0;
  std::uint64_t pos_total = 0;
  for (std::size_t start = 0; start < order.size();) {
    std::size_t end = start;
    std::uint64_t pos = 0;
    std::uint64_t neg = 0;
    while (end < order.size() && scores[order[end]] == scores[order[start]]) {
      (labels[order[end]] ? pos : neg) += 1;
      ++end;
    }
    twice_wins += pos * (2 * neg_below + neg);
    neg_below += neg;
    pos_total += pos;
    start = end;
  }
  if (pos_total == 0 || neg_below == 0) {
    throw DegenerateMetricError("AUC is undefined: only one class present");
  }
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(pos_total) * static_cast<double>(neg_below));
}

double accuracy(std::span<const double> scores,
                std::span<const std::uint8_t> labels, double threshold) {
  check_lengths(scores, labels);
  if (scores.empty()) throw InputError("accuracy of an empty sample");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    correct += (scores[i] >= threshold) == (labels[i] != 0);
  }
  return static_cast<double>(correct) / static_cast<double>(scores.size());
}

double evaluate(const MetricId& metric, std::span<const double> scores,
                std::span<const std::uint8_t> labels) {
  return metric.tag == MetricTag::Auc ? auc(scores, labels)
                                      : accuracy(scores, labels, metric.threshold);
}

PresortedAuc::PresortedAuc(std::span<const double> scores,
                           std::span<const std::uint8_t> labels) {
  check_lengths(scores, labels);
  const auto order = sorted_order(scores);
  codes_.resize(order.size());
  bool ties = false;
  for (std::size_t k = 0; k < order.size(); ++k) {
    codes_[k] = (order[k] << 1) | (labels[order[k]] ? 1u : 0u);
    if (k > 0 && scores[order[k]] == scores[order[k - 1]]) ties = true;
  }
  if (ties) {
    for (std::size_t k = 1; k < order.size(); ++k) {
      if (scores[order[k]] != scores[order[k - 1]]) {
        group_end_.push_back(static_cast<std::uint32_t>(k));
      }
    }
    group_end_.push_back(static_cast<std::uint32_t>(order.size()));
  }
}

std::optional<double> PresortedAuc::weighted(
    std::span<const std::uint32_t> weights) const {
  std::uint64_t twice_wins = 0;
  std::uint64_t neg_below = 0;
  std::uint64_t pos_total = 0;

  if (group_end_.empty()) {
    // No ties: a positive beats every negative sorted before it.
    std::uint64_t wins = 0;
    for (const std::uint32_t code : codes_) {
      const std::uint64_t w = weights[code >> 1];
      const std::uint64_t pos_mask = 0 - static_cast<std::uint64_t>(code & 1u);
      wins += (w * neg_below) & pos_mask;
      pos_total += w & pos_mask;
      neg_below += w & ~pos_mask;
    }
    twice_wins = 2 * wins;
  } else {
    std::size_t k = 0;
    for (const std::uint32_t end : group_end_) {
      std::uint64_t pos = 0;
      std::uint64_t neg = 0;
      for (; k < end; ++k) {
        const std::uint32_t code = codes_[k];
        const std::uint64_t w = weights[code >> 1];
        (code & 1u ? pos : neg) += w;
      }
      twice_wins += pos * (2 * neg_below + neg);
      neg_below += neg;
      pos_total += pos;
    }
  }

  if (pos_total == 0 || neg_below == 0) return std::nullopt;
  return static_cast<double>(twice_wins) /
         (2.0 * static_cast<double>(pos_total) * static_cast<double>(neg_below));
}

PresortedAccuracy::PresortedAccuracy(std::span<const double> scores,
                                     std::span<const std::uint8_t> labels,
                                     double threshold)
    : correct_(scores.size()) {
  check_lengths(scores, labels);
  for (std::size_t i = 0; i < scores.size(); ++i) {
    correct_[i] = (scores[i] >= threshold) == (labels[i] != 0);
  }
}

std::optional<double> PresortedAccuracy::weighted(
    std::span<const std::uint32_t> weights) const {
  std::uint64_t hits = 0;
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < correct_.size(); ++i) {
    hits += correct_[i] * static_cast<std::uint64_t>(weights[i]);
    total += weights[i];
  }
  if (total == 0) return std::nullopt;
  return static_cast<double>(hits) / static_cast<double>(total);
}

}  // namespace ciforge
