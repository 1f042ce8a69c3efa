#include "ciforge/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "ciforge/errors.hpp"

namespace ciforge {

namespace {

std::string at_line(std::size_t line) {
  return line ? " (line " + std::to_string(line) + ")" : std::string();
}

}  // namespace

PredictionMatrix::PredictionMatrix(std::size_t samples, std::size_t configs,
                                   std::vector<double> scores_column_major,
                                   std::vector<std::uint8_t> labels,
                                   std::vector<std::uint32_t> fold_of,
                                   std::size_t folds)
    : samples_(samples),
      configs_(configs),
      folds_(folds),
      scores_(std::move(scores_column_major)),
      labels_(std::move(labels)),
      fold_of_(std::move(fold_of)) {
  if (samples_ < 2) throw InputError("need at least 2 samples");
  if (configs_ < 1) throw InputError("need at least 1 configuration");
  if (folds_ < 1) throw InputError("need at least 1 fold");
  if (scores_.size() != samples_ * configs_) {
    throw InputError("score matrix size does not match N x C");
  }
  if (labels_.size() != samples_ || fold_of_.size() != samples_) {
    throw InputError("labels and fold indices must have one entry per sample");
  }
  for (double s : scores_) {
    if (!std::isfinite(s)) throw InputError("non-finite score");
  }
  std::vector<std::size_t> fold_sizes(folds_, 0);
  for (std::size_t i = 0; i < samples_; ++i) {
    if (labels_[i] > 1) throw InputError("non-binary label");
    if (fold_of_[i] >= folds_) throw InputError("fold index out of range");
    ++fold_sizes[fold_of_[i]];
    positives_ += labels_[i];
  }
  for (std::size_t k = 0; k < folds_; ++k) {
    if (fold_sizes[k] == 0) throw InputError("fold " + std::to_string(k) + " is empty");
  }
}

PredictionMatrix validate_matrix(std::span<const RawRow> rows) {
  if (rows.size() < 2) throw InputError("need at least 2 samples");
  const std::size_t n = rows.size();
  const std::size_t c = rows.front().scores.size();
  if (c == 0) throw InputError("need at least 1 configuration" + at_line(rows.front().line));

  std::vector<double> scores(n * c);
  std::vector<std::uint8_t> labels(n);
  std::vector<std::uint32_t> fold_of(n);
  std::unordered_map<long long, std::uint32_t> fold_index;
  std::unordered_set<std::string> ids;

  for (std::size_t i = 0; i < n; ++i) {
    const RawRow& row = rows[i];
    if (row.scores.size() != c) {
      throw InputError("ragged row: expected " + std::to_string(c) + " scores, got " +
                       std::to_string(row.scores.size()) + at_line(row.line));
    }
    if (!ids.insert(row.sample_id).second) {
      throw InputError("duplicate sample_id '" + row.sample_id + "'" + at_line(row.line));
    }
    if (row.label != 0 && row.label != 1) {
      throw InputError("non-binary label " + std::to_string(row.label) + at_line(row.line));
    }
    labels[i] = static_cast<std::uint8_t>(row.label);
    const auto [it, inserted] =
        fold_index.try_emplace(row.fold, static_cast<std::uint32_t>(fold_index.size()));
    fold_of[i] = it->second;
    for (std::size_t j = 0; j < c; ++j) {
      if (!std::isfinite(row.scores[j])) {
        throw InputError("non-finite score in column c" + std::to_string(j) + at_line(row.line));
      }
      scores[j * n + i] = row.scores[j];
    }
  }
  // Folds come from labels that occur, so a remapped fold can only be empty if
  // the input had none; the constructor still enforces it.
  return PredictionMatrix(n, c, std::move(scores), std::move(labels), std::move(fold_of),
                          fold_index.size());
}

FoldPerformanceMatrix::FoldPerformanceMatrix(std::size_t folds, std::size_t configs,
                                             std::vector<double> perf_column_major,
                                             MetricId metric)
    : folds_(folds), configs_(configs), perf_(std::move(perf_column_major)), metric_(metric) {
  if (folds_ < 1 || configs_ < 1) throw InputError("empty fold-performance matrix");
  if (perf_.size() != folds_ * configs_) {
    throw InputError("fold-performance matrix size does not match K x C");
  }
  for (double p : perf_) {
    if (!(p >= 0.0 && p <= 1.0)) throw InputError("fold performance outside [0, 1]");
  }
}

FoldPerformanceMatrix fold_performance(const PredictionMatrix& pm, const MetricId& metric) {
  const std::size_t n = pm.samples();
  const std::size_t k_count = pm.folds();
  const std::size_t c = pm.configs();

  // Group sample indices by fold once; each column is then gathered per fold.
  std::vector<std::vector<std::uint32_t>> members(k_count);
  for (std::size_t i = 0; i < n; ++i) members[pm.fold_of()[i]].push_back(static_cast<std::uint32_t>(i));

  std::vector<std::vector<std::uint8_t>> fold_labels(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    std::size_t pos = 0;
    for (auto i : members[k]) {
      fold_labels[k].push_back(pm.labels()[i]);
      pos += pm.labels()[i];
    }
    if (metric.tag == MetricTag::Auc && (pos == 0 || pos == members[k].size())) {
      throw DegenerateFoldError(k, "fold " + std::to_string(k) +
                                       " contains a single class; AUC is undefined on it");
    }
  }

  std::vector<double> perf(k_count * c);
  std::vector<double> buffer;
  for (std::size_t j = 0; j < c; ++j) {
    const auto col = pm.column(j);
    for (std::size_t k = 0; k < k_count; ++k) {
      buffer.clear();
      for (auto i : members[k]) buffer.push_back(col[i]);
      perf[j * k_count + k] = evaluate(metric, buffer, fold_labels[k]);
    }
  }
  return FoldPerformanceMatrix(k_count, c, std::move(perf), metric);
}

BootstrapSplit split_from_draw(std::size_t rows, std::span<const std::uint32_t> draw) {
  BootstrapSplit split;
  split.in_bag.assign(draw.begin(), draw.end());
  std::vector<bool> seen(rows, false);
  for (auto r : draw) {
    if (r >= rows) throw InputError("bootstrap draw outside row range");
    seen[r] = true;
  }
  for (std::uint32_t r = 0; r < rows; ++r) {
    if (!seen[r]) split.out_of_bag.push_back(r);
  }
  return split;
}

BootstrapSplit draw_bootstrap_split(std::size_t rows, Rng& rng, std::size_t max_attempts) {
  if (rows < 2) throw InputError("bootstrap needs at least 2 rows");
  std::vector<std::uint32_t> draw(rows);
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    for (auto& r : draw) r = static_cast<std::uint32_t>(rng.uniform_index(rows));
    BootstrapSplit split = split_from_draw(rows, draw);
    if (!split.out_of_bag.empty()) {
      split.attempts = attempt;
      return split;
    }
  }
  throw RedrawBudgetExhausted("no bootstrap draw with a non-empty out-of-bag set in " +
                              std::to_string(max_attempts) + " attempts");
}

}  // namespace ciforge
