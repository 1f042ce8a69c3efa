#pragma once

// Slow, obviously-correct reimplementations used as test oracles. None of
// them shares code with the library beyond the RNG.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ciforge/core.hpp"
#include "ciforge/rng.hpp"

namespace oracle {

/// Pair-counting AUC over integer sample weights; nullopt when a class is
/// absent. Wins are doubled to stay integral, as in the fast path.
inline std::optional<double> pair_auc(std::span<const double> s, std::span<const std::uint8_t> y,
                                      std::span<const std::uint32_t> w) {
  std::uint64_t twice = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i]) pos += w[i]; else neg += w[i];
  }
  if (pos == 0 || neg == 0) return std::nullopt;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i] || !w[i]) continue;
    for (std::size_t k = 0; k < s.size(); ++k) {
      if (y[k] || !w[k]) continue;
      const std::uint64_t pair = std::uint64_t{w[i]} * w[k];
      if (s[i] > s[k]) twice += 2 * pair;
      else if (s[i] == s[k]) twice += pair;
    }
  }
  return static_cast<double>(twice) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

inline std::optional<double> pair_auc(std::span<const double> s, std::span<const std::uint8_t> y) {
  std::vector<std::uint32_t> ones(s.size(), 1);
  return pair_auc(s, y, ones);
}

/// P(X <= s) for X ~ Binomial(n, p) by forward pmf recurrence in long double.
inline long double binomial_lower_tail(std::size_t s, std::size_t n, double p) {
  const long double q = 1.0L - p;
  long double pmf = std::pow(q, static_cast<long double>(n));
  long double total = pmf;
  for (std::size_t k = 0; k < s; ++k) {
    pmf *= static_cast<long double>(n - k) / static_cast<long double>(k + 1) * (p / q);
    total += pmf;
  }
  return total;
}

/// v[floor(h)] + (h - floor(h)) * (v[floor(h) + 1] - v[floor(h)]), h = q (n - 1).
inline double interpolated_quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

/// Inverse standard normal CDF by bisection on erfc in long double.
inline long double normal_quantile_bisect(long double p) {
  long double lo = -40.0L, hi = 40.0L;
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    const long double cdf = 0.5L * std::erfc(-mid / std::sqrt(2.0L));
    (cdf < p ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

struct Reference {
  std::size_t winner = 0;
  std::vector<double> values;
};

/// Straight-line bootstrap over samples: rows are drawn one by one from
/// Rng::for_stream(seed, {b}), the in-bag multiset is materialized, every
/// configuration is scored on it, the first best one is scored on the rows
/// never drawn. Draws yielding an empty out-of-bag set or an undefined AUC are
/// repeated.
inline Reference bbc(const ciforge::PredictionMatrix& pm, std::size_t bootstraps,
                     std::uint64_t seed) {
  const std::size_t n = pm.samples();
  const std::size_t c = pm.configs();
  std::vector<std::uint8_t> labels(pm.labels().begin(), pm.labels().end());
  Reference ref;

  double best = -1.0;
  for (std::size_t j = 0; j < c; ++j) {
    const double a = *pair_auc(pm.column(j), labels);
    if (a > best) best = a, ref.winner = j;
  }

  for (std::size_t b = 0; b < bootstraps; ++b) {
    ciforge::Rng rng = ciforge::Rng::for_stream(seed, {b});
    for (;;) {
      std::vector<std::size_t> bag;
      for (std::size_t d = 0; d < n; ++d) bag.push_back(rng.uniform_index(n));
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < n; ++i) {
        if (std::find(bag.begin(), bag.end(), i) == bag.end()) out.push_back(i);
      }
      if (out.empty()) continue;

      auto score_on = [&](std::size_t j, const std::vector<std::size_t>& rows) {
        std::vector<double> s;
        std::vector<std::uint8_t> y;
        for (auto i : rows) s.push_back(pm.score(i, j)), y.push_back(labels[i]);
        return pair_auc(s, y);
      };

      bool defined = true;
      std::size_t winner = 0;
      double top = -1.0;
      for (std::size_t j = 0; j < c && defined; ++j) {
        const auto a = score_on(j, bag);
        if (!a) defined = false;
        else if (*a > top) top = *a, winner = j;
      }
      if (!defined) continue;
      const auto held = score_on(winner, out);
      if (!held) continue;
      ref.values.push_back(*held);
      break;
    }
  }
  return ref;
}

/// Same scheme over the rows of a fold-performance matrix, with means.
inline Reference bbc_f(const ciforge::FoldPerformanceMatrix& perf, std::size_t bootstraps,
                       std::uint64_t seed) {
  const std::size_t k = perf.folds();
  const std::size_t c = perf.configs();
  Reference ref;
  double best = -1.0;
  for (std::size_t j = 0; j < c; ++j) {
    double m = 0.0;
    for (std::size_t f = 0; f < k; ++f) m += perf.at(f, j);
    if (m / k > best) best = m / k, ref.winner = j;
  }
  for (std::size_t b = 0; b < bootstraps; ++b) {
    ciforge::Rng rng = ciforge::Rng::for_stream(seed, {b});
    for (;;) {
      std::vector<std::size_t> bag;
      for (std::size_t d = 0; d < k; ++d) bag.push_back(rng.uniform_index(k));
      std::vector<std::size_t> out;
      for (std::size_t f = 0; f < k; ++f) {
        if (std::find(bag.begin(), bag.end(), f) == bag.end()) out.push_back(f);
      }
      if (out.empty()) continue;
      std::size_t winner = 0;
      double top = -1.0;
      for (std::size_t j = 0; j < c; ++j) {
        double m = 0.0;
        for (auto f : bag) m += perf.at(f, j);
        m /= static_cast<double>(bag.size());
        if (m > top) top = m, winner = j;
      }
      double held = 0.0;
      for (auto f : out) held += perf.at(f, winner);
      ref.values.push_back(held / static_cast<double>(out.size()));
      break;
    }
  }
  return ref;
}

}  // namespace oracle
