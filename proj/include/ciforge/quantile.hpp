#pragma once

#include <span>
#include <string_view>

namespace ciforge {

enum class QuantileRule {
  // v[floor(h)] + frac(h) * (v[ceil(h)] - v[floor(h)]), h = q * (n - 1)
  Interpolated,
  // v[floor(h)]; never above the interpolated value
  LowerOrderStatistic,
};

enum class Sidedness { OneSided, TwoSided };

std::string_view to_string(Sidedness sided) noexcept;
Sidedness parse_sidedness(std::string_view text);

/// Empirical q-quantile of `values` (any order). Throws InputError on an
/// empty sequence or q outside [0, 1].
double empirical_quantile(std::span<const double> values, double q,
                          QuantileRule rule = QuantileRule::Interpolated);

struct Interval {
  double low;
  double high;
};

/// One-sided: [quantile(1 - coverage), max].
/// Two-sided: [quantile((1 - coverage) / 2), quantile(1 - (1 - coverage) / 2)].
Interval ci_from_bootstrap(std::span<const double> values, double coverage,
                           Sidedness sided,
                           QuantileRule rule = QuantileRule::Interpolated);

}  // namespace ciforge
