#include "ciforge/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "ciforge/errors.hpp"

namespace ciforge {

std::string_view to_string(Sidedness sided) noexcept {
  return sided == Sidedness::OneSided ? "one" : "two";
}

Sidedness parse_sidedness(std::string_view text) {
  if (text == "one") return Sidedness::OneSided;
  if (text == "two") return Sidedness::TwoSided;
  throw InputError("sidedness must be 'one' or 'two', got '" + std::string(text) + "'");
}

namespace {

double sorted_quantile(std::span<const double> sorted, double q, QuantileRule rule) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (rule == QuantileRule::LowerOrderStatistic) return sorted[lo];
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double empirical_quantile(std::span<const double> values, double q, QuantileRule rule) {
  if (values.empty()) throw InputError("quantile of an empty sequence");
  if (!(q >= 0.0 && q <= 1.0)) throw InputError("quantile level must lie in [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_quantile(sorted, q, rule);
}

Interval ci_from_bootstrap(std::span<const double> values, double coverage, Sidedness sided,
                           QuantileRule rule) {
  if (values.empty()) throw InputError("confidence interval of an empty sequence");
  if (!(coverage > 0.0 && coverage < 1.0)) throw InputError("coverage must lie in (0, 1)");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sided == Sidedness::OneSided) {
    return {sorted_quantile(sorted, 1.0 - coverage, rule), sorted.back()};
  }
  const double tail = (1.0 - coverage) / 2.0;
  return {sorted_quantile(sorted, tail, rule), sorted_quantile(sorted, 1.0 - tail, rule)};
}

}  // namespace ciforge
