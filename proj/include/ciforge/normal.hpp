#pragma once

namespace ciforge {

/// Standard normal CDF.
double normal_cdf(double z) noexcept;

/// Inverse of the standard normal CDF. Rational approximation followed by one
/// Halley refinement against normal_cdf; absolute error below 1e-9 on
/// [1e-8, 1 - 1e-8]. Throws InputError unless 0 < p < 1.
double normal_quantile(double p);

}  // namespace ciforge
