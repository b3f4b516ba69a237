#pragma once

#include <span>
#include <vector>

namespace walker::analysis {

/// Sample Pearson correlation. Throws Error(DimensionMismatch) for unequal
/// lengths or fewer than 2 values; NaN when either series is constant.
double pearson(std::span<const double> a, std::span<const double> b);

/// 0.9 * min(sd, IQR / 1.34) * n^(-1/5), falling back to sd when the IQR is
/// zero and to a small positive width for constant data.
double silverman_bandwidth(std::span<const double> values);

struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;
};

/// Gaussian-kernel density on evenly spaced abscissae spanning
/// [min - 4h, max + 4h]: `points` of them, or more (up to 65536) when needed
/// to keep the spacing under h / 2. Throws Error(InsufficientData) for fewer than 2 values.
KdeCurve gaussian_kde(std::span<const double> values, int points = 256);

/// Density of the same estimator at a single point.
double kde_at(std::span<const double> values, double bandwidth, double x);

double trapezoid(std::span<const double> x, std::span<const double> y);

}  // namespace walker::analysis
