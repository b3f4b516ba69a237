#include "walker/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "walker/error.hpp"
#include "walker/units.hpp"

namespace walker::analysis {

namespace {

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return i + 1 < sorted.size() ? sorted[i] + frac * (sorted[i + 1] - sorted[i]) : sorted[i];
}

}  // namespace

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw Error(ErrorCode::DimensionMismatch, "pearson needs two equal-length series of at least 2 values");
  const double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(saa * sbb);
}

double silverman_bandwidth(std::span<const double> values) {
  if (values.size() < 2) throw Error(ErrorCode::InsufficientData, "bandwidth needs at least 2 values");
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  if (!(spread > 0.0)) spread = 1e-3 * std::max(1.0, std::abs(m));
  return 0.9 * spread * std::pow(static_cast<double>(values.size()), -0.2);
}

double kde_at(std::span<const double> values, double bandwidth, double x) {
  const double norm = 1.0 / (static_cast<double>(values.size()) * bandwidth * std::sqrt(2.0 * units::kPi));
  double s = 0.0;
  for (double v : values) {
    const double z = (x - v) / bandwidth;
    s += std::exp(-0.5 * z * z);
  }
  return s * norm;
}

KdeCurve gaussian_kde(std::span<const double> values, int points) {
  if (values.size() < 2) throw Error(ErrorCode::InsufficientData, "density estimate needs at least 2 values");
  if (points < 2) throw Error(ErrorCode::InvalidConfig, "density estimate needs at least 2 evaluation points");
  KdeCurve c;
  c.bandwidth = silverman_bandwidth(values);
  const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  const double lo = *lo_it - 4.0 * c.bandwidth, hi = *hi_it + 4.0 * c.bandwidth;
  // Heavy tails stretch the span; keep the spacing under half a bandwidth.
  const double needed = std::ceil((hi - lo) / (0.5 * c.bandwidth)) + 1.0;
  points = static_cast<int>(std::clamp(needed, static_cast<double>(points), 65536.0));
  c.x.resize(static_cast<std::size_t>(points));
  c.density.resize(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    c.x[static_cast<std::size_t>(i)] = x;
    c.density[static_cast<std::size_t>(i)] = kde_at(values, c.bandwidth, x);
  }
  return c;
}

double trapezoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "trapezoid needs equal-length series");
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

}  // namespace walker::analysis
