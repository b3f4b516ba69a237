#pragma once

#include <array>
#include <optional>
#include <string>

#include "walker/performance.hpp"

namespace walker::optimizer {

/// Closed interval, one-sided bound, or unconstrained (both empty).
struct TargetBound {
  std::optional<double> lower;
  std::optional<double> upper;

  bool constrained() const { return lower.has_value() || upper.has_value(); }
};

struct PerformanceTargets {
  std::array<TargetBound, kNumTargets> bounds{};

  TargetBound& operator[](Target t) { return bounds[static_cast<std::size_t>(t)]; }
  const TargetBound& operator[](Target t) const { return bounds[static_cast<std::size_t>(t)]; }
  bool any() const;
};

struct ConstraintReport {
  std::array<bool, kNumTargets> satisfied{};
  double violation = 0.0;  // 0 iff every bound holds

  bool ok() const { return violation == 0.0; }
};

/// Sums each bound overshoot divided by the target's normalizer. A NoTip
/// record satisfies any theta lower bound and overshoots a theta upper bound
/// by exactly 1.
ConstraintReport constraint_check(const PerformanceRecord& p, const PerformanceTargets& targets,
                                  const TargetVector& normalizers = TargetVector::Ones());

/// Human-readable list of violated bounds, e.g. "mass <= 6 (got 6.3)".
std::string describe_violations(const PerformanceRecord& p, const PerformanceTargets& targets);

/// One bound endpoint as written in a scenario: a number, or the query
/// design's predicted value.
struct BoundValue {
  bool from_baseline = false;
  double value = 0.0;
};

struct BoundSpec {
  std::optional<BoundValue> lower;
  std::optional<BoundValue> upper;
};

using TargetSpecs = std::array<BoundSpec, kNumTargets>;

/// Replaces baseline endpoints with the baseline record's values.
PerformanceTargets resolve_targets(const TargetSpecs& specs, const PerformanceRecord& baseline);

}  // namespace walker::optimizer
