#include "walker/optimizer/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "walker/csv.hpp"

namespace walker::optimizer {

bool PerformanceTargets::any() const {
  return std::any_of(bounds.begin(), bounds.end(), [](const TargetBound& b) { return b.constrained(); });
}

ConstraintReport constraint_check(const PerformanceRecord& p, const PerformanceTargets& targets,
                                  const TargetVector& normalizers) {
  ConstraintReport rep;
  rep.satisfied.fill(true);
  for (int i = 0; i < kNumTargets; ++i) {
    const auto t = static_cast<Target>(i);
    const TargetBound& b = targets[t];
    if (!b.constrained()) continue;
    double over = 0.0;
    if (t == Target::Theta && p.tip_status == TipStatus::NoTip) {
      over = b.upper ? 1.0 : 0.0;
    } else {
      const double v = p.value(t);
      const double norm = normalizers[i] > 0.0 ? normalizers[i] : 1.0;
      if (!std::isfinite(v)) {
        over = 1.0;
      } else {
        if (b.lower && v < *b.lower) over += (*b.lower - v) / norm;
        if (b.upper && v > *b.upper) over += (v - *b.upper) / norm;
      }
    }
    rep.satisfied[static_cast<std::size_t>(i)] = over == 0.0;
    rep.violation += over;
  }
  return rep;
}

std::string describe_violations(const PerformanceRecord& p, const PerformanceTargets& targets) {
  const ConstraintReport rep = constraint_check(p, targets);
  std::string out;
  for (int i = 0; i < kNumTargets; ++i) {
    if (rep.satisfied[static_cast<std::size_t>(i)]) continue;
    const auto t = static_cast<Target>(i);
    const TargetBound& b = targets[t];
    if (!out.empty()) out += "; ";
    out += std::string(short_name(t));
    if (b.lower) out += " >= " + csv::format(*b.lower);
    if (b.lower && b.upper) out += " and";
    if (b.upper) out += " <= " + csv::format(*b.upper);
    out += " (got " + csv::format(p.value(t)) + ")";
  }
  return out;
}

PerformanceTargets resolve_targets(const TargetSpecs& specs, const PerformanceRecord& baseline) {
  PerformanceTargets out;
  for (int i = 0; i < kNumTargets; ++i) {
    const BoundSpec& s = specs[static_cast<std::size_t>(i)];
    const double base = baseline.value(static_cast<Target>(i));
    auto resolve = [&](const BoundValue& v) { return v.from_baseline ? base : v.value; };
    if (s.lower) out.bounds[static_cast<std::size_t>(i)].lower = resolve(*s.lower);
    if (s.upper) out.bounds[static_cast<std::size_t>(i)].upper = resolve(*s.upper);
  }
  return out;
}

}  // namespace walker::optimizer
