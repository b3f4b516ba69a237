#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "walker/design.hpp"
#include "walker/error.hpp"
#include "walker/frame.hpp"
#include "walker/performance.hpp"
#include "walker/units.hpp"

namespace walker {

/// SI inputs to the static tipping model.
template <typename Scalar>
struct StabilityInput {
  Scalar mass;             // kg
  Scalar leg_width;        // m, lateral distance between the leg tips
  Scalar handle_distance;  // m, lateral distance between the handles
  Scalar height;           // m
  Scalar force;            // N, outward force at the handles
  Scalar gravity = Scalar(units::kStandardGravity);
};

template <typename Scalar>
struct StabilityResult {
  TipStatus status = TipStatus::NoTip;
  std::optional<Scalar> phi;    // rad
  std::optional<Scalar> theta;  // rad
};

/// The walker tips when the applied force leans past theta from vertical:
///   phi   = asin(m g L1 / (2 F sqrt(H^2 + ((L1 - L2) / 2)^2)))
///   theta = phi + atan((L1 - L2) / (2 H))
/// When the asin argument exceeds 1 no angle tips the walker (NoTip).
template <typename Scalar>
StabilityResult<Scalar> tipping_angle(const StabilityInput<Scalar>& s) {
  using std::asin;
  using std::atan;
  using std::sqrt;
  if (!(s.height > Scalar(0)) || !(s.force > Scalar(0)) || !(s.mass > Scalar(0)) ||
      !(s.leg_width > Scalar(0)) || !(s.handle_distance > Scalar(0)) || !(s.gravity > Scalar(0))) {
    throw Error(ErrorCode::InvalidStabilityInput, "mass, widths, height, force and gravity must be positive");
  }
  const Scalar splay = (s.leg_width - s.handle_distance) / Scalar(2);
  const Scalar arg = s.mass * s.gravity * s.leg_width / (Scalar(2) * s.force * sqrt(s.height * s.height + splay * splay));
  StabilityResult<Scalar> r;
  if (arg > Scalar(1)) return r;
  r.status = TipStatus::Tips;
  r.phi = asin(arg);
  r.theta = *r.phi + atan(splay / s.height);
  return r;
}

/// Builds the SI input from a design, a frame mass in pounds and a force in lbf.
StabilityInput<double> stability_input(const DesignVector& d, double mass_lbs, double force_lbf);

/// Vertical center-of-mass height above the base plane, inches. Lower is
/// more stable after a tipping disturbance.
double dynamic_stability(const FrameGraph& f);

/// Fills theta_deg and tip_status from each record's mass and its design's
/// geometry. Throws Error(IncompleteRecord) for a missing or non-positive mass
/// and Error(DimensionMismatch) when the spans differ in length.
void annotate_dataset(std::span<PerformanceRecord> records, std::span<const DesignVector> designs, double force_lbf);

/// Theta as a learnable number: NoTip maps to the asin(1) limit (phi = 90 deg).
double theta_for_learning(const DesignVector& d, const PerformanceRecord& p);

}  // namespace walker
