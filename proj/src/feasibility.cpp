#include "walker/feasibility.hpp"

#include <algorithm>
#include <cmath>

namespace walker {

std::string_view to_string(Violation v) {
  switch (v) {
    case Violation::NonPositiveLength: return "NonPositiveLength";
    case Violation::CrosspieceAboveHeight: return "CrosspieceAboveHeight";
    case Violation::ImproperJunction: return "ImproperJunction";
    case Violation::DiameterAboveMax: return "DiameterAboveMax";
    case Violation::DiameterBelowMin: return "DiameterBelowMin";
    case Violation::HandleClearance: return "HandleClearance";
  }
  return "Unknown";
}

bool FeasibilityReport::has(Violation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

FeasibilityReport check_feasibility(const DesignVector& d, const FeasibilityLimits& limits) {
  FeasibilityReport report;
  auto flag = [&](Violation v) {
    if (!report.has(v)) report.violations.push_back(v);
  };

  // Written as !(x > 0) so NaN is rejected as well.
  for (int k = 0; k < kNumContinuous; ++k) {
    if (!(d.values[k] > 0.0)) flag(Violation::NonPositiveLength);
  }

  const double height = d[Param::OverallHeight];
  for (Param p : {Param::SideCrossbeamHeight, Param::FrontUpperCrossbeamHeight,
                  Param::FrontLowerCrossbeamHeight}) {
    if (!(d[p] < height)) flag(Violation::CrosspieceAboveHeight);
  }

  const double frame_od = d.frame_outer_diameter();
  const double front_od = d.front_crossbeam_outer_diameter();
  const double side_od = d.side_crossbeam_outer_diameter();
  // Crossbeams terminate on the legs: the attached tube may not be wider
  // than its host. A bend above 180 deg folds the crossbeam back into the frame.
  if (front_od > frame_od || side_od > frame_od || d[Param::FrontCrossbeamBendAngle] > 180.0) {
    flag(Violation::ImproperJunction);
  }

  for (double od : {frame_od, front_od, side_od}) {
    if (od > limits.max_outer_diameter) flag(Violation::DiameterAboveMax);
    if (!(od >= limits.min_outer_diameter)) flag(Violation::DiameterBelowMin);
  }

  const double handles = d[Param::HandleDistance];
  if (!(handles >= limits.min_handle_distance && handles <= limits.max_handle_distance)) {
    flag(Violation::HandleClearance);
  }

  report.valid = report.violations.empty();
  return report;
}

}  // namespace walker
