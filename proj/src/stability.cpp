#include "walker/stability.hpp"

#include <string>

namespace walker {

StabilityInput<double> stability_input(const DesignVector& d, double mass_lbs, double force_lbf) {
  StabilityInput<double> s;
  s.mass = units::pounds_to_kilograms(mass_lbs);
  s.leg_width = units::inches_to_meters(d[Param::BaseWidth]);
  s.handle_distance = units::inches_to_meters(d[Param::HandleDistance]);
  s.height = units::inches_to_meters(d[Param::OverallHeight]);
  s.force = units::lbf_to_newtons(force_lbf);
  return s;
}

double dynamic_stability(const FrameGraph& f) { return units::meters_to_inches(mass_properties(f).com.z()); }

void annotate_dataset(std::span<PerformanceRecord> records, std::span<const DesignVector> designs, double force_lbf) {
  if (records.size() != designs.size()) {
    throw Error(ErrorCode::DimensionMismatch, "records and designs differ in length");
  }
  for (std::size_t i = 0; i < records.size(); ++i) {
    PerformanceRecord& r = records[i];
    if (!(r.mass_lbs > 0.0)) {
      throw Error(ErrorCode::IncompleteRecord, "record " + std::to_string(i) + " has no mass");
    }
    const auto result = tipping_angle(stability_input(designs[i], r.mass_lbs, force_lbf));
    r.tip_status = result.status;
    r.theta_deg = result.theta ? units::radians_to_degrees(*result.theta) : 0.0;
  }
}

double theta_for_learning(const DesignVector& d, const PerformanceRecord& p) {
  if (p.tip_status == TipStatus::Tips) return p.theta_deg;
  const double splay = (d[Param::BaseWidth] - d[Param::HandleDistance]) / 2.0;
  return 90.0 + units::radians_to_degrees(std::atan(splay / d[Param::OverallHeight]));
}

}  // namespace walker
