#pragma once

#include <array>
#include <string_view>

#include <Eigen/Core>

namespace walker {

/// Learned / constrained performance targets, in CSV order.
enum class Target : int {
  Mass = 0,
  HandleDx,
  HandleDy,
  HandleDz,
  LegDisplacement,
  MinSafetyFactor,
  ComLongitudinal,
  ComVertical,
  Theta,
};

inline constexpr int kNumTargets = 9;
inline constexpr int kNumSimulatedValues = 8;

using TargetVector = Eigen::Matrix<double, kNumTargets, 1>;

/// Dataset column for a target ("mass_lbs", ..., "theta_deg").
std::string_view column_name(Target t);
/// Short name used on the command line and in reports ("mass", ...).
std::string_view short_name(Target t);
/// Accepts either the short name or the column name.
Target target_from_string(std::string_view name);

enum class TipStatus { Unset, Tips, NoTip };
std::string_view to_string(TipStatus s);
TipStatus tip_status_from_string(std::string_view s);

/// Simulated or predicted performance, in inches, pounds and degrees.
/// handle_dy is measured outward (away from the midplane) and averaged over
/// both handles; dx and dz are plain averages.
struct PerformanceRecord {
  double mass_lbs = 0.0;
  double handle_dx_in = 0.0;
  double handle_dy_in = 0.0;
  double handle_dz_in = 0.0;
  double leg_displacement_in = 0.0;
  double min_safety_factor = 0.0;
  double com_longitudinal_in = 0.0;
  double com_vertical_in = 0.0;
  double theta_deg = 0.0;  // meaningful only when tip_status == Tips
  TipStatus tip_status = TipStatus::Unset;

  double value(Target t) const;
  void set(Target t, double v);
};

}  // namespace walker
