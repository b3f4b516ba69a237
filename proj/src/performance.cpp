#include "walker/performance.hpp"

#include <limits>
#include <string>

#include "walker/error.hpp"

namespace walker {

namespace {

constexpr std::array<std::string_view, kNumTargets> kColumns{
    "mass_lbs",           "handle_dx_in",        "handle_dy_in",    "handle_dz_in", "leg_displ_in",
    "min_safety_factor",  "com_longitudinal_in", "com_vertical_in", "theta_deg"};
constexpr std::array<std::string_view, kNumTargets> kShort{
    "mass",              "handle_dx",        "handle_dy",    "handle_dz", "leg_displ",
    "min_safety_factor", "com_longitudinal", "com_vertical", "theta"};

}  // namespace

std::string_view column_name(Target t) { return kColumns[static_cast<std::size_t>(t)]; }
std::string_view short_name(Target t) { return kShort[static_cast<std::size_t>(t)]; }

Target target_from_string(std::string_view name) {
  for (int i = 0; i < kNumTargets; ++i) {
    if (kColumns[i] == name || kShort[i] == name) return static_cast<Target>(i);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown performance target '" + std::string(name) + "'");
}

std::string_view to_string(TipStatus s) {
  switch (s) {
    case TipStatus::Unset: return "unset";
    case TipStatus::Tips: return "tips";
    case TipStatus::NoTip: return "no_tip";
  }
  return "unset";
}

TipStatus tip_status_from_string(std::string_view s) {
  if (s == "tips") return TipStatus::Tips;
  if (s == "no_tip") return TipStatus::NoTip;
  if (s == "unset" || s.empty()) return TipStatus::Unset;
  throw Error(ErrorCode::FormatError, "unknown tip status '" + std::string(s) + "'");
}

double PerformanceRecord::value(Target t) const {
  switch (t) {
    case Target::Mass: return mass_lbs;
    case Target::HandleDx: return handle_dx_in;
    case Target::HandleDy: return handle_dy_in;
    case Target::HandleDz: return handle_dz_in;
    case Target::LegDisplacement: return leg_displacement_in;
    case Target::MinSafetyFactor: return min_safety_factor;
    case Target::ComLongitudinal: return com_longitudinal_in;
    case Target::ComVertical: return com_vertical_in;
    case Target::Theta:
      // No tipping angle exists: better than any finite angle.
      if (tip_status == TipStatus::NoTip) return std::numeric_limits<double>::infinity();
      return theta_deg;
  }
  return 0.0;
}

void PerformanceRecord::set(Target t, double v) {
  switch (t) {
    case Target::Mass: mass_lbs = v; break;
    case Target::HandleDx: handle_dx_in = v; break;
    case Target::HandleDy: handle_dy_in = v; break;
    case Target::HandleDz: handle_dz_in = v; break;
    case Target::LegDisplacement: leg_displacement_in = v; break;
    case Target::MinSafetyFactor: min_safety_factor = v; break;
    case Target::ComLongitudinal: com_longitudinal_in = v; break;
    case Target::ComVertical: com_vertical_in = v; break;
    case Target::Theta:
      theta_deg = v;
      tip_status = TipStatus::Tips;
      break;
  }
}

}  // namespace walker
