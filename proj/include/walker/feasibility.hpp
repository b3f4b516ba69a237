#pragma once

#include <string_view>
#include <vector>

#include "walker/design.hpp"

namespace walker {

enum class Violation {
  NonPositiveLength,
  CrosspieceAboveHeight,
  ImproperJunction,
  DiameterAboveMax,
  DiameterBelowMin,
  HandleClearance,
};

std::string_view to_string(Violation v);

/// Thresholds in inches.
struct FeasibilityLimits {
  double min_outer_diameter = 0.2;
  double max_outer_diameter = 1.25;
  double min_handle_distance = 14.0;
  double max_handle_distance = 28.0;
};

struct FeasibilityReport {
  bool valid = true;
  std::vector<Violation> violations;

  bool has(Violation v) const;
};

/// Runs all six geometric checks; each failed check is listed once.
FeasibilityReport check_feasibility(const DesignVector& d, const FeasibilityLimits& limits = {});

}  // namespace walker
