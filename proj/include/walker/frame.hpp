#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "walker/design.hpp"
#include "walker/feasibility.hpp"
#include "walker/section.hpp"

namespace walker {

// Axes: X longitudinal (forward), Y lateral (left positive), Z vertical.
// The base rectangle is centered on the origin in the z = 0 plane.

enum class MemberGroup { Frame, FrontCrossbeam, SideCrossbeam };

struct Member {
  int node_a;
  int node_b;
  TubeSection<double> section;
  Material material;
  MemberGroup group;
};

/// Index 0 is the left side (+Y), index 1 the right side (-Y).
struct SensorNodes {
  std::array<int, 2> handle{-1, -1};
  std::array<int, 2> front_tip{-1, -1};
  std::array<int, 2> rear_tip{-1, -1};
};

struct FrameGraph {
  std::vector<Eigen::Vector3d> nodes;  // meters
  std::vector<Member> members;
  SensorNodes sensors;

  double member_length(std::size_t i) const {
    return (nodes[members[i].node_b] - nodes[members[i].node_a]).norm();
  }
  bool connected() const;
  /// Midpoint of the four leg tips.
  Eigen::Vector3d base_center() const;
};

/// Builds the welded tube skeleton. Throws Error(InfeasibleDesign) when the
/// design fails check_feasibility under `limits`.
FrameGraph build_frame(const DesignVector& d, const FeasibilityLimits& limits = {});

struct MassProperties {
  double mass;             // kg
  Eigen::Vector3d com;     // m, relative to the base-rectangle midpoint
};

MassProperties mass_properties(const FrameGraph& f);

}  // namespace walker
