#include "walker/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "walker/error.hpp"
#include "walker/units.hpp"

namespace walker {

namespace {

using units::inches_to_meters;

constexpr double kCoincidentTol = 1e-9;  // m

struct FrameBuilder {
  FrameGraph frame;

  int add_node(const Eigen::Vector3d& p) {
    frame.nodes.push_back(p);
    return static_cast<int>(frame.nodes.size()) - 1;
  }

  void add_member(int a, int b, const TubeSection<double>& section, Material m, MemberGroup g) {
    frame.members.push_back(Member{a, b, section, m, g});
  }

  // Chains members along a straight polyline of existing nodes.
  void add_chain(const std::vector<int>& nodes, const TubeSection<double>& section, Material m,
                 MemberGroup g) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) add_member(nodes[i], nodes[i + 1], section, m, g);
  }
};

}  // namespace

bool FrameGraph::connected() const {
  if (nodes.empty()) return false;
  std::vector<int> parent(nodes.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const Member& m : members) parent[find(m.node_a)] = find(m.node_b);
  const int root = find(0);
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (find(static_cast<int>(i)) != root) return false;
  }
  return true;
}

Eigen::Vector3d FrameGraph::base_center() const {
  Eigen::Vector3d c = Eigen::Vector3d::Zero();
  if (sensors.front_tip[0] < 0) return c;  // hand-built frame without leg tips
  for (int side = 0; side < 2; ++side) {
    c += nodes[sensors.front_tip[side]] + nodes[sensors.rear_tip[side]];
  }
  c /= 4.0;
  c.z() = 0.0;
  return c;
}

FrameGraph build_frame(const DesignVector& d, const FeasibilityLimits& limits) {
  const FeasibilityReport report = check_feasibility(d, limits);
  if (!report.valid) {
    std::string msg = "design fails";
    for (Violation v : report.violations) msg += " " + std::string(to_string(v));
    throw Error(ErrorCode::InfeasibleDesign, msg);
  }

  const double height = inches_to_meters(d[Param::OverallHeight]);
  const double base_length = inches_to_meters(d[Param::BaseLength]);
  const double base_width = inches_to_meters(d[Param::BaseWidth]);
  const double handle_distance = inches_to_meters(d[Param::HandleDistance]);
  const double handle_length = inches_to_meters(d[Param::HandleLength]);
  const double side_h = inches_to_meters(d[Param::SideCrossbeamHeight]);
  const double upper_h = inches_to_meters(d[Param::FrontUpperCrossbeamHeight]);
  const double lower_h = inches_to_meters(d[Param::FrontLowerCrossbeamHeight]);
  const double half_bend = units::degrees_to_radians(d[Param::FrontCrossbeamBendAngle]) / 2.0;

  const auto frame_section = section_from(inches_to_meters(d[Param::FrameTubeInnerDiameter]),
                                          inches_to_meters(d[Param::FrameTubeThickness]));
  const auto front_section = section_from(inches_to_meters(d[Param::FrontCrossbeamInnerDiameter]),
                                          inches_to_meters(d[Param::CrossbeamTubeThickness]));
  const auto side_section = section_from(inches_to_meters(d[Param::SideCrossbeamInnerDiameter]),
                                         inches_to_meters(d[Param::CrossbeamTubeThickness]));

  // Legs run straight from the base corners to the handle ends, so both the
  // lateral and the longitudinal extent vary linearly with height.
  auto half_width_at = [&](double z) { return base_width / 2 + (handle_distance - base_width) / 2 * z / height; };
  auto front_x_at = [&](double z) { return base_length / 2 + (handle_length - base_length) / 2 * z / height; };
  auto rear_x_at = [&](double z) { return -front_x_at(z); };

  std::vector<double> front_levels{side_h, upper_h, lower_h};
  std::sort(front_levels.begin(), front_levels.end());
  front_levels.erase(std::unique(front_levels.begin(), front_levels.end(),
                                 [](double a, double b) { return std::abs(a - b) < kCoincidentTol; }),
                     front_levels.end());

  FrameBuilder b;
  std::array<std::vector<std::pair<double, int>>, 2> front_leg_nodes;  // (z, node) per side

  for (int side = 0; side < 2; ++side) {
    const double s = side == 0 ? 1.0 : -1.0;
    auto on_front = [&](double z) { return Eigen::Vector3d(front_x_at(z), s * half_width_at(z), z); };
    auto on_rear = [&](double z) { return Eigen::Vector3d(rear_x_at(z), s * half_width_at(z), z); };

    const int front_tip = b.add_node(on_front(0.0));
    const int rear_tip = b.add_node(on_rear(0.0));
    const int top_front = b.add_node(on_front(height));
    const int top_rear = b.add_node(on_rear(height));
    const int handle_mid = b.add_node(Eigen::Vector3d(0.0, s * handle_distance / 2, height));

    std::vector<int> front_chain{front_tip};
    for (double z : front_levels) {
      const int n = b.add_node(on_front(z));
      front_chain.push_back(n);
      front_leg_nodes[side].emplace_back(z, n);
    }
    front_chain.push_back(top_front);

    const int rear_side = b.add_node(on_rear(side_h));

    b.add_chain(front_chain, frame_section, d.frame_material, MemberGroup::Frame);
    b.add_chain({rear_tip, rear_side, top_rear}, frame_section, d.frame_material, MemberGroup::Frame);
    b.add_chain({top_rear, handle_mid, top_front}, frame_section, d.frame_material, MemberGroup::Frame);

    auto front_at = [&](double z) {
      for (const auto& [level, node] : front_leg_nodes[side]) {
        if (std::abs(level - z) < kCoincidentTol) return node;
      }
      throw Error(ErrorCode::InfeasibleDesign, "missing front leg junction");
    };
    // Side crossbeams belong to the outer frame material group.
    b.add_member(front_at(side_h), rear_side, side_section, d.frame_material, MemberGroup::SideCrossbeam);

    b.frame.sensors.handle[side] = handle_mid;
    b.frame.sensors.front_tip[side] = front_tip;
    b.frame.sensors.rear_tip[side] = rear_tip;
  }

  // Each front crossbeam is two straight segments meeting at a forward apex on
  // the midplane; the included angle at the apex is the bend angle.
  for (double z : {upper_h, lower_h}) {
    auto node_at = [&](int side) {
      for (const auto& [level, node] : front_leg_nodes[side]) {
        if (std::abs(level - z) < kCoincidentTol) return node;
      }
      throw Error(ErrorCode::InfeasibleDesign, "missing front crossbeam junction");
    };
    const double w = half_width_at(z);
    const double apex_offset = w * std::cos(half_bend) / std::sin(half_bend);
    const int apex = b.add_node(Eigen::Vector3d(front_x_at(z) + apex_offset, 0.0, z));
    b.add_member(node_at(0), apex, front_section, d.front_crossbeam_material, MemberGroup::FrontCrossbeam);
    b.add_member(apex, node_at(1), front_section, d.front_crossbeam_material, MemberGroup::FrontCrossbeam);
  }

  return std::move(b.frame);
}

MassProperties mass_properties(const FrameGraph& f) {
  double mass = 0.0;
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < f.members.size(); ++i) {
    const Member& m = f.members[i];
    const double mi = material_properties(m.material).density * m.section.area * f.member_length(i);
    mass += mi;
    moment += mi * 0.5 * (f.nodes[m.node_a] + f.nodes[m.node_b]);
  }
  MassProperties out{mass, Eigen::Vector3d::Zero()};
  if (mass > 0.0) out.com = moment / mass - f.base_center();
  return out;
}

}  // namespace walker
