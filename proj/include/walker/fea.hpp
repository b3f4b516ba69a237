#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "walker/design.hpp"
#include "walker/frame.hpp"
#include "walker/performance.hpp"

namespace walker::fea {

using Vector6d = Eigen::Matrix<double, 6, 1>;
template <typename Scalar>
using Matrix12 = Eigen::Matrix<Scalar, 12, 12>;

/// Handle loads in lbf. The down force is the total over both handles; the
/// lateral force acts outward on each handle.
struct LoadCase {
  double handle_down_force_lbf = 350.0;
  double handle_lateral_force_lbf = 17.5;

  LoadCase scaled(double k) const { return {handle_down_force_lbf * k, handle_lateral_force_lbf * k}; }
};

enum class Support {
  Free,
  Pinned,  // translations fixed
  Roller,  // lateral and vertical translation fixed, rolls longitudinally
  Clamped, // all six DOF fixed
};

struct BoundarySpec {
  Support rear_tip = Support::Pinned;
  Support front_tip = Support::Roller;
};

/// Two-node, 12-DOF Euler-Bernoulli space-frame element. `rotation` maps
/// global to local coordinates (rows are the local x, y, z axes).
struct BeamElement {
  int node_a;
  int node_b;
  int member;
  TubeSection<double> section;
  Material material;
  double length;
  Eigen::Matrix3d rotation;
};

struct DiscretizedFrame {
  std::vector<Eigen::Vector3d> nodes;
  std::vector<BeamElement> elements;
  std::vector<int> elements_per_member;
  SensorNodes sensors;

  Eigen::Index dof_count() const { return 6 * static_cast<Eigen::Index>(nodes.size()); }
};

/// Splits every member into ceil(L / cap) equal elements; frame nodes keep
/// their indices. Throws Error(MeshError) for a zero-length member or a
/// non-positive cap.
DiscretizedFrame discretize(const FrameGraph& frame, double max_element_length);

/// Local stiffness, DOF order (ux uy uz rx ry rz) at each end.
template <typename Scalar>
Matrix12<Scalar> local_stiffness(Scalar E, Scalar G, Scalar A, Scalar Iy, Scalar Iz, Scalar J, Scalar L);

Matrix12<double> element_transform(const Eigen::Matrix3d& rotation);
Matrix12<double> global_stiffness(const BeamElement& e);

struct NodalLoad {
  int node;
  Vector6d load;  // N and N*m, global axes
};

struct NodeSupport {
  int node;
  std::array<bool, 6> fixed;
};

NodeSupport make_support(int node, Support kind);

struct Solution {
  Eigen::VectorXd displacement;  // 6 per node
  Eigen::VectorXd applied;       // assembled load vector
  Eigen::VectorXd reaction;      // K u - F; non-zero only on constrained DOFs

  Eigen::Vector3d translation(int node) const { return displacement.segment<3>(6 * node); }
  Eigen::Vector3d reaction_force(int node) const { return reaction.segment<3>(6 * node); }
};

Eigen::SparseMatrix<double> assemble_stiffness(const DiscretizedFrame& mesh);

/// Linear static solve K u = F with the listed DOFs held at zero.
/// Throws Error(MechanismDetected) when the constrained system is singular.
Solution solve_static(const DiscretizedFrame& mesh, std::span<const NodalLoad> loads,
                      std::span<const NodeSupport> supports);

std::vector<NodalLoad> handle_loads(const DiscretizedFrame& mesh, const LoadCase& loads);
std::vector<NodeSupport> leg_supports(const DiscretizedFrame& mesh, const BoundarySpec& bc);

Solution assemble_and_solve(const DiscretizedFrame& mesh, const LoadCase& loads, const BoundarySpec& bc);

/// End forces in local axes: (N, Vy, Vz, T, My, Mz) at end a then end b,
/// as forces exerted on the element.
Eigen::Matrix<double, 12, 1> element_end_forces(const DiscretizedFrame& mesh, std::size_t element,
                                                const Solution& u);

/// Per element, the larger end-section von Mises stress in Pa:
/// sigma = |N|/A + |M|*c/I and tau = |T|*c/J, combined as sqrt(sigma^2 + 3 tau^2).
std::vector<double> element_stresses(const DiscretizedFrame& mesh, const Solution& u);

struct SimulationOptions {
  LoadCase loads;
  BoundarySpec bc;
  double max_element_length_in = 1.0;
  double safety_factor_cap = 1e6;
  FeasibilityLimits limits;
};

struct SimulationDetail {
  PerformanceRecord performance;
  FrameGraph frame;
  DiscretizedFrame mesh;
  Solution solution;
  std::vector<double> stresses;
};

/// Frame -> mesh -> solve -> sensor readings. theta is left unset.
/// Any failure surfaces as Error(SimulationFailure) carrying the cause.
SimulationDetail simulate_detailed(const DesignVector& d, const SimulationOptions& options = {});
PerformanceRecord simulate(const DesignVector& d, const SimulationOptions& options = {});

// ---------------------------------------------------------------------------

template <typename Scalar>
Matrix12<Scalar> local_stiffness(Scalar E, Scalar G, Scalar A, Scalar Iy, Scalar Iz, Scalar J, Scalar L) {
  Matrix12<Scalar> k = Matrix12<Scalar>::Zero();
  const Scalar L2 = L * L;
  const Scalar L3 = L2 * L;

  const Scalar axial = E * A / L;
  k(0, 0) = axial;
  k(0, 6) = -axial;
  k(6, 6) = axial;

  const Scalar torsion = G * J / L;
  k(3, 3) = torsion;
  k(3, 9) = -torsion;
  k(9, 9) = torsion;

  // Bending in the local x-y plane (v, theta_z).
  k(1, 1) = Scalar(12) * E * Iz / L3;
  k(1, 5) = Scalar(6) * E * Iz / L2;
  k(1, 7) = -Scalar(12) * E * Iz / L3;
  k(1, 11) = Scalar(6) * E * Iz / L2;
  k(5, 5) = Scalar(4) * E * Iz / L;
  k(5, 7) = -Scalar(6) * E * Iz / L2;
  k(5, 11) = Scalar(2) * E * Iz / L;
  k(7, 7) = Scalar(12) * E * Iz / L3;
  k(7, 11) = -Scalar(6) * E * Iz / L2;
  k(11, 11) = Scalar(4) * E * Iz / L;

  // Bending in the local x-z plane (w, theta_y).
  k(2, 2) = Scalar(12) * E * Iy / L3;
  k(2, 4) = -Scalar(6) * E * Iy / L2;
  k(2, 8) = -Scalar(12) * E * Iy / L3;
  k(2, 10) = -Scalar(6) * E * Iy / L2;
  k(4, 4) = Scalar(4) * E * Iy / L;
  k(4, 8) = Scalar(6) * E * Iy / L2;
  k(4, 10) = Scalar(2) * E * Iy / L;
  k(8, 8) = Scalar(12) * E * Iy / L3;
  k(8, 10) = Scalar(6) * E * Iy / L2;
  k(10, 10) = Scalar(4) * E * Iy / L;

  k.template triangularView<Eigen::StrictlyLower>() = k.transpose();
  return k;
}

}  // namespace walker::fea
