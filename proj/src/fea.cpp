#include "walker/fea.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/SparseCholesky>

#include "walker/error.hpp"
#include "walker/units.hpp"

namespace walker::fea {

namespace {

Eigen::Matrix3d local_axes(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d x = (b - a).normalized();
  // Circular tubes have Iy = Iz, so the roll reference only has to be
  // non-parallel to the element axis.
  const Eigen::Vector3d ref = std::abs(x.z()) > 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitZ();
  const Eigen::Vector3d y = ref.cross(x).normalized();
  const Eigen::Vector3d z = x.cross(y);
  Eigen::Matrix3d r;
  r.row(0) = x;
  r.row(1) = y;
  r.row(2) = z;
  return r;
}

Eigen::Matrix<double, 12, 1> element_dofs(const BeamElement& e, const Eigen::VectorXd& u) {
  Eigen::Matrix<double, 12, 1> ue;
  ue.head<6>() = u.segment<6>(6 * e.node_a);
  ue.tail<6>() = u.segment<6>(6 * e.node_b);
  return ue;
}

Matrix12<double> element_local_stiffness(const BeamElement& e) {
  const MaterialSpec& m = material_properties(e.material);
  const auto& s = e.section;
  return local_stiffness(m.elastic_modulus, m.shear_modulus, s.area, s.bending_inertia, s.bending_inertia,
                         s.torsion_constant, e.length);
}

}  // namespace

DiscretizedFrame discretize(const FrameGraph& frame, double max_element_length) {
  if (!(max_element_length > 0.0)) {
    throw Error(ErrorCode::MeshError, "element length cap must be positive");
  }
  DiscretizedFrame mesh;
  mesh.nodes = frame.nodes;
  mesh.sensors = frame.sensors;
  mesh.elements_per_member.reserve(frame.members.size());

  for (std::size_t i = 0; i < frame.members.size(); ++i) {
    const Member& m = frame.members[i];
    const Eigen::Vector3d a = frame.nodes[m.node_a];
    const Eigen::Vector3d b = frame.nodes[m.node_b];
    const double length = (b - a).norm();
    if (!(length > 1e-12)) {
      throw Error(ErrorCode::MeshError, "member " + std::to_string(i) + " has zero length");
    }
    // The small slack keeps exact multiples of the cap from rounding up.
    const int count = std::max(1, static_cast<int>(std::ceil(length / max_element_length - 1e-9)));
    mesh.elements_per_member.push_back(count);

    const Eigen::Matrix3d rotation = local_axes(a, b);
    int previous = m.node_a;
    for (int k = 1; k <= count; ++k) {
      int next = m.node_b;
      if (k < count) {
        mesh.nodes.push_back(a + (b - a) * (static_cast<double>(k) / count));
        next = static_cast<int>(mesh.nodes.size()) - 1;
      }
      mesh.elements.push_back(
          BeamElement{previous, next, static_cast<int>(i), m.section, m.material, length / count, rotation});
      previous = next;
    }
  }
  return mesh;
}

Matrix12<double> element_transform(const Eigen::Matrix3d& rotation) {
  Matrix12<double> t = Matrix12<double>::Zero();
  for (int block = 0; block < 4; ++block) t.block<3, 3>(3 * block, 3 * block) = rotation;
  return t;
}

Matrix12<double> global_stiffness(const BeamElement& e) {
  const Matrix12<double> t = element_transform(e.rotation);
  return t.transpose() * element_local_stiffness(e) * t;
}

NodeSupport make_support(int node, Support kind) {
  NodeSupport s{node, {false, false, false, false, false, false}};
  switch (kind) {
    case Support::Free: break;
    case Support::Pinned: s.fixed = {true, true, true, false, false, false}; break;
    case Support::Roller: s.fixed = {false, true, true, false, false, false}; break;
    case Support::Clamped: s.fixed = {true, true, true, true, true, true}; break;
  }
  return s;
}

Eigen::SparseMatrix<double> assemble_stiffness(const DiscretizedFrame& mesh) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.elements.size() * 144);
  for (const BeamElement& e : mesh.elements) {
    const Matrix12<double> k = global_stiffness(e);
    const int base[2] = {6 * e.node_a, 6 * e.node_b};
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        if (k(i, j) != 0.0) triplets.emplace_back(base[i / 6] + i % 6, base[j / 6] + j % 6, k(i, j));
      }
    }
  }
  Eigen::SparseMatrix<double> K(mesh.dof_count(), mesh.dof_count());
  K.setFromTriplets(triplets.begin(), triplets.end());
  return K;
}

Solution solve_static(const DiscretizedFrame& mesh, std::span<const NodalLoad> loads,
                      std::span<const NodeSupport> supports) {
  const Eigen::Index n = mesh.dof_count();
  Solution sol;
  sol.applied = Eigen::VectorXd::Zero(n);
  for (const NodalLoad& l : loads) sol.applied.segment<6>(6 * l.node) += l.load;

  std::vector<bool> fixed(static_cast<std::size_t>(n), false);
  for (const NodeSupport& s : supports) {
    for (int k = 0; k < 6; ++k) {
      if (s.fixed[k]) fixed[static_cast<std::size_t>(6 * s.node + k)] = true;
    }
  }
  std::vector<Eigen::Index> reduced(static_cast<std::size_t>(n), -1);
  Eigen::Index free_count = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) reduced[static_cast<std::size_t>(i)] = free_count++;
  }

  const Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(K.nonZeros()));
  for (Eigen::Index col = 0; col < K.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
      const Eigen::Index r = reduced[static_cast<std::size_t>(it.row())];
      const Eigen::Index c = reduced[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  }
  Eigen::SparseMatrix<double> Kff(free_count, free_count);
  Kff.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::VectorXd Ff(free_count);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (reduced[static_cast<std::size_t>(i)] >= 0) Ff[reduced[static_cast<std::size_t>(i)]] = sol.applied[i];
  }

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Kff);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorCode::MechanismDetected, "stiffness factorization failed");
  }
  const Eigen::VectorXd pivots = ldlt.vectorD();
  const double max_pivot = pivots.cwiseAbs().maxCoeff();
  if (!(pivots.minCoeff() > 1e-12 * max_pivot)) {
    throw Error(ErrorCode::MechanismDetected, "stiffness matrix is singular; frame is under-constrained or disconnected");
  }
  const Eigen::VectorXd uf = ldlt.solve(Ff);
  if (ldlt.info() != Eigen::Success || !uf.allFinite()) {
    throw Error(ErrorCode::MechanismDetected, "solve produced non-finite displacements");
  }

  sol.displacement = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = reduced[static_cast<std::size_t>(i)];
    if (r >= 0) sol.displacement[i] = uf[r];
  }
  sol.reaction = K * sol.displacement - sol.applied;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) sol.reaction[i] = 0.0;
  }
  return sol;
}

std::vector<NodalLoad> handle_loads(const DiscretizedFrame& mesh, const LoadCase& loads) {
  const double down = units::lbf_to_newtons(loads.handle_down_force_lbf) / 2.0;
  const double lateral = units::lbf_to_newtons(loads.handle_lateral_force_lbf);
  std::vector<NodalLoad> out;
  for (int side = 0; side < 2; ++side) {
    const double outward = side == 0 ? 1.0 : -1.0;
    Vector6d f = Vector6d::Zero();
    f[1] = outward * lateral;
    f[2] = -down;
    out.push_back(NodalLoad{mesh.sensors.handle[side], f});
  }
  return out;
}

std::vector<NodeSupport> leg_supports(const DiscretizedFrame& mesh, const BoundarySpec& bc) {
  std::vector<NodeSupport> out;
  for (int side = 0; side < 2; ++side) {
    out.push_back(make_support(mesh.sensors.rear_tip[side], bc.rear_tip));
    out.push_back(make_support(mesh.sensors.front_tip[side], bc.front_tip));
  }
  return out;
}

Solution assemble_and_solve(const DiscretizedFrame& mesh, const LoadCase& loads, const BoundarySpec& bc) {
  const auto l = handle_loads(mesh, loads);
  const auto s = leg_supports(mesh, bc);
  return solve_static(mesh, l, s);
}

Eigen::Matrix<double, 12, 1> element_end_forces(const DiscretizedFrame& mesh, std::size_t element,
                                                const Solution& u) {
  const BeamElement& e = mesh.elements[element];
  const Eigen::Matrix<double, 12, 1> local = element_transform(e.rotation) * element_dofs(e, u.displacement);
  return element_local_stiffness(e) * local;
}

std::vector<double> element_stresses(const DiscretizedFrame& mesh, const Solution& u) {
  std::vector<double> out(mesh.elements.size(), 0.0);
  for (std::size_t i = 0; i < mesh.elements.size(); ++i) {
    const auto& s = mesh.elements[i].section;
    const double c = s.outer_radius();
    const Eigen::Matrix<double, 12, 1> f = element_end_forces(mesh, i, u);
    double worst = 0.0;
    for (int end = 0; end < 2; ++end) {
      const int o = 6 * end;
      const double normal = std::abs(f[o]) / s.area + std::hypot(f[o + 4], f[o + 5]) * c / s.bending_inertia;
      const double shear = std::abs(f[o + 3]) * c / s.torsion_constant;
      worst = std::max(worst, std::sqrt(normal * normal + 3.0 * shear * shear));
    }
    out[i] = worst;
  }
  return out;
}

SimulationDetail simulate_detailed(const DesignVector& d, const SimulationOptions& options) {
  try {
    SimulationDetail out;
    out.frame = build_frame(d, options.limits);
    out.mesh = discretize(out.frame, units::inches_to_meters(options.max_element_length_in));
    out.solution = assemble_and_solve(out.mesh, options.loads, options.bc);
    out.stresses = element_stresses(out.mesh, out.solution);

    double min_sf = options.safety_factor_cap;
    for (std::size_t i = 0; i < out.mesh.elements.size(); ++i) {
      const double yield = material_properties(out.mesh.elements[i].material).yield_strength;
      if (out.stresses[i] > 0.0) min_sf = std::min(min_sf, yield / out.stresses[i]);
    }

    const auto& sensors = out.mesh.sensors;
    const Eigen::Vector3d left = out.solution.translation(sensors.handle[0]);
    const Eigen::Vector3d right = out.solution.translation(sensors.handle[1]);
    const double leg = 0.5 * (out.solution.translation(sensors.front_tip[0]).norm() +
                              out.solution.translation(sensors.front_tip[1]).norm());
    const MassProperties mp = mass_properties(out.frame);

    PerformanceRecord& p = out.performance;
    p.mass_lbs = units::kilograms_to_pounds(mp.mass);
    p.handle_dx_in = units::meters_to_inches(0.5 * (left.x() + right.x()));
    p.handle_dy_in = units::meters_to_inches(0.5 * (left.y() - right.y()));
    p.handle_dz_in = units::meters_to_inches(0.5 * (left.z() + right.z()));
    p.leg_displacement_in = units::meters_to_inches(leg);
    p.min_safety_factor = min_sf;
    p.com_longitudinal_in = units::meters_to_inches(mp.com.x());
    p.com_vertical_in = units::meters_to_inches(mp.com.z());
    p.tip_status = TipStatus::Unset;
    return out;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SimulationFailure) throw;
    throw Error(ErrorCode::SimulationFailure, e.what());
  }
}

PerformanceRecord simulate(const DesignVector& d, const SimulationOptions& options) {
  return simulate_detailed(d, options).performance;
}

}  // namespace walker::fea
