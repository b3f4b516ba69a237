#pragma once

#include <cmath>

#include "walker/error.hpp"
#include "walker/units.hpp"

namespace walker {

/// Thin-walled circular tube, SI units.
template <typename Scalar>
struct TubeSection {
  Scalar outer_diameter;
  Scalar inner_diameter;
  Scalar area;
  Scalar bending_inertia;
  Scalar torsion_constant;

  Scalar outer_radius() const { return outer_diameter / Scalar(2); }
};

/// Annulus properties from an inner diameter and wall thickness, both in meters.
template <typename Scalar>
TubeSection<Scalar> section_from(Scalar inner_diameter, Scalar thickness) {
  if (!(thickness > Scalar(0))) {
    throw Error(ErrorCode::InvalidSection, "tube thickness must be positive");
  }
  if (!(inner_diameter >= Scalar(0))) {
    throw Error(ErrorCode::InvalidSection, "tube inner diameter must be non-negative");
  }
  const Scalar pi(units::kPi);
  const Scalar d_o = inner_diameter + Scalar(2) * thickness;
  const Scalar d_i = inner_diameter;
  const Scalar d_o2 = d_o * d_o;
  const Scalar d_i2 = d_i * d_i;
  TubeSection<Scalar> s;
  s.outer_diameter = d_o;
  s.inner_diameter = d_i;
  s.area = pi / Scalar(4) * (d_o2 - d_i2);
  s.bending_inertia = pi / Scalar(64) * (d_o2 * d_o2 - d_i2 * d_i2);
  s.torsion_constant = Scalar(2) * s.bending_inertia;
  return s;
}

}  // namespace walker
