#include "walker/design.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "walker/error.hpp"

namespace walker {

namespace {

constexpr std::array<std::string_view, kNumContinuous> kColumnNames{
    "overall_height_in",
    "base_length_in",
    "base_width_in",
    "handle_distance_in",
    "handle_length_in",
    "side_crossbeam_height_in",
    "front_upper_crossbeam_height_in",
    "front_lower_crossbeam_height_in",
    "front_crossbeam_bend_angle_deg",
    "frame_tube_inner_diameter_in",
    "front_crossbeam_inner_diameter_in",
    "side_crossbeam_inner_diameter_in",
    "frame_tube_thickness_in",
    "crossbeam_tube_thickness_in",
};

bool contains_material(const std::vector<Material>& set, Material m) {
  return std::find(set.begin(), set.end(), m) != set.end();
}

}  // namespace

std::string_view column_name(int index) {
  if (index < 0 || index >= kNumContinuous) {
    throw Error(ErrorCode::DimensionMismatch, "parameter index " + std::to_string(index));
  }
  return kColumnNames[static_cast<std::size_t>(index)];
}

std::string_view column_name(Param p) { return column_name(static_cast<int>(p)); }

double DesignVector::frame_outer_diameter() const {
  return (*this)[Param::FrameTubeInnerDiameter] + 2.0 * (*this)[Param::FrameTubeThickness];
}

double DesignVector::front_crossbeam_outer_diameter() const {
  return (*this)[Param::FrontCrossbeamInnerDiameter] + 2.0 * (*this)[Param::CrossbeamTubeThickness];
}

double DesignVector::side_crossbeam_outer_diameter() const {
  return (*this)[Param::SideCrossbeamInnerDiameter] + 2.0 * (*this)[Param::CrossbeamTubeThickness];
}

DesignVector lateral_mirror(const DesignVector& d) { return d; }

DesignVector scale_lengths(const DesignVector& d, double k) {
  DesignVector out = d;
  for (int i = 0; i < static_cast<int>(Param::FrontCrossbeamBendAngle); ++i) out.values[i] *= k;
  return out;
}

DesignVector original_design() {
  DesignVector d;
  d[Param::OverallHeight] = 35.0;
  d[Param::BaseLength] = 18.0;
  d[Param::BaseWidth] = 22.0;
  d[Param::HandleDistance] = 19.0;
  d[Param::HandleLength] = 10.0;
  d[Param::SideCrossbeamHeight] = 20.0;
  d[Param::FrontUpperCrossbeamHeight] = 26.0;
  d[Param::FrontLowerCrossbeamHeight] = 14.0;
  d[Param::FrontCrossbeamBendAngle] = 170.0;
  d[Param::FrameTubeInnerDiameter] = 0.8;
  d[Param::FrontCrossbeamInnerDiameter] = 0.7;
  d[Param::SideCrossbeamInnerDiameter] = 0.7;
  d[Param::FrameTubeThickness] = 0.1203;
  d[Param::CrossbeamTubeThickness] = 0.12;
  d.front_crossbeam_material = Material::Aluminum;
  d.frame_material = Material::Aluminum;
  return d;
}

ParameterRanges ParameterRanges::defaults() {
  ParameterRanges r;
  r.lower.setZero();
  r.range.setZero();
  r.set(Param::OverallHeight, 28.0, 42.0);
  r.set(Param::BaseLength, 16.0, 26.0);
  r.set(Param::BaseWidth, 18.0, 26.0);
  r.set(Param::HandleDistance, 15.0, 23.0);
  r.set(Param::HandleLength, 6.0, 12.0);
  r.set(Param::SideCrossbeamHeight, 6.0, 34.0);
  r.set(Param::FrontUpperCrossbeamHeight, 6.0, 34.0);
  r.set(Param::FrontLowerCrossbeamHeight, 6.0, 34.0);
  r.set(Param::FrontCrossbeamBendAngle, 140.0, 180.0);
  r.set(Param::FrameTubeInnerDiameter, 0.15, 1.0);
  r.set(Param::FrontCrossbeamInnerDiameter, 0.15, 1.0);
  r.set(Param::SideCrossbeamInnerDiameter, 0.15, 1.0);
  r.set(Param::FrameTubeThickness, 0.03, 0.125);
  r.set(Param::CrossbeamTubeThickness, 0.03, 0.125);
  return r;
}

void ParameterRanges::set(Param p, double lo, double hi) {
  lower[static_cast<int>(p)] = lo;
  range[static_cast<int>(p)] = hi - lo;
}

bool ParameterRanges::contains(const DesignVector& d) const {
  const ContinuousVector hi = upper();
  for (int k = 0; k < kNumContinuous; ++k) {
    if (d.values[k] < lower[k] || d.values[k] > hi[k]) return false;
  }
  return contains_material(front_crossbeam_materials, d.front_crossbeam_material) &&
         contains_material(frame_materials, d.frame_material);
}

void ParameterRanges::validate() const {
  for (int k = 0; k < kNumContinuous; ++k) {
    if (!std::isfinite(lower[k]) || !std::isfinite(range[k]) || range[k] < 0.0) {
      throw Error(ErrorCode::InvalidConfig,
                  "ranges." + std::string(column_name(k)) + " must be finite with upper >= lower");
    }
  }
  if (front_crossbeam_materials.empty() || frame_materials.empty()) {
    throw Error(ErrorCode::InvalidConfig, "ranges: material sets must be non-empty");
  }
}

bool ParameterRanges::is_subset_of(const ParameterRanges& outer, double tol) const {
  const ContinuousVector hi = upper();
  const ContinuousVector outer_hi = outer.upper();
  for (int k = 0; k < kNumContinuous; ++k) {
    if (lower[k] < outer.lower[k] - tol || hi[k] > outer_hi[k] + tol) return false;
  }
  for (Material m : front_crossbeam_materials) {
    if (!contains_material(outer.front_crossbeam_materials, m)) return false;
  }
  for (Material m : frame_materials) {
    if (!contains_material(outer.frame_materials, m)) return false;
  }
  return true;
}

}  // namespace walker
