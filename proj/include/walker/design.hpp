#pragma once

#include <array>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "walker/materials.hpp"

namespace walker {

/// Continuous design parameters, in the order they appear in every CSV file.
/// Lengths are inches, the bend angle is degrees.
enum class Param : int {
  OverallHeight = 0,
  BaseLength,
  BaseWidth,
  HandleDistance,
  HandleLength,
  SideCrossbeamHeight,
  FrontUpperCrossbeamHeight,
  FrontLowerCrossbeamHeight,
  FrontCrossbeamBendAngle,
  FrameTubeInnerDiameter,
  FrontCrossbeamInnerDiameter,
  SideCrossbeamInnerDiameter,
  FrameTubeThickness,
  CrossbeamTubeThickness,
};

inline constexpr int kNumContinuous = 14;
inline constexpr int kNumCategorical = 2;
inline constexpr int kNumDesignFeatures = kNumContinuous + kNumCategorical;

using ContinuousVector = Eigen::Matrix<double, kNumContinuous, 1>;

/// CSV column name of a continuous parameter (unit suffixed).
std::string_view column_name(Param p);
std::string_view column_name(int index);
inline constexpr std::string_view kFrontCrossbeamMaterialColumn = "front_crossbeam_material";
inline constexpr std::string_view kFrameMaterialColumn = "frame_material";

struct DesignVector {
  ContinuousVector values = ContinuousVector::Zero();
  Material front_crossbeam_material = Material::Aluminum;
  Material frame_material = Material::Aluminum;

  double operator[](Param p) const { return values[static_cast<int>(p)]; }
  double& operator[](Param p) { return values[static_cast<int>(p)]; }

  // Outer diameters in inches.
  double frame_outer_diameter() const;
  double front_crossbeam_outer_diameter() const;
  double side_crossbeam_outer_diameter() const;

  bool operator==(const DesignVector& other) const {
    return values == other.values && front_crossbeam_material == other.front_crossbeam_material &&
           frame_material == other.frame_material;
  }
};

/// Mirror image across the lateral midplane. The parameterization is
/// symmetric, so this is the identity on the vector itself.
DesignVector lateral_mirror(const DesignVector& d);

/// Scales the frame layout lengths (height, base, handles, crossbeam heights)
/// by k. Tube sizes, the bend angle and materials are kept, so every member
/// length, and with it the mass, scales by k.
DesignVector scale_lengths(const DesignVector& d, double k);

/// The "original" two-wheeled walker: 35 in tall, 22 in base width,
/// 19 in handle spacing, 170 deg front crossbeam bend, all aluminum,
/// tube sizes tuned to a 7.5 lb frame.
DesignVector original_design();

/// Sampling box for the continuous parameters plus the allowed categories.
struct ParameterRanges {
  ContinuousVector lower;
  ContinuousVector range;
  std::vector<Material> front_crossbeam_materials{kAllMaterials.begin(), kAllMaterials.end()};
  std::vector<Material> frame_materials{kAllMaterials.begin(), kAllMaterials.end()};

  static ParameterRanges defaults();

  ContinuousVector upper() const { return lower + range; }
  void set(Param p, double lo, double hi);
  /// Closed box test [l, l + r] with categorical membership.
  bool contains(const DesignVector& d) const;
  /// Throws Error(InvalidConfig) on negative or non-finite ranges or empty category sets.
  void validate() const;
  /// True when this box lies inside `outer` (categories included).
  bool is_subset_of(const ParameterRanges& outer, double tol = 1e-12) const;
};

}  // namespace walker
