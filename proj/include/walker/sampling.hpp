#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "walker/design.hpp"
#include "walker/error.hpp"
#include "walker/feasibility.hpp"

namespace walker {

/// Affine map s = u * r + l applied row-wise to an n x 14 block of unit samples.
/// Throws Error(DimensionMismatch) unless U has 14 columns.
template <typename Derived>
Eigen::MatrixXd scale_samples(const Eigen::MatrixBase<Derived>& unit, const ParameterRanges& ranges);

/// Equal-width binning of u in [0, 1) over `choices`.
Material material_from_unit(double u, const std::vector<Material>& choices);

/// Materials from Sobol dimensions 15 and 16 (indices skip .. skip + n - 1),
/// rotated by a seeded Cranley-Patterson shift, then binned into thirds.
/// Pair order is (front crossbeam, frame).
std::vector<std::pair<Material, Material>> assign_materials(std::int64_t n, std::uint64_t seed,
                                                            std::int64_t skip = 0,
                                                            const ParameterRanges& ranges = ParameterRanges::defaults());

struct SampledDesign {
  std::int64_t design_id;
  std::int64_t sobol_index;
  DesignVector design;
};

struct SampleBatch {
  std::vector<SampledDesign> designs;
  std::int64_t requested = 0;
  std::int64_t dropped_infeasible = 0;
  std::uint64_t seed = 0;
  std::int64_t sobol_skip = 0;
};

/// Draws n designs, drops the infeasible ones and keeps the survivors in
/// sequence order. design_id is the position within the request.
/// Throws Error(EmptyBatch) when nothing survives.
SampleBatch generate_batch(std::int64_t n_requested, const ParameterRanges& ranges,
                           const FeasibilityLimits& limits, std::uint64_t seed, std::int64_t skip = 0);

// ---------------------------------------------------------------------------

template <typename Derived>
Eigen::MatrixXd scale_samples(const Eigen::MatrixBase<Derived>& unit, const ParameterRanges& ranges) {
  if (unit.cols() != kNumContinuous) {
    throw Error(ErrorCode::DimensionMismatch, "expected 14 columns of unit samples");
  }
  return (unit.array().rowwise() * ranges.range.transpose().array()).rowwise() +
         ranges.lower.transpose().array();
}

}  // namespace walker
