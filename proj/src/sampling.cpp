#include "walker/sampling.hpp"

#include <cmath>
#include <random>
#include <string>

#include "walker/error.hpp"
#include "walker/sobol.hpp"

namespace walker {

namespace {

constexpr int kMaterialDimBegin = kNumContinuous;  // dims 15 and 16, zero based 14 and 15

std::pair<double, double> material_shift(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = u(rng);
  const double b = u(rng);
  return {a, b};
}

double rotate(double u, double shift) {
  const double r = u + shift;
  return r >= 1.0 ? r - 1.0 : r;
}

}  // namespace

Material material_from_unit(double u, const std::vector<Material>& choices) {
  if (choices.empty()) throw Error(ErrorCode::InvalidConfig, "empty material set");
  const auto n = static_cast<double>(choices.size());
  auto bin = static_cast<std::size_t>(std::floor(u * n));
  if (bin >= choices.size()) bin = choices.size() - 1;
  return choices[bin];
}

std::vector<std::pair<Material, Material>> assign_materials(std::int64_t n, std::uint64_t seed,
                                                            std::int64_t skip,
                                                            const ParameterRanges& ranges) {
  if (n < 1) throw Error(ErrorCode::InvalidSampleRequest, "material count must be >= 1");
  const Eigen::MatrixXd u = sobol_points(kNumDesignFeatures, n, skip);
  const auto [shift_front, shift_frame] = material_shift(seed);
  std::vector<std::pair<Material, Material>> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    out.emplace_back(
        material_from_unit(rotate(u(i, kMaterialDimBegin), shift_front), ranges.front_crossbeam_materials),
        material_from_unit(rotate(u(i, kMaterialDimBegin + 1), shift_frame), ranges.frame_materials));
  }
  return out;
}

SampleBatch generate_batch(std::int64_t n_requested, const ParameterRanges& ranges,
                           const FeasibilityLimits& limits, std::uint64_t seed, std::int64_t skip) {
  ranges.validate();
  const Eigen::MatrixXd u = sobol_points(kNumDesignFeatures, n_requested, skip);
  const Eigen::MatrixXd scaled = scale_samples(u.leftCols(kNumContinuous), ranges);
  const auto [shift_front, shift_frame] = material_shift(seed);

  SampleBatch batch;
  batch.requested = n_requested;
  batch.seed = seed;
  batch.sobol_skip = skip;
  for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
    DesignVector d;
    d.values = scaled.row(i).transpose();
    d.front_crossbeam_material =
        material_from_unit(rotate(u(i, kMaterialDimBegin), shift_front), ranges.front_crossbeam_materials);
    d.frame_material = material_from_unit(rotate(u(i, kMaterialDimBegin + 1), shift_frame), ranges.frame_materials);
    if (check_feasibility(d, limits).valid) {
      batch.designs.push_back(SampledDesign{i, skip + i, d});
    } else {
      ++batch.dropped_infeasible;
    }
  }
  if (batch.designs.empty()) {
    throw Error(ErrorCode::EmptyBatch, "no feasible designs among " + std::to_string(n_requested) +
                                           " samples; check ranges and limits");
  }
  return batch;
}

}  // namespace walker
