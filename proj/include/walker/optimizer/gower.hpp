#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "walker/design.hpp"

namespace walker::optimizer {

/// Mixed-type Gower dissimilarity over the 16 design features: range-scaled
/// absolute difference for continuous parameters, 0/1 mismatch for materials.
/// Per-feature terms are clamped to [0, 1]. Zero-range continuous features are
/// skipped (a warning is emitted once, at construction).
class GowerMetric {
 public:
  explicit GowerMetric(const ParameterRanges& ranges);

  double operator()(const DesignVector& a, const DesignVector& b) const;

  /// Fraction of active features whose scaled difference exceeds `tolerance`
  /// (materials count when they differ).
  double changed_ratio(const DesignVector& a, const DesignVector& b, double tolerance) const;

  int active_features() const { return active_count_; }
  const ContinuousVector& inverse_range() const { return inv_range_; }

 private:
  ContinuousVector inv_range_;  // 0 for skipped features
  int active_count_ = kNumDesignFeatures;
};

double gower_distance(const DesignVector& a, const DesignVector& b, const ParameterRanges& ranges);

/// Mean Gower distance from a design to its k nearest dataset members.
class DatasetProximity {
 public:
  /// k larger than the dataset is clamped with a warning. Throws
  /// Error(InsufficientData) for an empty dataset and Error(InvalidConfig) for k < 1.
  DatasetProximity(std::span<const DesignVector> dataset, const GowerMetric& metric, int k);

  double operator()(const DesignVector& d) const;
  int k() const { return k_; }

 private:
  Eigen::Matrix<double, Eigen::Dynamic, kNumContinuous, Eigen::RowMajor> scaled_;
  std::vector<std::array<Material, 2>> materials_;
  ContinuousVector inv_range_;
  int active_count_;
  int k_;
};

/// Gower distance to the query, changed-feature ratio, dataset proximity; all minimized.
using Objectives = std::array<double, 3>;

Objectives counterfactual_objectives(const DesignVector& d, const DesignVector& query, const GowerMetric& metric,
                                     const DatasetProximity& proximity, double change_tolerance = 0.01);

/// a Pareto-dominates b: no worse on every objective and better on one.
bool dominates(const Objectives& a, const Objectives& b);

}  // namespace walker::optimizer
