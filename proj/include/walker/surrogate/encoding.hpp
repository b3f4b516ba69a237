#pragma once

#include <cstdint>
#include <span>

#include <Eigen/Core>

#include "walker/design.hpp"

namespace walker::surrogate {

inline constexpr int kNumEncodedFeatures = kNumContinuous + 2 * 3;

using FeatureVector = Eigen::Matrix<double, kNumEncodedFeatures, 1>;
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, kNumEncodedFeatures, Eigen::RowMajor>;

/// 14 continuous parameters min-max scaled by the dataset ranges, then a
/// one-hot block per material parameter.
class FeatureEncoder {
 public:
  FeatureEncoder() = default;
  explicit FeatureEncoder(const ParameterRanges& ranges);

  /// Throws Error(EncodingError) for a material outside the enumeration.
  FeatureVector encode(const DesignVector& d) const;
  FeatureMatrix encode(std::span<const DesignVector> designs) const;

  const ContinuousVector& lower() const { return lower_; }
  const ContinuousVector& range() const { return range_; }
  void set_constants(const ContinuousVector& lower, const ContinuousVector& range);

  /// Hash of the feature layout (column names, scaling rule, category order).
  static std::uint64_t schema_hash();

 private:
  ContinuousVector lower_ = ContinuousVector::Zero();
  ContinuousVector range_ = ContinuousVector::Ones();
};

}  // namespace walker::surrogate
