#include "walker/surrogate/encoding.hpp"

#include <string>

#include "walker/error.hpp"

namespace walker::surrogate {

namespace {

int material_slot(Material m) {
  const int i = static_cast<int>(m);
  if (i < 0 || i > 2) throw Error(ErrorCode::EncodingError, "material id " + std::to_string(i));
  return i;
}

}  // namespace

FeatureEncoder::FeatureEncoder(const ParameterRanges& ranges) { set_constants(ranges.lower, ranges.range); }

void FeatureEncoder::set_constants(const ContinuousVector& lower, const ContinuousVector& range) {
  lower_ = lower;
  range_ = range;
}

FeatureVector FeatureEncoder::encode(const DesignVector& d) const {
  FeatureVector x = FeatureVector::Zero();
  for (int k = 0; k < kNumContinuous; ++k) {
    x[k] = range_[k] > 0.0 ? (d.values[k] - lower_[k]) / range_[k] : 0.0;
  }
  x[kNumContinuous + material_slot(d.front_crossbeam_material)] = 1.0;
  x[kNumContinuous + 3 + material_slot(d.frame_material)] = 1.0;
  return x;
}

FeatureMatrix FeatureEncoder::encode(std::span<const DesignVector> designs) const {
  FeatureMatrix X(static_cast<Eigen::Index>(designs.size()), kNumEncodedFeatures);
  for (std::size_t i = 0; i < designs.size(); ++i) X.row(static_cast<Eigen::Index>(i)) = encode(designs[i]).transpose();
  return X;
}

std::uint64_t FeatureEncoder::schema_hash() {
  std::string layout = "minmax:";
  for (int k = 0; k < kNumContinuous; ++k) layout += std::string(column_name(k)) + ";";
  for (std::string_view group : {kFrontCrossbeamMaterialColumn, kFrameMaterialColumn}) {
    layout += "onehot:" + std::string(group) + ":";
    for (Material m : kAllMaterials) layout += std::string(to_string(m)) + ";";
  }
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : layout) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace walker::surrogate
