#include "walker/optimizer/gower.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "walker/error.hpp"

namespace walker::optimizer {

GowerMetric::GowerMetric(const ParameterRanges& ranges) {
  active_count_ = kNumCategorical;
  for (int k = 0; k < kNumContinuous; ++k) {
    if (ranges.range[k] > 0.0) {
      inv_range_[k] = 1.0 / ranges.range[k];
      ++active_count_;
    } else {
      inv_range_[k] = 0.0;
      warn("parameter " + std::string(column_name(k)) + " has zero range; skipped in Gower distance");
    }
  }
}

double GowerMetric::operator()(const DesignVector& a, const DesignVector& b) const {
  const double cont = ((a.values - b.values).cwiseAbs().cwiseProduct(inv_range_)).cwiseMin(1.0).sum();
  const double cat = (a.front_crossbeam_material != b.front_crossbeam_material ? 1.0 : 0.0) +
                     (a.frame_material != b.frame_material ? 1.0 : 0.0);
  return (cont + cat) / active_count_;
}

double GowerMetric::changed_ratio(const DesignVector& a, const DesignVector& b, double tolerance) const {
  int changed = 0;
  for (int k = 0; k < kNumContinuous; ++k)
    if (inv_range_[k] > 0.0 && std::abs(a.values[k] - b.values[k]) * inv_range_[k] > tolerance) ++changed;
  changed += a.front_crossbeam_material != b.front_crossbeam_material;
  changed += a.frame_material != b.frame_material;
  return static_cast<double>(changed) / active_count_;
}

double gower_distance(const DesignVector& a, const DesignVector& b, const ParameterRanges& ranges) {
  return GowerMetric(ranges)(a, b);
}

DatasetProximity::DatasetProximity(std::span<const DesignVector> dataset, const GowerMetric& metric, int k)
    : inv_range_(metric.inverse_range()), active_count_(metric.active_features()), k_(k) {
  if (dataset.empty()) throw Error(ErrorCode::InsufficientData, "dataset proximity needs at least one design");
  if (k < 1) throw Error(ErrorCode::InvalidConfig, "neighbor count must be at least 1");
  if (static_cast<std::size_t>(k) > dataset.size()) {
    warn("neighbor count " + std::to_string(k) + " exceeds dataset size " + std::to_string(dataset.size()) +
         "; clamped");
    k_ = static_cast<int>(dataset.size());
  }
  scaled_.resize(static_cast<Eigen::Index>(dataset.size()), kNumContinuous);
  materials_.reserve(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    scaled_.row(static_cast<Eigen::Index>(i)) = dataset[i].values.cwiseProduct(inv_range_).transpose();
    materials_.push_back({dataset[i].front_crossbeam_material, dataset[i].frame_material});
  }
}

double DatasetProximity::operator()(const DesignVector& d) const {
  const Eigen::Matrix<double, 1, kNumContinuous> q = d.values.cwiseProduct(inv_range_).transpose();
  std::vector<double> dist(static_cast<std::size_t>(scaled_.rows()));
  for (Eigen::Index i = 0; i < scaled_.rows(); ++i) {
    const auto& m = materials_[static_cast<std::size_t>(i)];
    const double cat = (m[0] != d.front_crossbeam_material ? 1.0 : 0.0) + (m[1] != d.frame_material ? 1.0 : 0.0);
    dist[static_cast<std::size_t>(i)] = ((scaled_.row(i) - q).cwiseAbs().cwiseMin(1.0).sum() + cat) / active_count_;
  }
  std::partial_sort(dist.begin(), dist.begin() + k_, dist.end());
  double s = 0.0;
  for (int j = 0; j < k_; ++j) s += dist[static_cast<std::size_t>(j)];
  return s / k_;
}

Objectives counterfactual_objectives(const DesignVector& d, const DesignVector& query, const GowerMetric& metric,
                                     const DatasetProximity& proximity, double change_tolerance) {
  return {metric(d, query), metric.changed_ratio(d, query, change_tolerance), proximity(d)};
}

bool dominates(const Objectives& a, const Objectives& b) {
  bool strictly = false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] > b[j]) return false;
    if (a[j] < b[j]) strictly = true;
  }
  return strictly;
}

}  // namespace walker::optimizer
