#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "walker/dataset.hpp"
#include "walker/performance.hpp"
#include "walker/surrogate/encoding.hpp"
#include "walker/surrogate/regressors.hpp"

namespace walker::surrogate {

enum class BaseLearner : int { NearestNeighbors = 0, RandomForest, GradientBoosting, Ridge };
inline constexpr int kNumBaseLearners = 4;
std::string_view to_string(BaseLearner b);

struct SurrogateConfig {
  double test_fraction = 0.2;
  std::uint64_t seed = 7;
  int folds = 5;
  int knn_k = 5;
  int forest_trees = 200;
  int forest_max_depth = 18;
  int forest_min_leaf = 2;
  int boosting_rounds = 300;
  int boosting_depth = 6;
  int boosting_min_leaf = 5;
  double learning_rate = 0.05;
  double ridge_alpha = 1.0;
  int ridge_degree = 3;  // polynomial degree of the ridge features
  double meta_alpha = 1e-3;
  int max_bins = 64;
  std::array<bool, kNumBaseLearners> enabled{true, true, true, true};
  double reliability_threshold = 0.5;
};

struct DataSplit {
  Dataset train;
  Dataset test;
};

/// Deterministic shuffled partition of the Ok rows; the test part holds
/// round(fraction * n) rows. Throws Error(InsufficientData) below 50 usable
/// rows and Error(InvalidConfig) for a fraction outside (0, 1).
DataSplit split(std::span<const DatasetRow> rows, double test_fraction, std::uint64_t seed);

/// 1 - SS_res / SS_tot. Constant actuals give 0 by convention.
/// Throws Error(DimensionMismatch) for unequal lengths or fewer than 2 values.
double r_squared(std::span<const double> predictions, std::span<const double> actuals);

/// The 9 learned values of a simulated row (theta via theta_for_learning).
TargetVector learning_targets(const DatasetRow& row);

/// One stacked regressor per target: k-NN, random forest, gradient boosting
/// and ridge, blended by a non-negative linear meta-learner fitted on
/// out-of-fold predictions. All targets share one feature encoding and training set.
class SurrogateEnsemble {
 public:
  static SurrogateEnsemble train(std::span<const DatasetRow> train_rows, const ParameterRanges& ranges,
                                 const SurrogateConfig& config);

  TargetVector predict_targets(const DesignVector& d) const;
  PerformanceRecord predict(const DesignVector& d) const;
  /// Column b holds base learner b's prediction; disabled learners are NaN.
  Eigen::Matrix<double, kNumTargets, kNumBaseLearners> predict_base(const DesignVector& d) const;

  void save(const std::filesystem::path& path) const;
  static SurrogateEnsemble load(const std::filesystem::path& path);

  const FeatureEncoder& encoder() const { return encoder_; }
  const SurrogateConfig& config() const { return config_; }
  std::size_t training_size() const { return static_cast<std::size_t>(train_x_.rows()); }

  /// Standard deviation of the training values (1 for constant targets).
  double target_scale(Target t) const { return scale_[static_cast<int>(t)]; }
  bool is_constant(Target t) const { return models_[static_cast<std::size_t>(t)].constant; }
  /// Largest |prediction - actual| over the training rows.
  double residual_envelope(Target t) const { return envelope_[static_cast<int>(t)]; }

  /// Held-out R^2 recorded by the evaluation step; nullopt before evaluation.
  std::optional<double> test_r2(Target t) const;
  void set_test_r2(const TargetVector& r2) { test_r2_ = r2; }
  /// Unevaluated targets count as reliable.
  bool reliable(Target t) const;

 private:
  struct TargetModel {
    bool constant = false;
    double constant_value = 0.0;
    RidgeRegression ridge;
    RandomForest forest;
    GradientBoosting boosting;
    NonNegativeBlend meta;
  };

  Eigen::VectorXd base_row(std::size_t target, const FeatureVector& x, std::span<const int> neighbors) const;

  FeatureEncoder encoder_;
  SurrogateConfig config_;
  FeatureMatrix train_x_;
  Eigen::Matrix<double, Eigen::Dynamic, kNumTargets> train_y_;
  std::array<TargetModel, kNumTargets> models_;
  TargetVector scale_ = TargetVector::Ones();
  TargetVector envelope_ = TargetVector::Zero();
  TargetVector test_r2_ = TargetVector::Constant(std::numeric_limits<double>::quiet_NaN());
};

struct EvaluationEntry {
  Target target;
  double r2;
  bool reliable;
  std::array<double, kNumBaseLearners> base_r2;
};

struct EvaluationReport {
  std::vector<EvaluationEntry> entries;  // one per target, in Target order
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double threshold = 0.5;

  TargetVector r2_vector() const;
  const EvaluationEntry& entry(Target t) const { return entries[static_cast<std::size_t>(t)]; }
};

EvaluationReport evaluate(const SurrogateEnsemble& e, std::span<const DatasetRow> test, double threshold);

/// target, r2, reliable, n_train, n_test, then one r2_<learner> column per base learner.
void write_report_csv(const std::filesystem::path& path, const EvaluationReport& report);

}  // namespace walker::surrogate
