#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "walker/surrogate/encoding.hpp"

namespace walker::surrogate {

class BinaryWriter;
class BinaryReader;

/// Every monomial of total degree 1..degree in `inputs` variables, each
/// evaluated as an earlier monomial times one input.
class PolynomialBasis {
 public:
  PolynomialBasis() = default;
  PolynomialBasis(int inputs, int degree);

  int inputs() const { return inputs_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(feature_.size()); }

  template <typename Derived>
  Eigen::VectorXd expand(const Eigen::MatrixBase<Derived>& x) const {
    Eigen::VectorXd z(size());
    for (int m = 0; m < size(); ++m) z[m] = (parent_[m] < 0 ? 1.0 : z[parent_[m]]) * x[feature_[m]];
    return z;
  }
  Eigen::MatrixXd expand_rows(const Eigen::MatrixXd& X) const;

 private:
  int inputs_ = 0;
  int degree_ = 1;
  std::vector<int> parent_;
  std::vector<int> feature_;
};

/// L2-regularized least squares on standardized polynomial features with a
/// free intercept. Degree 1 is plain ridge.
class RidgeRegression {
 public:
  void fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha, int degree = 1);
  /// One model per column of Y; the factorization is shared.
  static std::vector<RidgeRegression> fit_columns(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, double alpha,
                                                  int degree = 1);

  template <typename Derived>
  double predict(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::VectorXd z = basis_.degree() == 1 ? Eigen::VectorXd(x.derived()) : basis_.expand(x.derived());
    return intercept_ + (z - mean_).cwiseQuotient(scale_).dot(coef_);
  }

  int degree() const { return basis_.degree(); }
  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  PolynomialBasis basis_;
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
  Eigen::VectorXd coef_;
  double intercept_ = 0.0;
};

/// Convex blend y = sum w_j p_j (w >= 0, sum w = 1) fitted under a Huber
/// loss with a small ridge penalty on w. Each reweighted step is solved
/// exactly by enumerating supports, so it suits a handful of inputs.
class NonNegativeBlend {
 public:
  void fit(const Eigen::MatrixXd& P, const Eigen::VectorXd& y, double alpha);

  template <typename Derived>
  double predict(const Eigen::MatrixBase<Derived>& p) const {
    return intercept_ + p.derived().dot(weights_);
  }

  const Eigen::VectorXd& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  Eigen::VectorXd weights_;
  double intercept_ = 0.0;
};

using BinnedMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Per-feature quantile cut points; bin b holds values in (edge[b-1], edge[b]].
class FeatureBinner {
 public:
  void fit(const FeatureMatrix& X, int max_bins);
  BinnedMatrix transform(const FeatureMatrix& X) const;

  int bin_count(int feature) const { return static_cast<int>(edges_[feature].size()) + 1; }
  double edge(int feature, int bin) const { return edges_[feature][bin]; }

 private:
  std::vector<std::vector<double>> edges_;
};

struct TreeParams {
  int max_depth = 6;
  int min_samples_leaf = 1;
  int max_features = 0;  // 0 = all features
};

/// Least-squares CART grown on binned features; split thresholds are stored as
/// raw feature values so prediction needs no binning.
class RegressionTree {
 public:
  /// `rows` may repeat (bootstrap). `y` is indexed by row.
  void fit(const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
           std::vector<int> rows, const TreeParams& params, std::mt19937_64& rng);

  template <typename Derived>
  double predict(const Eigen::MatrixBase<Derived>& x) const {
    const Node* n = nodes_.data();
    while (n->feature >= 0) n = &nodes_[static_cast<std::size_t>(n->left + (x[n->feature] <= n->value ? 0 : 1))];
    return n->value;
  }

  /// Same traversal on the training bins (valid only for the tree just fitted).
  double predict_binned(const BinnedMatrix& bins, int row) const {
    const Node* n = nodes_.data();
    while (n->feature >= 0) n = &nodes_[static_cast<std::size_t>(n->left + (bins(row, n->feature) <= n->bin ? 0 : 1))];
    return n->value;
  }

  std::size_t node_count() const { return nodes_.size(); }
  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  struct Node {
    double value;  // split threshold, or the prediction at a leaf
    std::int32_t left;
    std::int16_t feature;  // -1 for a leaf
    std::uint8_t bin;
  };

  void grow(int id, const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
            std::vector<int>& rows, int begin, int end, int depth, const TreeParams& params, std::mt19937_64& rng);

  std::vector<Node> nodes_;
};

class RandomForest {
 public:
  void fit(const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
           std::span<const int> rows, int trees, const TreeParams& params, std::uint64_t seed);

  template <typename Derived>
  double predict(const Eigen::MatrixBase<Derived>& x) const {
    double s = 0.0;
    for (const RegressionTree& t : trees_) s += t.predict(x);
    return trees_.empty() ? 0.0 : s / static_cast<double>(trees_.size());
  }

  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  std::vector<RegressionTree> trees_;
};

/// Squared-loss gradient boosting with shrinkage.
class GradientBoosting {
 public:
  void fit(const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
           std::span<const int> rows, int rounds, double learning_rate, const TreeParams& params,
           std::uint64_t seed);

  template <typename Derived>
  double predict(const Eigen::MatrixBase<Derived>& x) const {
    double s = base_;
    for (const RegressionTree& t : trees_) s += learning_rate_ * t.predict(x);
    return s;
  }

  void save(BinaryWriter& w) const;
  void load(BinaryReader& r);

 private:
  double base_ = 0.0;
  double learning_rate_ = 0.0;
  std::vector<RegressionTree> trees_;
};

/// Indices of the k rows of X closest to q (Euclidean), ties broken by index.
/// When `candidates` is empty every row is eligible.
std::vector<int> k_nearest(const FeatureMatrix& X, const FeatureVector& q, int k,
                           std::span<const int> candidates = {});

}  // namespace walker::surrogate
