#include "walker/surrogate/regressors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>

#include "binary_io.hpp"
#include "walker/error.hpp"

namespace walker::surrogate {

// ---------------------------------------------------------------- ridge

PolynomialBasis::PolynomialBasis(int inputs, int degree) : inputs_(inputs), degree_(degree) {
  if (inputs < 1 || degree < 1) throw Error(ErrorCode::InvalidConfig, "polynomial basis needs inputs and degree >= 1");
  // last_[m]: largest input index in monomial m, so products stay in non-decreasing order.
  std::vector<int> last;
  for (int j = 0; j < inputs; ++j) {
    parent_.push_back(-1);
    feature_.push_back(j);
    last.push_back(j);
  }
  std::size_t begin = 0;
  for (int d = 2; d <= degree; ++d) {
    const std::size_t end = feature_.size();
    for (std::size_t m = begin; m < end; ++m)
      for (int j = last[m]; j < inputs; ++j) {
        parent_.push_back(static_cast<int>(m));
        feature_.push_back(j);
        last.push_back(j);
      }
    begin = end;
  }
}

Eigen::MatrixXd PolynomialBasis::expand_rows(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd Z(X.rows(), size());
  for (int m = 0; m < size(); ++m)
    Z.col(m) = parent_[m] < 0 ? Eigen::VectorXd(X.col(feature_[m]))
                              : Eigen::VectorXd(Z.col(parent_[m]).cwiseProduct(X.col(feature_[m])));
  return Z;
}

void RidgeRegression::fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double alpha, int degree) {
  *this = std::move(fit_columns(X, y, alpha, degree).front());
}

std::vector<RidgeRegression> RidgeRegression::fit_columns(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                                                          double alpha, int degree) {
  const PolynomialBasis basis(static_cast<int>(X.cols()), degree);
  Eigen::MatrixXd Z = degree == 1 ? X : basis.expand_rows(X);
  const Eigen::Index n = Z.rows();
  const Eigen::Index p = Z.cols();
  const Eigen::VectorXd mean = Z.colwise().mean().transpose();
  Eigen::VectorXd scale(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double sd = std::sqrt((Z.col(j).array() - mean[j]).square().sum() / std::max<Eigen::Index>(n, 1));
    scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  Z = (Z.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  const Eigen::RowVectorXd y_mean = Y.colwise().mean();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(Z.transpose());
  gram.diagonal().array() += alpha;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram.selfadjointView<Eigen::Lower>());
  const Eigen::MatrixXd coef = ldlt.solve(Z.transpose() * (Y.rowwise() - y_mean));

  std::vector<RidgeRegression> out(static_cast<std::size_t>(Y.cols()));
  for (Eigen::Index c = 0; c < Y.cols(); ++c) {
    RidgeRegression& r = out[static_cast<std::size_t>(c)];
    r.basis_ = basis;
    r.mean_ = mean;
    r.scale_ = scale;
    r.coef_ = coef.col(c);
    r.intercept_ = y_mean[c];
  }
  return out;
}

void RidgeRegression::save(BinaryWriter& w) const {
  w.i64(basis_.inputs());
  w.i64(basis_.degree());
  w.matrix(mean_);
  w.matrix(scale_);
  w.matrix(coef_);
  w.f64(intercept_);
}

void RidgeRegression::load(BinaryReader& r) {
  const auto inputs = r.i64();
  const auto degree = r.i64();
  if (inputs < 1 || inputs > 4096 || degree < 1 || degree > 4)
    throw Error(ErrorCode::FormatError, "archive ridge basis out of range");
  basis_ = PolynomialBasis(static_cast<int>(inputs), static_cast<int>(degree));
  mean_ = r.matrix();
  scale_ = r.matrix();
  coef_ = r.matrix();
  intercept_ = r.f64();
  if (mean_.size() != basis_.size() || scale_.size() != basis_.size() || coef_.size() != basis_.size())
    throw Error(ErrorCode::FormatError, "archive ridge coefficients do not match the basis");
}

namespace {

// Convex weights minimizing sum_i s_i (y_i - P_i w)^2 + lambda |w|^2.
Eigen::VectorXd convex_weighted_fit(const Eigen::MatrixXd& P, const Eigen::VectorXd& y, const Eigen::VectorXd& s,
                                    double lambda) {
  const Eigen::Index p = P.cols();
  const Eigen::MatrixXd gram = P.transpose() * s.asDiagonal() * P;
  const Eigen::VectorXd rhs = P.transpose() * s.cwiseProduct(y);
  Eigen::VectorXd best_w = Eigen::VectorXd::Constant(p, 1.0 / static_cast<double>(p));
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 1; mask < (1u << p); ++mask) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < p; ++j)
      if (mask & (1u << j)) idx.push_back(j);
    const auto k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd g(k, k);
    Eigen::VectorXd b(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      b[a] = rhs[idx[a]];
      for (Eigen::Index c = 0; c < k; ++c) g(a, c) = gram(idx[a], idx[c]);
      g(a, a) += lambda;
    }
    // Sum-to-one constraint on the support via its KKT system.
    const auto ldlt = g.ldlt();
    const Eigen::VectorXd gb = ldlt.solve(b);
    const Eigen::VectorXd g1 = ldlt.solve(Eigen::VectorXd::Ones(k));
    const double mu = (gb.sum() - 1.0) / g1.sum();
    const Eigen::VectorXd w = gb - mu * g1;
    if (!w.allFinite() || (w.array() < 0.0).any()) continue;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(p);
    for (Eigen::Index a = 0; a < k; ++a) full[idx[a]] = w[a];
    const double obj = s.dot((y - P * full).array().square().matrix()) + lambda * full.squaredNorm();
    if (obj < best) {
      best = obj;
      best_w = full;
    }
  }
  return best_w;
}

double median(std::vector<double> v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

}  // namespace

void NonNegativeBlend::fit(const Eigen::MatrixXd& P, const Eigen::VectorXd& y, double alpha) {
  const Eigen::Index p = P.cols();
  const Eigen::Index n = P.rows();
  if (p < 1 || p > 16) throw Error(ErrorCode::InvalidConfig, "blend needs between 1 and 16 inputs");
  if (n < 1) throw Error(ErrorCode::InsufficientData, "blend needs at least one row");
  // Penalty relative to the input scale so alpha is unit-free.
  const double lambda = alpha * P.squaredNorm() / static_cast<double>(p);

  // Huber loss by iteratively reweighted least squares, so a few extreme
  // rows cannot dictate the blend.
  Eigen::VectorXd s = Eigen::VectorXd::Ones(n);
  weights_ = convex_weighted_fit(P, y, s, lambda);
  for (int it = 0; it < 20; ++it) {
    const Eigen::VectorXd r = y - P * weights_;
    std::vector<double> absr(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) absr[static_cast<std::size_t>(i)] = std::abs(r[i]);
    const double delta = 1.345 * 1.4826 * median(absr);
    if (!(delta > 0.0)) break;
    for (Eigen::Index i = 0; i < n; ++i) s[i] = std::abs(r[i]) <= delta ? 1.0 : delta / std::abs(r[i]);
    const Eigen::VectorXd next = convex_weighted_fit(P, y, s, lambda * s.mean());
    const double change = (next - weights_).lpNorm<Eigen::Infinity>();
    weights_ = next;
    if (change < 1e-9) break;
  }
  intercept_ = 0.0;
}

void NonNegativeBlend::save(BinaryWriter& w) const {
  w.matrix(weights_);
  w.f64(intercept_);
}

void NonNegativeBlend::load(BinaryReader& r) {
  weights_ = r.matrix();
  intercept_ = r.f64();
}

// ---------------------------------------------------------------- binning

void FeatureBinner::fit(const FeatureMatrix& X, int max_bins) {
  max_bins = std::clamp(max_bins, 2, 256);
  edges_.assign(static_cast<std::size_t>(X.cols()), {});
  std::vector<double> column(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.rows(); ++i) column[static_cast<std::size_t>(i)] = X(i, j);
    std::sort(column.begin(), column.end());
    std::vector<double> distinct = column;
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    auto& edges = edges_[static_cast<std::size_t>(j)];
    if (static_cast<int>(distinct.size()) <= max_bins) {
      for (std::size_t k = 0; k + 1 < distinct.size(); ++k) edges.push_back(0.5 * (distinct[k] + distinct[k + 1]));
    } else {
      const std::size_t n = column.size();
      for (int b = 1; b < max_bins; ++b) {
        const std::size_t q = n * static_cast<std::size_t>(b) / static_cast<std::size_t>(max_bins);
        if (q == 0 || q >= n || column[q - 1] == column[q]) continue;
        const double cut = 0.5 * (column[q - 1] + column[q]);
        if (edges.empty() || cut > edges.back()) edges.push_back(cut);
      }
    }
  }
}

BinnedMatrix FeatureBinner::transform(const FeatureMatrix& X) const {
  BinnedMatrix out(X.rows(), X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const auto& edges = edges_[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      out(i, j) = static_cast<std::uint8_t>(std::lower_bound(edges.begin(), edges.end(), X(i, j)) - edges.begin());
    }
  }
  return out;
}

// ---------------------------------------------------------------- trees

void RegressionTree::fit(const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
                         std::vector<int> rows, const TreeParams& params, std::mt19937_64& rng) {
  nodes_.assign(1, Node{0.0, -1, -1, 0});
  if (rows.empty()) return;
  grow(0, bins, binner, y, rows, 0, static_cast<int>(rows.size()), 0, params, rng);
}

void RegressionTree::grow(int id, const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
                          std::vector<int>& rows, int begin, int end, int depth, const TreeParams& params,
                          std::mt19937_64& rng) {
  const int count = end - begin;
  double total = 0.0;
  for (int i = begin; i < end; ++i) total += y[static_cast<std::size_t>(rows[static_cast<std::size_t>(i)])];

  nodes_[static_cast<std::size_t>(id)] = Node{total / count, -1, -1, 0};
  if (depth >= params.max_depth || count < 2 * std::max(1, params.min_samples_leaf)) return;

  const int n_features = static_cast<int>(bins.cols());
  std::vector<int> features(static_cast<std::size_t>(n_features));
  std::iota(features.begin(), features.end(), 0);
  int n_try = params.max_features > 0 ? std::min(params.max_features, n_features) : n_features;
  if (n_try < n_features) {
    for (int i = 0; i < n_try; ++i) {
      std::uniform_int_distribution<int> pick(i, n_features - 1);
      std::swap(features[static_cast<std::size_t>(i)], features[static_cast<std::size_t>(pick(rng))]);
    }
  }

  const int min_leaf = std::max(1, params.min_samples_leaf);
  const double parent_score = total * total / count;
  double best_gain = 1e-12 * std::max(1.0, std::abs(parent_score));
  int best_feature = -1;
  int best_bin = -1;

  std::array<double, 256> sum{};
  std::array<int, 256> cnt{};
  for (int fi = 0; fi < n_try; ++fi) {
    const int f = features[static_cast<std::size_t>(fi)];
    const int nb = binner.bin_count(f);
    if (nb < 2) continue;
    std::fill_n(sum.begin(), nb, 0.0);
    std::fill_n(cnt.begin(), nb, 0);
    for (int i = begin; i < end; ++i) {
      const int r = rows[static_cast<std::size_t>(i)];
      const int b = bins(r, f);
      sum[static_cast<std::size_t>(b)] += y[static_cast<std::size_t>(r)];
      ++cnt[static_cast<std::size_t>(b)];
    }
    double left_sum = 0.0;
    int left_cnt = 0;
    for (int b = 0; b + 1 < nb; ++b) {
      left_sum += sum[static_cast<std::size_t>(b)];
      left_cnt += cnt[static_cast<std::size_t>(b)];
      const int right_cnt = count - left_cnt;
      if (left_cnt < min_leaf) continue;
      if (right_cnt < min_leaf) break;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / left_cnt + right_sum * right_sum / right_cnt - parent_score;
      if (gain > best_gain) {
        best_gain = gain;
        best_feature = f;
        best_bin = b;
      }
    }
  }
  if (best_feature < 0) return;

  const auto mid_it = std::partition(rows.begin() + begin, rows.begin() + end,
                                     [&](int r) { return bins(r, best_feature) <= best_bin; });
  const int mid = static_cast<int>(mid_it - rows.begin());
  // Children are stored side by side; right = left + 1.
  const int left = static_cast<int>(nodes_.size());
  nodes_.resize(nodes_.size() + 2);
  nodes_[static_cast<std::size_t>(id)] = Node{binner.edge(best_feature, best_bin), left,
                                              static_cast<std::int16_t>(best_feature),
                                              static_cast<std::uint8_t>(best_bin)};
  grow(left, bins, binner, y, rows, begin, mid, depth + 1, params, rng);
  grow(left + 1, bins, binner, y, rows, mid, end, depth + 1, params, rng);
}

void RegressionTree::save(BinaryWriter& w) const {
  std::vector<double> value;
  std::vector<std::int32_t> left;
  std::vector<std::int16_t> feature;
  for (const Node& n : nodes_) {
    value.push_back(n.value);
    left.push_back(n.left);
    feature.push_back(n.feature);
  }
  w.vector(value);
  w.vector(left);
  w.vector(feature);
}

void RegressionTree::load(BinaryReader& r) {
  const auto value = r.vector<double>();
  const auto left = r.vector<std::int32_t>();
  const auto feature = r.vector<std::int16_t>();
  const std::size_t n = value.size();
  if (n == 0 || left.size() != n || feature.size() != n)
    throw Error(ErrorCode::FormatError, "corrupt tree in model archive");
  nodes_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (feature[i] >= kNumEncodedFeatures ||
        (feature[i] >= 0 && (left[i] <= static_cast<std::int32_t>(i) || static_cast<std::size_t>(left[i]) + 1 >= n)))
      throw Error(ErrorCode::FormatError, "corrupt tree in model archive");
    nodes_[i] = Node{value[i], left[i], feature[i], 0};
  }
}

// ---------------------------------------------------------------- forest

void RandomForest::fit(const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
                       std::span<const int> rows, int trees, const TreeParams& params, std::uint64_t seed) {
  trees_.assign(static_cast<std::size_t>(trees), RegressionTree{});
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, rows.size() - 1);
  std::vector<int> sample(rows.size());
  for (RegressionTree& t : trees_) {
    for (int& s : sample) s = rows[pick(rng)];
    t.fit(bins, binner, y, sample, params, rng);
  }
}

void RandomForest::save(BinaryWriter& w) const {
  w.u64(trees_.size());
  for (const auto& t : trees_) t.save(w);
}

void RandomForest::load(BinaryReader& r) {
  trees_.assign(r.u64(), RegressionTree{});
  for (auto& t : trees_) t.load(r);
}

// ---------------------------------------------------------------- boosting

void GradientBoosting::fit(const BinnedMatrix& bins, const FeatureBinner& binner, std::span<const double> y,
                           std::span<const int> rows, int rounds, double learning_rate, const TreeParams& params,
                           std::uint64_t seed) {
  learning_rate_ = learning_rate;
  base_ = 0.0;
  for (int r : rows) base_ += y[static_cast<std::size_t>(r)];
  base_ /= static_cast<double>(rows.size());

  std::vector<double> residual(y.size(), 0.0);
  for (int r : rows) residual[static_cast<std::size_t>(r)] = y[static_cast<std::size_t>(r)] - base_;

  std::vector<int> row_list(rows.begin(), rows.end());
  std::mt19937_64 rng(seed);
  trees_.assign(static_cast<std::size_t>(rounds), RegressionTree{});
  for (RegressionTree& tree : trees_) {
    tree.fit(bins, binner, residual, row_list, params, rng);
    for (int r : rows) {
      residual[static_cast<std::size_t>(r)] -= learning_rate * tree.predict_binned(bins, r);
    }
  }
}

void GradientBoosting::save(BinaryWriter& w) const {
  w.f64(base_);
  w.f64(learning_rate_);
  w.u64(trees_.size());
  for (const auto& t : trees_) t.save(w);
}

void GradientBoosting::load(BinaryReader& r) {
  base_ = r.f64();
  learning_rate_ = r.f64();
  trees_.assign(r.u64(), RegressionTree{});
  for (auto& t : trees_) t.load(r);
}

// ---------------------------------------------------------------- neighbors

std::vector<int> k_nearest(const FeatureMatrix& X, const FeatureVector& q, int k, std::span<const int> candidates) {
  std::vector<std::pair<double, int>> d;
  if (candidates.empty()) {
    const Eigen::VectorXd dist = (X.rowwise() - q.transpose()).rowwise().squaredNorm();
    d.reserve(static_cast<std::size_t>(dist.size()));
    for (Eigen::Index i = 0; i < dist.size(); ++i) d.emplace_back(dist[i], static_cast<int>(i));
  } else {
    d.reserve(candidates.size());
    for (int i : candidates) d.emplace_back((X.row(i).transpose() - q).squaredNorm(), i);
  }
  const auto kk = static_cast<std::size_t>(std::clamp<int>(k, 0, static_cast<int>(d.size())));
  std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(kk), d.end());
  std::vector<int> out(kk);
  for (std::size_t i = 0; i < kk; ++i) out[i] = d[i].second;
  return out;
}

}  // namespace walker::surrogate
