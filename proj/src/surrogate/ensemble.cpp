#include "walker/surrogate/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include "binary_io.hpp"
#include "walker/csv.hpp"
#include "walker/error.hpp"
#include "walker/stability.hpp"

namespace walker::surrogate {

namespace {

constexpr char kMagic[8] = {'W', 'L', 'K', 'S', 'U', 'R', 'R', '1'};
constexpr std::uint32_t kVersion = 2;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (a + 1) + 0xBF58476D1CE4E5B9ull * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

template <typename Derived>
Eigen::MatrixXd gather_rows(const Eigen::MatrixBase<Derived>& X, std::span<const int> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

double neighbor_mean(const Eigen::VectorXd& y, std::span<const int> neighbors) {
  double s = 0.0;
  for (int j : neighbors) s += y[j];
  return neighbors.empty() ? 0.0 : s / static_cast<double>(neighbors.size());
}

// Out-of-fold neighbor lists: row i only sees rows from other folds.
std::vector<std::vector<int>> oof_neighbors(const FeatureMatrix& X, const std::vector<int>& fold, int k) {
  const auto n = static_cast<int>(X.rows());
  std::vector<std::vector<int>> out(static_cast<std::size_t>(n));
  std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    int m = 0;
    for (int j = 0; j < n; ++j) {
      if (fold[j] == fold[i]) continue;
      dist[m++] = {(X.row(j) - X.row(i)).squaredNorm(), j};
    }
    const int kk = std::min(k, m);
    std::partial_sort(dist.begin(), dist.begin() + kk, dist.begin() + m);
    out[i].reserve(kk);
    for (int q = 0; q < kk; ++q) out[i].push_back(dist[q].second);
  }
  return out;
}

TreeParams forest_params(const SurrogateConfig& c) {
  return {c.forest_max_depth, c.forest_min_leaf, (kNumEncodedFeatures + 2) / 3};
}

TreeParams boosting_params(const SurrogateConfig& c) { return {c.boosting_depth, c.boosting_min_leaf, 0}; }

void validate_config(const SurrogateConfig& c) {
  if (c.folds < 2) throw Error(ErrorCode::InvalidConfig, "folds must be at least 2");
  if (c.knn_k < 1 || c.forest_trees < 1 || c.boosting_rounds < 1 || c.max_bins < 2 || c.max_bins > 256)
    throw Error(ErrorCode::InvalidConfig, "learner sizes out of range");
  if (!(c.learning_rate > 0.0) || c.ridge_alpha < 0.0 || c.meta_alpha < 0.0)
    throw Error(ErrorCode::InvalidConfig, "learning rate and penalties must be non-negative");
  if (c.ridge_degree < 1 || c.ridge_degree > 4) throw Error(ErrorCode::InvalidConfig, "ridge degree must lie in [1, 4]");
  if (std::none_of(c.enabled.begin(), c.enabled.end(), [](bool b) { return b; }))
    throw Error(ErrorCode::InvalidConfig, "at least one base learner must be enabled");
}

}  // namespace

std::string_view to_string(BaseLearner b) {
  switch (b) {
    case BaseLearner::NearestNeighbors: return "knn";
    case BaseLearner::RandomForest: return "random_forest";
    case BaseLearner::GradientBoosting: return "gradient_boosting";
    case BaseLearner::Ridge: return "ridge";
  }
  return "unknown";
}

DataSplit split(std::span<const DatasetRow> rows, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorCode::InvalidConfig, "test fraction must lie in (0, 1)");
  Dataset usable = usable_rows(rows);
  if (usable.size() < 50)
    throw Error(ErrorCode::InsufficientData,
                "need at least 50 simulated designs, have " + std::to_string(usable.size()));
  std::mt19937_64 rng(seed);
  std::shuffle(usable.begin(), usable.end(), rng);
  const auto n_test = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(usable.size())));
  DataSplit out;
  out.test.assign(usable.begin(), usable.begin() + static_cast<std::ptrdiff_t>(n_test));
  out.train.assign(usable.begin() + static_cast<std::ptrdiff_t>(n_test), usable.end());
  auto by_id = [](const DatasetRow& a, const DatasetRow& b) { return a.design_id < b.design_id; };
  std::sort(out.train.begin(), out.train.end(), by_id);
  std::sort(out.test.begin(), out.test.end(), by_id);
  return out;
}

double r_squared(std::span<const double> predictions, std::span<const double> actuals) {
  if (predictions.size() != actuals.size() || actuals.size() < 2)
    throw Error(ErrorCode::DimensionMismatch, "r_squared needs two equal-length series of at least 2 values");
  const double mean = std::accumulate(actuals.begin(), actuals.end(), 0.0) / static_cast<double>(actuals.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < actuals.size(); ++i) {
    ss_res += (predictions[i] - actuals[i]) * (predictions[i] - actuals[i]);
    ss_tot += (actuals[i] - mean) * (actuals[i] - mean);
  }
  if (ss_tot == 0.0) return 0.0;
  return 1.0 - ss_res / ss_tot;
}

TargetVector learning_targets(const DatasetRow& row) {
  TargetVector t;
  for (int i = 0; i < kNumSimulatedValues; ++i) t[i] = row.performance.value(static_cast<Target>(i));
  t[static_cast<int>(Target::Theta)] = theta_for_learning(row.design, row.performance);
  return t;
}

SurrogateEnsemble SurrogateEnsemble::train(std::span<const DatasetRow> train_rows, const ParameterRanges& ranges,
                                           const SurrogateConfig& config) {
  validate_config(config);
  const Dataset rows = usable_rows(train_rows);
  if (rows.size() < static_cast<std::size_t>(std::max(config.folds, config.knn_k + 1)))
    throw Error(ErrorCode::InsufficientData, "too few training rows for the configured folds");

  SurrogateEnsemble e;
  e.config_ = config;
  e.encoder_ = FeatureEncoder(ranges);
  const auto n = static_cast<int>(rows.size());
  e.train_x_ = e.encoder_.encode(designs_of(rows));
  e.train_y_.resize(n, kNumTargets);
  for (int i = 0; i < n; ++i) e.train_y_.row(i) = learning_targets(rows[i]).transpose();

  FeatureBinner binner;
  binner.fit(e.train_x_, config.max_bins);
  const BinnedMatrix bins = binner.transform(e.train_x_);

  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  std::mt19937_64 rng(mix_seed(config.seed, 0, 0));
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> fold(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fold[perm[i]] = i % config.folds;

  const auto& on = config.enabled;
  const int n_enabled = static_cast<int>(std::count(on.begin(), on.end(), true));
  const auto knn = on[0] ? oof_neighbors(e.train_x_, fold, config.knn_k) : std::vector<std::vector<int>>{};

  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  const Eigen::MatrixXd X_all = e.train_x_;

  // Ridge shares one factorization across targets, so fit it for all of them up front.
  Eigen::MatrixXd ridge_oof(n, kNumTargets);
  std::vector<RidgeRegression> ridge_all;
  if (on[3]) {
    for (int f = 0; f < config.folds; ++f) {
      std::vector<int> in, out;
      for (int i = 0; i < n; ++i) (fold[i] == f ? out : in).push_back(i);
      const std::vector<RidgeRegression> fold_models = RidgeRegression::fit_columns(
          gather_rows(e.train_x_, in), gather_rows(e.train_y_, in), config.ridge_alpha, config.ridge_degree);
      for (int i : out)
        for (int t = 0; t < kNumTargets; ++t)
          ridge_oof(i, t) = fold_models[static_cast<std::size_t>(t)].predict(e.train_x_.row(i).transpose());
    }
    ridge_all = RidgeRegression::fit_columns(X_all, e.train_y_, config.ridge_alpha, config.ridge_degree);
  }

  for (int t = 0; t < kNumTargets; ++t) {
    TargetModel& m = e.models_[t];
    const Eigen::VectorXd y = e.train_y_.col(t);
    const double mean = y.mean();
    const double sd = std::sqrt((y.array() - mean).square().sum() / static_cast<double>(n));
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      m.constant = true;
      m.constant_value = mean;
      e.scale_[t] = 1.0;
      warn("target " + std::string(short_name(static_cast<Target>(t))) +
           " is constant in the training data; using a constant predictor");
      continue;
    }
    e.scale_[t] = sd;
    const std::span<const double> ys(y.data(), static_cast<std::size_t>(n));

    Eigen::MatrixXd oof(n, n_enabled);
    for (int f = 0; f < config.folds; ++f) {
      std::vector<int> in, out;
      for (int i = 0; i < n; ++i) (fold[i] == f ? out : in).push_back(i);
      RandomForest forest;
      GradientBoosting boost;
      if (on[1]) forest.fit(bins, binner, ys, in, config.forest_trees, forest_params(config), mix_seed(config.seed, t, f + 1));
      if (on[2])
        boost.fit(bins, binner, ys, in, config.boosting_rounds, config.learning_rate, boosting_params(config),
                  mix_seed(config.seed, t + 100, f + 1));
      for (int i : out) {
        const auto x = e.train_x_.row(i).transpose();
        int c = 0;
        if (on[0]) oof(i, c++) = neighbor_mean(y, knn[i]);
        if (on[1]) oof(i, c++) = forest.predict(x);
        if (on[2]) oof(i, c++) = boost.predict(x);
        if (on[3]) oof(i, c++) = ridge_oof(i, t);
      }
    }
    m.meta.fit(oof, y, config.meta_alpha);

    if (on[1]) m.forest.fit(bins, binner, ys, all, config.forest_trees, forest_params(config), mix_seed(config.seed, t, 0));
    if (on[2])
      m.boosting.fit(bins, binner, ys, all, config.boosting_rounds, config.learning_rate, boosting_params(config),
                     mix_seed(config.seed, t + 100, 0));
    if (on[3]) m.ridge = ridge_all[static_cast<std::size_t>(t)];
  }

  for (int i = 0; i < n; ++i) {
    const TargetVector p = e.predict_targets(rows[i].design);
    e.envelope_ = e.envelope_.cwiseMax((p - e.train_y_.row(i).transpose()).cwiseAbs());
  }
  return e;
}

Eigen::VectorXd SurrogateEnsemble::base_row(std::size_t target, const FeatureVector& x,
                                            std::span<const int> neighbors) const {
  const TargetModel& m = models_[target];
  const auto& on = config_.enabled;
  Eigen::VectorXd row(std::count(on.begin(), on.end(), true));
  int c = 0;
  if (on[0]) {
    double s = 0.0;
    for (int j : neighbors) s += train_y_(j, static_cast<Eigen::Index>(target));
    row[c++] = s / static_cast<double>(neighbors.size());
  }
  if (on[1]) row[c++] = m.forest.predict(x);
  if (on[2]) row[c++] = m.boosting.predict(x);
  if (on[3]) row[c++] = m.ridge.predict(x);
  return row;
}

TargetVector SurrogateEnsemble::predict_targets(const DesignVector& d) const {
  const FeatureVector x = encoder_.encode(d);
  const std::vector<int> nb = config_.enabled[0] ? k_nearest(train_x_, x, config_.knn_k) : std::vector<int>{};
  TargetVector out;
  for (std::size_t t = 0; t < kNumTargets; ++t) {
    const TargetModel& m = models_[t];
    out[static_cast<Eigen::Index>(t)] = m.constant ? m.constant_value : m.meta.predict(base_row(t, x, nb));
  }
  return out;
}

PerformanceRecord SurrogateEnsemble::predict(const DesignVector& d) const {
  const TargetVector v = predict_targets(d);
  PerformanceRecord r;
  for (int t = 0; t < kNumTargets; ++t) r.set(static_cast<Target>(t), v[t]);
  return r;
}

Eigen::Matrix<double, kNumTargets, kNumBaseLearners> SurrogateEnsemble::predict_base(const DesignVector& d) const {
  const FeatureVector x = encoder_.encode(d);
  const std::vector<int> nb = config_.enabled[0] ? k_nearest(train_x_, x, config_.knn_k) : std::vector<int>{};
  Eigen::Matrix<double, kNumTargets, kNumBaseLearners> out;
  out.setConstant(std::numeric_limits<double>::quiet_NaN());
  for (std::size_t t = 0; t < kNumTargets; ++t) {
    const auto ti = static_cast<Eigen::Index>(t);
    if (models_[t].constant) {
      for (int b = 0; b < kNumBaseLearners; ++b)
        if (config_.enabled[b]) out(ti, b) = models_[t].constant_value;
      continue;
    }
    const Eigen::VectorXd row = base_row(t, x, nb);
    int c = 0;
    for (int b = 0; b < kNumBaseLearners; ++b)
      if (config_.enabled[b]) out(ti, b) = row[c++];
  }
  return out;
}

std::optional<double> SurrogateEnsemble::test_r2(Target t) const {
  const double v = test_r2_[static_cast<int>(t)];
  if (std::isnan(v)) return std::nullopt;
  return v;
}

bool SurrogateEnsemble::reliable(Target t) const {
  const auto r2 = test_r2(t);
  return !r2 || *r2 >= config_.reliability_threshold;
}

void SurrogateEnsemble::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    BinaryWriter w(os);
    os.write(kMagic, sizeof kMagic);
    w.pod(kVersion);
    w.u64(FeatureEncoder::schema_hash());

    const SurrogateConfig& c = config_;
    w.f64(c.test_fraction);
    w.u64(c.seed);
    for (int v : {c.folds, c.knn_k, c.forest_trees, c.forest_max_depth, c.forest_min_leaf, c.boosting_rounds,
                  c.boosting_depth, c.boosting_min_leaf, c.max_bins, c.ridge_degree})
      w.i64(v);
    w.f64(c.learning_rate);
    w.f64(c.ridge_alpha);
    w.f64(c.meta_alpha);
    for (bool b : c.enabled) w.pod<std::uint8_t>(b ? 1 : 0);
    w.f64(c.reliability_threshold);

    w.matrix(encoder_.lower());
    w.matrix(encoder_.range());
    w.matrix(train_x_);
    w.matrix(train_y_);
    w.matrix(scale_);
    w.matrix(envelope_);
    w.matrix(test_r2_);
    for (const TargetModel& m : models_) {
      w.pod<std::uint8_t>(m.constant ? 1 : 0);
      w.f64(m.constant_value);
      if (m.constant) continue;
      m.ridge.save(w);
      m.forest.save(w);
      m.boosting.save(w);
      m.meta.save(w);
    }
    if (!os) throw Error(ErrorCode::IoError, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

SurrogateEnsemble SurrogateEnsemble::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || !std::equal(std::begin(magic), std::end(magic), std::begin(kMagic)))
    throw Error(ErrorCode::FormatError, path.string() + " is not a surrogate archive");
  BinaryReader r(is);
  if (r.pod<std::uint32_t>() != kVersion) throw Error(ErrorCode::FormatError, "unsupported archive version");
  if (r.u64() != FeatureEncoder::schema_hash())
    throw Error(ErrorCode::FormatError, "archive feature schema does not match this build");

  SurrogateEnsemble e;
  SurrogateConfig& c = e.config_;
  c.test_fraction = r.f64();
  c.seed = r.u64();
  for (int* v : {&c.folds, &c.knn_k, &c.forest_trees, &c.forest_max_depth, &c.forest_min_leaf, &c.boosting_rounds,
                 &c.boosting_depth, &c.boosting_min_leaf, &c.max_bins, &c.ridge_degree})
    *v = static_cast<int>(r.i64());
  c.learning_rate = r.f64();
  c.ridge_alpha = r.f64();
  c.meta_alpha = r.f64();
  for (bool& b : c.enabled) b = r.pod<std::uint8_t>() != 0;
  c.reliability_threshold = r.f64();

  auto fixed = [](const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
    if ((rows >= 0 && m.rows() != rows) || m.cols() != cols)
      throw Error(ErrorCode::FormatError, "archive matrix has unexpected shape");
    return m;
  };
  const Eigen::MatrixXd lower = fixed(r.matrix(), kNumContinuous, 1);
  const Eigen::MatrixXd range = fixed(r.matrix(), kNumContinuous, 1);
  e.encoder_.set_constants(lower, range);
  e.train_x_ = fixed(r.matrix(), -1, kNumEncodedFeatures);
  e.train_y_ = fixed(r.matrix(), e.train_x_.rows(), kNumTargets);
  e.scale_ = fixed(r.matrix(), kNumTargets, 1);
  e.envelope_ = fixed(r.matrix(), kNumTargets, 1);
  e.test_r2_ = fixed(r.matrix(), kNumTargets, 1);
  for (TargetModel& m : e.models_) {
    m.constant = r.pod<std::uint8_t>() != 0;
    m.constant_value = r.f64();
    if (m.constant) continue;
    m.ridge.load(r);
    m.forest.load(r);
    m.boosting.load(r);
    m.meta.load(r);
  }
  return e;
}

TargetVector EvaluationReport::r2_vector() const {
  TargetVector v;
  for (const EvaluationEntry& en : entries) v[static_cast<int>(en.target)] = en.r2;
  return v;
}

EvaluationReport evaluate(const SurrogateEnsemble& e, std::span<const DatasetRow> test, double threshold) {
  const Dataset rows = usable_rows(test);
  if (rows.size() < 2) throw Error(ErrorCode::InsufficientData, "evaluation needs at least 2 simulated designs");
  const std::size_t n = rows.size();
  std::array<std::vector<double>, kNumTargets> actual, ens;
  std::array<std::array<std::vector<double>, kNumBaseLearners>, kNumTargets> base;
  for (const DatasetRow& row : rows) {
    const TargetVector a = learning_targets(row);
    const TargetVector p = e.predict_targets(row.design);
    const auto b = e.predict_base(row.design);
    for (int t = 0; t < kNumTargets; ++t) {
      actual[t].push_back(a[t]);
      ens[t].push_back(p[t]);
      for (int l = 0; l < kNumBaseLearners; ++l) base[t][l].push_back(b(t, l));
    }
  }
  EvaluationReport rep;
  rep.train_size = e.training_size();
  rep.test_size = n;
  rep.threshold = threshold;
  for (int t = 0; t < kNumTargets; ++t) {
    EvaluationEntry en{static_cast<Target>(t), r_squared(ens[t], actual[t]), false, {}};
    en.reliable = en.r2 >= threshold;
    for (int l = 0; l < kNumBaseLearners; ++l)
      en.base_r2[l] = e.config().enabled[l] ? r_squared(base[t][l], actual[t]) : std::numeric_limits<double>::quiet_NaN();
    rep.entries.push_back(en);
  }
  return rep;
}

void write_report_csv(const std::filesystem::path& path, const EvaluationReport& report) {
  csv::Table table;
  table.header = {"target", "r2", "reliable", "n_train", "n_test"};
  for (int l = 0; l < kNumBaseLearners; ++l)
    table.header.push_back("r2_" + std::string(to_string(static_cast<BaseLearner>(l))));
  for (const EvaluationEntry& en : report.entries) {
    std::vector<std::string> row{std::string(short_name(en.target)), csv::format(en.r2), en.reliable ? "true" : "false",
                                 std::to_string(report.train_size), std::to_string(report.test_size)};
    for (double v : en.base_r2) row.push_back(std::isnan(v) ? std::string() : csv::format(v));
    table.rows.push_back(std::move(row));
  }
  csv::write(path, table);
}

}  // namespace walker::surrogate
