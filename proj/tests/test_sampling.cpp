#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "walker/error.hpp"
#include "walker/feasibility.hpp"
#include "walker/sampling.hpp"
#include "walker/sobol.hpp"

using namespace walker;
using doctest::Approx;

namespace {

// First 16 unscrambled points of dimensions 1-6, as produced by
// scipy.stats.qmc.Sobol(d=6, scramble=False).
constexpr double kReference[16][6] = {
    {0, 0, 0, 0, 0, 0},
    {0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
    {0.75, 0.25, 0.25, 0.25, 0.75, 0.75},
    {0.25, 0.75, 0.75, 0.75, 0.25, 0.25},
    {0.375, 0.375, 0.625, 0.875, 0.375, 0.125},
    {0.875, 0.875, 0.125, 0.375, 0.875, 0.625},
    {0.625, 0.125, 0.875, 0.625, 0.625, 0.875},
    {0.125, 0.625, 0.375, 0.125, 0.125, 0.375},
    {0.1875, 0.3125, 0.9375, 0.4375, 0.5625, 0.3125},
    {0.6875, 0.8125, 0.4375, 0.9375, 0.0625, 0.8125},
    {0.9375, 0.0625, 0.6875, 0.1875, 0.3125, 0.5625},
    {0.4375, 0.5625, 0.1875, 0.6875, 0.8125, 0.0625},
    {0.3125, 0.1875, 0.3125, 0.5625, 0.9375, 0.4375},
    {0.8125, 0.6875, 0.8125, 0.0625, 0.4375, 0.9375},
    {0.5625, 0.4375, 0.0625, 0.8125, 0.1875, 0.6875},
    {0.0625, 0.9375, 0.5625, 0.3125, 0.6875, 0.1875},
};

// Largest |fraction of points in [0, a) x [0, b) - a b| over a grid of anchors.
double star_discrepancy(const Eigen::MatrixXd& p, int grid = 64) {
  double worst = 0.0;
  for (int i = 1; i <= grid; ++i) {
    for (int j = 1; j <= grid; ++j) {
      const double a = double(i) / grid, b = double(j) / grid;
      const auto inside = ((p.col(0).array() < a) && (p.col(1).array() < b)).count();
      worst = std::max(worst, std::abs(double(inside) / p.rows() - a * b));
    }
  }
  return worst;
}

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL("expected " << to_string(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_CASE("Sobol points match the reference table") {
  const Eigen::MatrixXd p = sobol_points(6, 16);
  REQUIRE(p.rows() == 16);
  REQUIRE(p.cols() == 6);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 6; ++j) CHECK(p(i, j) == kReference[i][j]);
  }
}

TEST_CASE("Sobol high dimensions match the reference") {
  const Eigen::MatrixXd p = sobol_points(kSobolMaxDimension, 8);
  const double d1000[8] = {0.0, 0.5, 0.75, 0.25, 0.125, 0.625, 0.875, 0.375};
  const double d21201[8] = {0.0, 0.5, 0.75, 0.25, 0.625, 0.125, 0.375, 0.875};
  for (int i = 0; i < 8; ++i) {
    CHECK(p(i, 999) == d1000[i]);
    CHECK(p(i, 21200) == d21201[i]);
  }
}

TEST_CASE("Sobol skip continues the sequence") {
  const Eigen::MatrixXd all = sobol_points(16, 300);
  for (std::int64_t skip : {1, 7, 64, 255}) {
    const Eigen::MatrixXd tail = sobol_points(16, 300 - skip, skip);
    CHECK(tail == all.bottomRows(300 - skip));
  }
}

TEST_CASE("Sobol one-dimensional radical inverse") {
  const Eigen::MatrixXd p = sobol_points(1, 3);
  CHECK(p(0, 0) == 0.0);
  CHECK(p(1, 0) == 0.5);
  CHECK(p(2, 0) == 0.75);
}

TEST_CASE("Sobol rejects bad requests") {
  expect_code(ErrorCode::InvalidSampleRequest, [] { sobol_points(0, 4); });
  expect_code(ErrorCode::InvalidSampleRequest, [] { sobol_points(kSobolMaxDimension + 1, 4); });
  expect_code(ErrorCode::InvalidSampleRequest, [] { sobol_points(2, 0); });
  expect_code(ErrorCode::InvalidSampleRequest, [] { sobol_points(2, 4, -1); });
}

TEST_CASE("Sobol points beat random points on star discrepancy") {
  const Eigen::MatrixXd sobol = sobol_points(2, 1024);
  const double d_sobol = star_discrepancy(sobol);
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Eigen::MatrixXd random(1024, 2);
    for (Eigen::Index i = 0; i < random.size(); ++i) random.data()[i] = u(rng);
    if (d_sobol < star_discrepancy(random)) ++wins;
  }
  CHECK(wins == 20);
}

TEST_CASE("scale_samples") {
  const ParameterRanges r = ParameterRanges::defaults();
  SUBCASE("lower bound and midpoint") {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(2, kNumContinuous);
    u.row(1).setConstant(0.5);
    const Eigen::MatrixXd s = scale_samples(u, r);
    for (int k = 0; k < kNumContinuous; ++k) {
      CHECK(s(0, k) == r.lower[k]);
      CHECK(s(1, k) == Approx(r.lower[k] + r.range[k] / 2).epsilon(1e-15));
    }
  }
  SUBCASE("height example") {
    ParameterRanges h = r;
    h.set(Param::OverallHeight, 32.0, 38.0);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(1, kNumContinuous);
    u(0, 0) = 0.25;
    CHECK(scale_samples(u, h)(0, 0) == 33.5);
  }
  SUBCASE("wrong width") {
    expect_code(ErrorCode::DimensionMismatch, [&] { scale_samples(Eigen::MatrixXd::Zero(3, 13), r); });
  }
  SUBCASE("affine") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      Eigen::MatrixXd u1(1, kNumContinuous), u2(1, kNumContinuous);
      for (int k = 0; k < kNumContinuous; ++k) {
        u1(0, k) = dist(rng);
        u2(0, k) = dist(rng);
      }
      const double a = dist(rng);
      const Eigen::MatrixXd lhs = scale_samples((a * u1 + (1 - a) * u2).eval(), r);
      const Eigen::MatrixXd rhs = a * scale_samples(u1, r) + (1 - a) * scale_samples(u2, r);
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * rhs.cwiseAbs().maxCoeff());
    }
  }
}

TEST_CASE("material binning") {
  const std::vector<Material> all(kAllMaterials.begin(), kAllMaterials.end());
  CHECK(material_from_unit(0.1, all) == Material::Aluminum);
  CHECK(material_from_unit(0.5, all) == Material::Steel);
  CHECK(material_from_unit(0.9, all) == Material::Titanium);
  CHECK(material_from_unit(0.0, all) == Material::Aluminum);
  CHECK(material_from_unit(std::nextafter(1.0, 0.0), all) == Material::Titanium);
  CHECK(material_from_unit(0.7, {Material::Steel}) == Material::Steel);
}

TEST_CASE("assign_materials") {
  CHECK(assign_materials(1, 5).size() == 1u);
  CHECK(assign_materials(50, 9) == assign_materials(50, 9));
  for (std::uint64_t seed : {0ull, 1ull, 17ull, 123456789ull}) {
    const auto pairs = assign_materials(3000, seed);
    std::map<Material, int> front, frame;
    for (const auto& [a, b] : pairs) {
      ++front[a];
      ++frame[b];
    }
    for (Material m : kAllMaterials) {
      // 3300 +- 200 per 10000 draws.
      CHECK(front[m] >= 930);
      CHECK(front[m] <= 1050);
      CHECK(frame[m] >= 930);
      CHECK(frame[m] <= 1050);
    }
  }
  expect_code(ErrorCode::InvalidSampleRequest, [] { assign_materials(0, 1); });
}

TEST_CASE("generate_batch on a collapsed box") {
  ParameterRanges r = ParameterRanges::defaults();
  const DesignVector o = original_design();
  r.lower = o.values;
  r.range.setZero();
  r.front_crossbeam_materials = {Material::Aluminum};
  r.frame_materials = {Material::Aluminum};
  const SampleBatch b = generate_batch(1, r, FeasibilityLimits{}, 3);
  REQUIRE(b.designs.size() == 1u);
  CHECK(b.dropped_infeasible == 0);
  CHECK(b.designs[0].design == o);
}

TEST_CASE("generate_batch with default ranges") {
  const ParameterRanges r = ParameterRanges::defaults();
  const FeasibilityLimits limits;
  const SampleBatch b = generate_batch(4096, r, limits, 1);
  CHECK(b.requested == 4096);
  CHECK(b.requested == static_cast<std::int64_t>(b.designs.size()) + b.dropped_infeasible);
  const double drop = double(b.dropped_infeasible) / double(b.requested);
  CHECK(drop > 0.0);
  CHECK(drop < 1.0);

  // Independent second pass over every survivor.
  std::int64_t last_id = -1;
  for (const SampledDesign& s : b.designs) {
    const DesignVector& d = s.design;
    CHECK(s.design_id > last_id);
    last_id = s.design_id;
    bool ok = true;
    for (int k = 0; k < kNumContinuous; ++k) ok = ok && d.values[k] > 0.0;
    for (Param p : {Param::SideCrossbeamHeight, Param::FrontUpperCrossbeamHeight, Param::FrontLowerCrossbeamHeight}) {
      ok = ok && d[p] < d[Param::OverallHeight];
    }
    const double frame_od = d[Param::FrameTubeInnerDiameter] + 2 * d[Param::FrameTubeThickness];
    const double front_od = d[Param::FrontCrossbeamInnerDiameter] + 2 * d[Param::CrossbeamTubeThickness];
    const double side_od = d[Param::SideCrossbeamInnerDiameter] + 2 * d[Param::CrossbeamTubeThickness];
    ok = ok && front_od <= frame_od && side_od <= frame_od;
    for (double od : {frame_od, front_od, side_od}) ok = ok && od >= 0.2 && od <= 1.25;
    ok = ok && d[Param::HandleDistance] >= 14.0 && d[Param::HandleDistance] <= 28.0;
    CHECK(ok);
    CHECK(r.contains(d));
  }

  const SampleBatch again = generate_batch(4096, r, limits, 1);
  REQUIRE(again.designs.size() == b.designs.size());
  for (std::size_t i = 0; i < b.designs.size(); ++i) {
    CHECK(again.designs[i].design == b.designs[i].design);
    CHECK(again.designs[i].sobol_index == b.designs[i].sobol_index);
  }
}

TEST_CASE("marginal coverage of the scaled sequence") {
  const ParameterRanges r = ParameterRanges::defaults();
  const std::int64_t n = 1024;
  const Eigen::MatrixXd s = scale_samples(sobol_points(kNumContinuous, n), r);
  for (int k = 0; k < kNumContinuous; ++k) {
    std::vector<double> col(s.col(k).data(), s.col(k).data() + n);
    col.push_back(r.lower[k] + r.range[k]);
    std::sort(col.begin(), col.end());
    double gap = col.front() - r.lower[k];
    for (std::size_t i = 1; i < col.size(); ++i) gap = std::max(gap, col[i] - col[i - 1]);
    CHECK(gap < 4 * r.range[k] / std::sqrt(double(n)));
  }
}

TEST_CASE("generate_batch reports an empty batch") {
  ParameterRanges r = ParameterRanges::defaults();
  r.set(Param::OverallHeight, 20.0, 22.0);
  r.set(Param::SideCrossbeamHeight, 25.0, 30.0);
  expect_code(ErrorCode::EmptyBatch, [&] { generate_batch(256, r, FeasibilityLimits{}, 1); });
}
