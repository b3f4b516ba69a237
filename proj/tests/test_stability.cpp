#include <doctest.h>

#include <random>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "test_support.hpp"
#include "walker/error.hpp"
#include "walker/stability.hpp"
#include "walker/units.hpp"

using namespace walker;
using doctest::Approx;
using Hp = boost::multiprecision::cpp_bin_float_50;

namespace {

struct Oracle {
  Hp arg;
  Hp phi;
  Hp theta;
};

// Direct 50-digit evaluation, independent of the templated implementation.
Oracle oracle(const StabilityInput<double>& s) {
  const Hp m(s.mass), g(s.gravity), l1(s.leg_width), l2(s.handle_distance), h(s.height), f(s.force);
  const Hp half = (l1 - l2) / 2;
  Oracle o;
  o.arg = m * g * l1 / (2 * f * boost::multiprecision::sqrt(h * h + half * half));
  if (o.arg <= 1) {
    o.phi = boost::multiprecision::asin(o.arg);
    o.theta = o.phi + boost::multiprecision::atan(half / h);
  }
  return o;
}

StabilityInput<double> imperial(double mass_lb, double l1_in, double l2_in, double h_in, double f_lbf) {
  DesignVector d = original_design();
  d[Param::BaseWidth] = l1_in;
  d[Param::HandleDistance] = l2_in;
  d[Param::OverallHeight] = h_in;
  return stability_input(d, mass_lb, f_lbf);
}

double theta_deg(const StabilityInput<double>& s) {
  const auto r = tipping_angle(s);
  REQUIRE(r.theta.has_value());
  return units::radians_to_degrees(*r.theta);
}

}  // namespace

TEST_CASE("tipping angle of the original fixture") {
  const auto s = imperial(7.5, 22, 19, 35, 400);
  const auto r = tipping_angle(s);
  REQUIRE(r.status == TipStatus::Tips);
  CHECK(units::radians_to_degrees(*r.phi) == Approx(0.3374).epsilon(1e-3));
  CHECK(units::radians_to_degrees(*r.theta) == Approx(2.792).epsilon(1e-3));
  // The pound and lbf factors cancel, as in the imperial form of the formula.
  const double phi = std::asin(7.5 * 22 / (800 * std::sqrt(35.0 * 35 + 1.5 * 1.5)));
  CHECK(*r.phi == Approx(phi).epsilon(1e-5));
}

TEST_CASE("equal widths remove the lean term") {
  const auto r = tipping_angle(imperial(7.5, 20, 20, 35, 400));
  CHECK(*r.theta == *r.phi);
}

TEST_CASE("tiny force never tips") {
  const auto r = tipping_angle(imperial(7.5, 22, 19, 35, 0.01));
  CHECK(r.status == TipStatus::NoTip);
  CHECK_FALSE(r.phi.has_value());
  CHECK_FALSE(r.theta.has_value());
}

TEST_CASE("invalid inputs") {
  for (auto s : {imperial(7.5, 22, 19, 0, 400), imperial(7.5, 22, 19, 35, 0), imperial(7.5, 22, 19, -1, 400),
                 imperial(0, 22, 19, 35, 400)}) {
    try {
      tipping_angle(s);
      FAIL("expected InvalidStabilityInput");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidStabilityInput);
    }
  }
}

TEST_CASE("agreement with a 50-digit evaluation") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> mass(1.0, 20.0), l1(14.0, 30.0), l2(12.0, 28.0), h(20.0, 45.0),
      f(5.0, 600.0);
  int tips = 0, no_tip = 0;
  while (tips < 1000) {
    const auto s = imperial(mass(rng), l1(rng), l2(rng), h(rng), f(rng));
    const Oracle o = oracle(s);
    const auto r = tipping_angle(s);
    if (o.arg > 1) {
      CHECK(r.status == TipStatus::NoTip);
      ++no_tip;
      continue;
    }
    REQUIRE(r.status == TipStatus::Tips);
    // asin amplifies input rounding near 1; stay where the condition number is modest.
    if (o.arg > 0.99) continue;
    const double expected = static_cast<double>(o.theta);
    CHECK(std::abs(*r.theta - expected) <= 1e-12 * std::abs(expected));
    CHECK(std::abs(*r.phi - static_cast<double>(o.phi)) <= 1e-12 * static_cast<double>(o.phi));
    ++tips;
  }
  CHECK(no_tip > 0);
}

TEST_CASE("no tip exactly when the asin argument exceeds one") {
  const auto base = imperial(7.5, 22, 19, 35, 400);
  const Oracle o = oracle(base);
  // Force giving an argument of exactly 1 in real arithmetic.
  const double f_one = static_cast<double>(Hp(base.force) * o.arg);
  for (double k : {1.0 - 1e-9, 1.0 - 1e-6, 1.0 - 1e-3}) {
    auto s = base;
    s.force = f_one * k;
    CHECK(oracle(s).arg > 1);
    CHECK(tipping_angle(s).status == TipStatus::NoTip);
    s.force = f_one / k;
    CHECK(oracle(s).arg < 1);
    CHECK(tipping_angle(s).status == TipStatus::Tips);
  }
}

TEST_CASE("phi approaches 90 degrees at the boundary") {
  const auto base = imperial(7.5, 22, 19, 35, 400);
  const double f_one = static_cast<double>(Hp(base.force) * oracle(base).arg);
  double last = 0.0;
  for (double k : {1.1, 1.01, 1.0001, 1.000001, 1.00000001}) {
    auto s = base;
    s.force = f_one * k;
    const double phi = units::radians_to_degrees(*tipping_angle(s).phi);
    CHECK(phi > last);
    last = phi;
  }
  CHECK(last == Approx(90.0).epsilon(1e-3));
}

TEST_CASE("monotone in mass, force and height") {
  const int n = 2000;
  double prev = -1.0;
  for (int i = 0; i < n; ++i) {
    const double t = theta_deg(imperial(2.0 + 18.0 * i / n, 22, 19, 35, 400));
    CHECK(t > prev);
    prev = t;
  }
  prev = 1e9;
  for (int i = 0; i < n; ++i) {
    const double t = theta_deg(imperial(7.5, 22, 19, 35, 50.0 + 550.0 * i / n));
    CHECK(t < prev);
    prev = t;
  }
  for (double l2 : {22.0, 19.0, 14.0}) {
    prev = 1e9;
    for (int i = 0; i < n; ++i) {
      const double t = theta_deg(imperial(7.5, 22, l2, 20.0 + 30.0 * i / n, 400));
      CHECK(t < prev);
      prev = t;
    }
  }
}

TEST_CASE("imperial and SI inputs agree") {
  const auto a = imperial(7.5, 22, 19, 35, 400);
  StabilityInput<double> b;
  b.mass = 7.5 * 0.45359237;
  b.leg_width = 22 * 0.0254;
  b.handle_distance = 19 * 0.0254;
  b.height = 35 * 0.0254;
  b.force = 400 * 4.4482216152605;
  CHECK(*tipping_angle(a).theta == Approx(*tipping_angle(b).theta).epsilon(1e-12));
}

TEST_CASE("template evaluates in extended precision") {
  StabilityInput<Hp> s{Hp(3.4), Hp(0.5588), Hp(0.4826), Hp(0.889), Hp(1779.3)};
  const auto r = tipping_angle(s);
  REQUIRE(r.theta.has_value());
  const auto d = tipping_angle(StabilityInput<double>{3.4, 0.5588, 0.4826, 0.889, 1779.3});
  CHECK(static_cast<double>(*r.theta) == Approx(*d.theta).epsilon(1e-13));
}

TEST_CASE("dynamic stability is the vertical center of mass") {
  const double in = units::inches_to_meters(1.0);
  const auto tube = section_from(0.02, 0.002);
  const FrameGraph bar = testing::single_member({0, 0, 10 * in}, {0.5, 0.1, 10 * in}, tube);
  CHECK(dynamic_stability(bar) == Approx(10.0).epsilon(1e-12));

  const FrameGraph f = build_frame(original_design());
  CHECK(dynamic_stability(f) == units::meters_to_inches(mass_properties(f).com.z()));

  FrameGraph tall = f;
  for (Eigen::Vector3d& p : tall.nodes) p.z() *= 2;
  // Members stretch with the frame, so compare against a uniform-density sum.
  double mass = 0.0, moment = 0.0;
  for (std::size_t i = 0; i < tall.members.size(); ++i) {
    const Member& m = tall.members[i];
    const double mi = material_properties(m.material).density * m.section.area * tall.member_length(i);
    mass += mi;
    moment += mi * 0.5 * (tall.nodes[m.node_a].z() + tall.nodes[m.node_b].z());
  }
  CHECK(dynamic_stability(tall) == Approx(units::meters_to_inches(moment / mass)).epsilon(1e-12));

  // Uniform vertical scaling of a frame of vertical members only doubles the height exactly.
  FrameGraph post;
  post.nodes = {{0, 0, 0}, {0, 0, 0.4}, {0.3, 0, 0}, {0.3, 0, 0.7}};
  post.members = {{0, 1, tube, Material::Aluminum, MemberGroup::Frame},
                  {2, 3, tube, Material::Steel, MemberGroup::Frame}};
  FrameGraph post2 = post;
  for (Eigen::Vector3d& p : post2.nodes) p.z() *= 2;
  CHECK(dynamic_stability(post2) == Approx(2 * dynamic_stability(post)).epsilon(1e-12));
}

TEST_CASE("annotate_dataset") {
  const DesignVector d = original_design();
  std::vector<DesignVector> designs{d, d, d};
  designs[2][Param::OverallHeight] = 38.0;
  std::vector<PerformanceRecord> records(3);
  records[0].mass_lbs = 7.5;
  records[1].mass_lbs = 9.0;
  records[2].mass_lbs = 7.5;
  annotate_dataset(records, designs, 400.0);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(records[i].tip_status == TipStatus::Tips);
    CHECK(records[i].theta_deg == Approx(theta_deg(stability_input(designs[i], records[i].mass_lbs, 400.0))));
  }
  CHECK(records[1].theta_deg > records[0].theta_deg);
  CHECK(records[2].theta_deg < records[0].theta_deg);

  std::vector<PerformanceRecord> light(1);
  light[0].mass_lbs = 7.5;
  annotate_dataset(light, std::span(&d, 1), 0.01);
  CHECK(light[0].tip_status == TipStatus::NoTip);
  CHECK(theta_for_learning(d, light[0]) == Approx(90.0 + units::radians_to_degrees(std::atan(1.5 / 35.0))));
  CHECK(theta_for_learning(d, records[0]) == records[0].theta_deg);

  std::vector<PerformanceRecord> missing(1);
  try {
    annotate_dataset(missing, std::span(&d, 1), 400.0);
    FAIL("expected IncompleteRecord");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IncompleteRecord);
  }
  CHECK_THROWS_AS(annotate_dataset(records, std::span(&d, 1), 400.0), Error);
}
