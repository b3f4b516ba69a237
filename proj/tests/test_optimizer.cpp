#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "synthetic_data.hpp"
#include "test_support.hpp"
#include "walker/csv.hpp"
#include "walker/error.hpp"
#include "walker/optimizer/constraints.hpp"
#include "walker/optimizer/counterfactual.hpp"
#include "walker/optimizer/gower.hpp"

using namespace walker;
using namespace walker::optimizer;
using doctest::Approx;

namespace {

void expect_code(ErrorCode code, auto&& fn) {
  try {
    fn();
    FAIL("expected " << to_string(code));
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

DesignVector random_design(std::mt19937_64& rng, const ParameterRanges& r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> m(0, 2);
  DesignVector d;
  for (int k = 0; k < kNumContinuous; ++k) d.values[k] = r.lower[k] + u(rng) * r.range[k];
  d.front_crossbeam_material = static_cast<Material>(m(rng));
  d.frame_material = static_cast<Material>(m(rng));
  return d;
}

struct Fixture {
  Dataset rows;
  std::vector<DesignVector> designs;
  surrogate::SurrogateEnsemble model;
};

const Fixture& fixture() {
  static const Fixture f = [] {
    Fixture out;
    out.rows = testing::synthetic_dataset(1024, 4);
    out.designs = designs_of(out.rows);
    surrogate::SurrogateConfig c;
    c.forest_trees = 10;
    c.boosting_rounds = 40;
    c.folds = 3;
    out.model = surrogate::SurrogateEnsemble::train(out.rows, ParameterRanges::defaults(), c);
    return out;
  }();
  return f;
}

GAConfig small_ga(std::uint64_t seed = 42) {
  GAConfig g;
  g.population_size = 40;
  g.generations = 50;
  g.seed = seed;
  return g;
}

CounterfactualQuery generic_query(const surrogate::SurrogateEnsemble& e) {
  CounterfactualQuery q;
  q.query_design = original_design();
  q.exploration = ParameterRanges::defaults();
  q.exploration.set(Param::OverallHeight, 32.0, 38.0);
  q.exploration.set(Param::HandleDistance, 18.5, 19.5);
  const PerformanceRecord base = e.predict(q.query_design);
  q.targets[Target::Mass].upper = base.mass_lbs - 0.3;
  q.targets[Target::MinSafetyFactor].lower = base.min_safety_factor;
  return q;
}

Candidate candidate(double a, double b, double c, double first_value) {
  Candidate x;
  x.design = original_design();
  x.design.values[0] = first_value;
  x.objectives = {a, b, c};
  x.geometric_feasible = true;
  x.constraints.satisfied.fill(true);
  return x;
}

}  // namespace

TEST_CASE("Gower distance examples") {
  const ParameterRanges r = ParameterRanges::defaults();
  const DesignVector a = original_design();
  CHECK(gower_distance(a, a, r) == 0.0);

  DesignVector b = a;
  b.frame_material = Material::Titanium;
  CHECK(gower_distance(a, b, r) == Approx(1.0 / 16));

  DesignVector lo, hi;
  lo.values = r.lower;
  hi.values = r.upper();
  CHECK(gower_distance(lo, hi, r) == Approx(14.0 / 16));
}

TEST_CASE("Gower metric axioms") {
  const ParameterRanges r = ParameterRanges::defaults();
  const GowerMetric g(r);
  std::mt19937_64 rng(77);
  for (int i = 0; i < 2000; ++i) {
    const DesignVector a = random_design(rng, r), b = random_design(rng, r), c = random_design(rng, r);
    const double ab = g(a, b), bc = g(b, c), ac = g(a, c);
    CHECK(g(a, a) == 0.0);
    CHECK(ab == g(b, a));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ac <= ab + bc + 1e-15);
  }
}

TEST_CASE("zero-range features are skipped") {
  ParameterRanges r = ParameterRanges::defaults();
  r.range[static_cast<int>(Param::HandleLength)] = 0.0;
  const GowerMetric g(r);
  CHECK(g.active_features() == 15);
  DesignVector a = original_design(), b = a;
  b[Param::HandleLength] += 3.0;
  CHECK(g(a, b) == 0.0);
  b.front_crossbeam_material = Material::Steel;
  CHECK(g(a, b) == Approx(1.0 / 15));
}

TEST_CASE("changed feature ratio") {
  const ParameterRanges r = ParameterRanges::defaults();
  const GowerMetric g(r);
  DesignVector a = original_design(), b = a;
  b[Param::OverallHeight] += 0.001 * r.range[0];  // inside tolerance
  CHECK(g.changed_ratio(a, b, 0.01) == 0.0);
  b[Param::BaseLength] += 0.5 * r.range[1];
  b.frame_material = Material::Steel;
  CHECK(g.changed_ratio(a, b, 0.01) == Approx(2.0 / 16));
}

TEST_CASE("counterfactual objectives") {
  const ParameterRanges r = ParameterRanges::defaults();
  const GowerMetric g(r);
  std::mt19937_64 rng(5);
  std::vector<DesignVector> data{random_design(rng, r), random_design(rng, r), random_design(rng, r)};
  const DesignVector q = original_design();

  const DatasetProximity k1(data, g, 1);
  const Objectives self = counterfactual_objectives(q, q, g, k1);
  CHECK(self[0] == 0.0);
  CHECK(self[1] == 0.0);
  CHECK(self[2] == k1(q));
  CHECK(counterfactual_objectives(data[1], q, g, k1)[2] == 0.0);

  const DatasetProximity k2(data, g, 2);
  std::vector<double> d{g(q, data[0]), g(q, data[1]), g(q, data[2])};
  std::sort(d.begin(), d.end());
  CHECK(k2(q) == Approx((d[0] + d[1]) / 2).epsilon(1e-12));

  const DatasetProximity clamped(data, g, 10);
  CHECK(clamped.k() == 3);
  CHECK(clamped(q) == Approx((d[0] + d[1] + d[2]) / 3).epsilon(1e-12));

  expect_code(ErrorCode::InsufficientData, [&] { DatasetProximity(std::span<const DesignVector>{}, g, 1); });
  expect_code(ErrorCode::InvalidConfig, [&] { DatasetProximity(data, g, 0); });
}

TEST_CASE("dominance") {
  CHECK(dominates({0, 0, 0}, {0, 0, 1}));
  CHECK_FALSE(dominates({0, 0, 0}, {0, 0, 0}));
  CHECK_FALSE(dominates({0, 1, 0}, {1, 0, 0}));
}

TEST_CASE("constraint examples") {
  PerformanceTargets t;
  t[Target::Mass].upper = 6.0;
  PerformanceRecord p;
  p.mass_lbs = 5.9;
  CHECK(constraint_check(p, t).ok());
  p.mass_lbs = 6.0;
  CHECK(constraint_check(p, t).ok());
  p.mass_lbs = 6.3;
  const ConstraintReport rep = constraint_check(p, t);
  CHECK_FALSE(rep.satisfied[0]);
  CHECK(rep.violation == Approx(0.3));
  TargetVector norm = TargetVector::Ones();
  norm[0] = 2.0;
  CHECK(constraint_check(p, t, norm).violation == Approx(0.15));
  CHECK(describe_violations(p, t) == "mass <= 6 (got 6.3)");

  CHECK(constraint_check(p, PerformanceTargets{}).ok());
  CHECK_FALSE(PerformanceTargets{}.any());

  PerformanceTargets theta;
  theta[Target::Theta].lower = 5.0;
  PerformanceRecord no_tip;
  no_tip.tip_status = TipStatus::NoTip;
  CHECK(constraint_check(no_tip, theta).ok());
  theta[Target::Theta].upper = 10.0;
  CHECK(constraint_check(no_tip, theta).violation == 1.0);

  PerformanceRecord nan;
  nan.mass_lbs = std::nan("");
  CHECK(constraint_check(nan, t).violation == 1.0);
}

TEST_CASE("baseline bounds resolve against the baseline record") {
  TargetSpecs specs{};
  specs[static_cast<int>(Target::Mass)].upper = BoundValue{false, 6.0};
  specs[static_cast<int>(Target::MinSafetyFactor)].lower = BoundValue{true, 0.0};
  PerformanceRecord base;
  base.min_safety_factor = 8.8;
  const PerformanceTargets t = resolve_targets(specs, base);
  CHECK(*t[Target::Mass].upper == 6.0);
  CHECK(*t[Target::MinSafetyFactor].lower == 8.8);
  CHECK_FALSE(t[Target::Theta].constrained());
}

TEST_CASE("final_sample reductions") {
  const GowerMetric g(ParameterRanges::defaults());
  GAConfig cfg;
  cfg.sample_count = 3;

  SUBCASE("single candidate") {
    const std::vector<Candidate> one{candidate(0.1, 0.2, 0.3, 35.0)};
    const auto out = final_sample(one, cfg, g);
    REQUIRE(out.size() == 1u);
    CHECK(out[0].design == one[0].design);
  }
  SUBCASE("zero diversity picks the lowest weighted objectives") {
    // Trade-off front so no candidate dominates another.
    std::vector<Candidate> archive;
    for (int i = 0; i < 6; ++i) archive.push_back(candidate(0.1 * i, 0.6 - 0.11 * i, 0.2, 30.0 + i));
    cfg.diversity_weight = 0.0;
    const auto out = final_sample(archive, cfg, g);
    REQUIRE(out.size() == 3u);
    std::vector<double> sums;
    for (const auto& c : archive) sums.push_back(c.objectives[0] + c.objectives[1] + c.objectives[2]);
    std::vector<double> sorted = sums;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& r : out) CHECK(r.objectives[0] + r.objectives[1] + r.objectives[2] <= sorted[2] + 1e-15);
  }
  SUBCASE("duplicates are picked once") {
    std::vector<Candidate> archive{candidate(0.1, 0.1, 0.1, 35.0), candidate(0.1, 0.1, 0.1, 35.0),
                                   candidate(0.05, 0.3, 0.1, 36.0)};
    cfg.diversity_weight = 0.3;
    const auto out = final_sample(archive, cfg, g);
    int copies = 0;
    for (const auto& r : out) copies += r.design == archive[0].design;
    CHECK(copies == 1);
  }
  SUBCASE("dominated candidates are never returned") {
    std::vector<Candidate> archive{candidate(0.1, 0.1, 0.1, 35.0), candidate(0.2, 0.2, 0.2, 36.0)};
    const auto out = final_sample(archive, cfg, g);
    REQUIRE(out.size() == 1u);
    CHECK(out[0].objectives[0] == 0.1);
  }
}

TEST_CASE("query validation") {
  const Fixture& f = fixture();
  const ParameterRanges r = ParameterRanges::defaults();
  CounterfactualQuery q = generic_query(f.model);
  CHECK_NOTHROW(validate_query(q, r, f.model));

  CounterfactualQuery wide = q;
  wide.exploration.set(Param::OverallHeight, 20.0, 38.0);
  try {
    validate_query(wide, r, f.model);
    FAIL("expected InvalidQuery");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidQuery);
    CHECK(std::string(e.what()).find("overall_height_in") != std::string::npos);
  }

  CounterfactualQuery flipped = q;
  flipped.targets[Target::Mass].lower = 9.0;
  flipped.targets[Target::Mass].upper = 6.0;
  expect_code(ErrorCode::InvalidQuery, [&] { validate_query(flipped, r, f.model); });

  surrogate::SurrogateEnsemble flagged = f.model;
  TargetVector r2 = TargetVector::Constant(0.9);
  r2[static_cast<int>(Target::MinSafetyFactor)] = 0.2;
  flagged.set_test_r2(r2);
  expect_code(ErrorCode::InvalidQuery, [&] { validate_query(q, r, flagged); });
  q.allow_unreliable_targets = true;
  CHECK_NOTHROW(validate_query(q, r, flagged));
}

TEST_CASE("evolve returns sound counterfactuals") {
  const Fixture& f = fixture();
  const ParameterRanges r = ParameterRanges::defaults();
  CounterfactualQuery q = generic_query(f.model);
  q.frozen[static_cast<int>(Param::HandleDistance)] = true;
  q.frozen[kFrameMaterialFeature] = true;
  const GAConfig cfg = small_ga();
  const EvolveResult res = evolve(q, f.model, f.designs, r, cfg);
  REQUIRE_FALSE(res.archive.empty());
  CHECK(res.evaluations > 0);

  for (const Candidate& c : res.archive) {
    CHECK(check_feasibility(c.design).valid);
    CHECK(constraint_check(f.model.predict(c.design), q.targets).ok());
    CHECK(c.design[Param::HandleDistance] == q.query_design[Param::HandleDistance]);
    CHECK(c.design.frame_material == q.query_design.frame_material);
    CHECK(q.exploration.contains(c.design));
  }

  const GowerMetric metric(r);
  const auto out = final_sample(res.archive, cfg, metric);
  REQUIRE_FALSE(out.empty());
  CHECK(out.size() <= static_cast<std::size_t>(cfg.sample_count));
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(constraint_check(f.model.predict(out[i].design), q.targets).ok());
    for (std::size_t j = 0; j < out.size(); ++j)
      if (i != j) CHECK_FALSE(dominates(out[i].objectives, out[j].objectives));
  }

  // Same seed, same answer; worker count does not matter.
  GAConfig threaded = cfg;
  threaded.workers = 4;
  const EvolveResult again = evolve(q, f.model, f.designs, r, threaded);
  REQUIRE(again.archive.size() == res.archive.size());
  for (std::size_t i = 0; i < res.archive.size(); ++i) CHECK(again.archive[i].design == res.archive[i].design);
}

TEST_CASE("wide targets keep the query itself") {
  const Fixture& f = fixture();
  CounterfactualQuery q;
  q.query_design = original_design();
  const PerformanceRecord p = f.model.predict(q.query_design);
  q.targets[Target::Mass].lower = p.mass_lbs - 5.0;
  q.targets[Target::Mass].upper = p.mass_lbs + 5.0;
  const EvolveResult res = evolve(q, f.model, f.designs, ParameterRanges::defaults(), small_ga());
  double best = 1.0;
  for (const Candidate& c : res.archive) best = std::min(best, c.objectives[0]);
  CHECK(best == Approx(0.0).epsilon(1e-12));
}

TEST_CASE("impossible targets raise NoCounterfactualsFound") {
  const Fixture& f = fixture();
  CounterfactualQuery q;
  q.query_design = original_design();
  q.targets[Target::Mass].upper = 0.1;
  try {
    evolve(q, f.model, f.designs, ParameterRanges::defaults(), small_ga());
    FAIL("expected NoCounterfactualsFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoCounterfactualsFound);
    CHECK(std::string(e.what()).find("mass <= 0.1") != std::string::npos);
  }
}

TEST_CASE("a mass bound pushes the population toward lighter designs") {
  const Fixture& f = fixture();
  CounterfactualQuery q;
  q.query_design = original_design();
  q.targets[Target::Mass].upper = f.model.predict(q.query_design).mass_lbs - 0.5;
  const EvolveResult res = evolve(q, f.model, f.designs, ParameterRanges::defaults(), small_ga(3));
  auto mean_mass = [](const std::vector<Candidate>& cs) {
    double s = 0.0;
    int n = 0;
    for (const Candidate& c : cs) {
      if (!c.geometric_feasible) continue;
      s += c.predicted.mass_lbs;
      ++n;
    }
    return s / n;
  };
  CHECK(mean_mass(res.archive) < mean_mass(res.initial_population));
}

TEST_CASE("GA config validation") {
  GAConfig g;
  CHECK_NOTHROW(g.validate());
  g.population_size = 5;
  expect_code(ErrorCode::InvalidConfig, [&] { g.validate(); });
  g = GAConfig{};
  g.generations = 0;
  expect_code(ErrorCode::InvalidConfig, [&] { g.validate(); });
}

TEST_CASE("validation re-simulates and flags misses") {
  std::vector<CounterfactualResult> none;
  validate(none, PerformanceTargets{}, fea::SimulationOptions{}, 400.0);
  CHECK(none.empty());

  std::vector<CounterfactualResult> results(3);
  results[0].design = original_design();
  results[0].predicted = fea::simulate(original_design());
  results[0].predicted.mass_lbs *= 1.02;
  results[1].design = original_design();
  results[1].design[Param::OverallHeight] = -1.0;  // cannot be built
  results[2].design = original_design();
  results[2].design[Param::FrameTubeThickness] = 0.2;

  PerformanceTargets t;
  t[Target::Mass].upper = 9.0;
  validate(results, t, fea::SimulationOptions{}, 400.0);

  REQUIRE(results[0].simulated.has_value());
  CHECK_FALSE(results[0].flagged);
  CHECK(results[0].relative_error[0] == Approx(0.02).epsilon(1e-9));
  CHECK(results[0].simulated->tip_status == TipStatus::Tips);

  CHECK_FALSE(results[1].simulated.has_value());
  CHECK(results[1].flagged);
  CHECK_FALSE(results[1].note.empty());

  REQUIRE(results[2].simulated.has_value());
  CHECK(results[2].simulated->mass_lbs > 9.0);
  CHECK(results[2].flagged);
  CHECK(results[2].note.find("mass") != std::string::npos);

  testing::TempDir dir("cf");
  write_counterfactuals_csv(dir.path() / "cf.csv", original_design(), results[0].predicted, results[0].simulated,
                            results);
  const csv::Table table = csv::read(dir.path() / "cf.csv");
  REQUIRE(table.rows.size() == 4u);
  CHECK(table.rows[0][0] == "baseline");
  CHECK(table.rows[1][0] == "counterfactual");
  const int mass_col = table.require("pred_mass_lbs");
  const int sim_col = table.require("sim_mass_lbs");
  CHECK(table.rows[2][sim_col].empty());
  CHECK_FALSE(table.rows[1][mass_col].empty());
  CHECK(table.rows[3][table.require("flagged")] == "true");
}

TEST_CASE("feature names") {
  CHECK(feature_index("handle_distance_in") == static_cast<int>(Param::HandleDistance));
  CHECK(feature_index("frame_material") == kFrameMaterialFeature);
  CHECK(feature_name(kFrontMaterialFeature) == "front_crossbeam_material");
  expect_code(ErrorCode::InvalidQuery, [] { feature_index("wheel_size"); });
}
