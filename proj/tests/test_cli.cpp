#include <doctest.h>

#include <cmath>
#include <functional>
#include <fstream>
#include <random>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "test_support.hpp"
#include "walker/analysis.hpp"
#include "walker/csv.hpp"
#include "walker/dataset.hpp"
#include "walker/error.hpp"
#include "walker/feasibility.hpp"

using namespace walker;
using namespace walker::cli;
using doctest::Approx;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

PipelineConfig config_in(const testing::TempDir& dir, int workers = 1) {
  PipelineConfig c = default_config();
  c.output_dir = dir.path();
  c.workers = workers;
  return c;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::IoError;
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  FAIL("expected an Error");
  return {};
}

}  // namespace

TEST_CASE("config defaults") {
  const PipelineConfig c = default_config();
  CHECK(c.design_count == 8192);
  CHECK(c.stability_force_lbf == 400.0);
  CHECK(c.query.exploration.lower[static_cast<int>(Param::OverallHeight)] == 32.0);
  CHECK(c.query.exploration.upper()[static_cast<int>(Param::OverallHeight)] == 38.0);
  CHECK(c.query.exploration.lower[static_cast<int>(Param::HandleDistance)] == 18.5);
  CHECK(c.query.exploration.upper()[static_cast<int>(Param::HandleDistance)] == 19.5);
  const auto& mass = c.query.targets[static_cast<std::size_t>(Target::Mass)];
  REQUIRE(mass.upper.has_value());
  CHECK(mass.upper->value == 6.0);
  CHECK(c.query.targets[static_cast<std::size_t>(Target::MinSafetyFactor)].lower->from_baseline);
  CHECK(c.query.targets[static_cast<std::size_t>(Target::Theta)].lower->from_baseline);
  CHECK(c.query.targets[static_cast<std::size_t>(Target::LegDisplacement)].upper->from_baseline);

  const PipelineConfig empty = config_from_json(json::object());
  CHECK(config_to_json(empty) == config_to_json(c));
}

TEST_CASE("config round trip through json") {
  PipelineConfig c = default_config();
  c.seed = 9;
  c.design_count = 100;
  c.optimizer.population_size = 30;
  c.query.frozen[static_cast<std::size_t>(Param::OverallHeight)] = true;
  c.plot_targets = {Target::Mass, Target::Theta};
  const json j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j)) == j);
}

TEST_CASE("config rejects unknown keys and bad values by field") {
  CHECK(message_of([] { config_from_json(json::parse(R"({"sead": 3})")); }).find("sead") != std::string::npos);
  CHECK(message_of([] { config_from_json(json::parse(R"({"optimizer": {"popsize": 3}})")); })
            .find("optimizer.popsize") != std::string::npos);
  CHECK(message_of([] { config_from_json(json::parse(R"({"ranges": {"overall_height_in": [40, 30]}})")); })
            .find("ranges.overall_height_in") != std::string::npos);
  CHECK(message_of([] { config_from_json(json::parse(R"({"query": {"targets": {"massy": {"max": 3}}}})")); })
            .find("query.targets.massy") != std::string::npos);
  CHECK(code_of([] { config_from_json(json::parse(R"({"workers": -2})")); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json(json::parse(R"({"seed": "x"})")); }) == ErrorCode::InvalidConfig);
  CHECK(code_of([] { config_from_json(json::parse(R"({"query": {"targets": {"mass": {"max": "lots"}}}})")); }) ==
        ErrorCode::InvalidConfig);
}

TEST_CASE("config query bounds accept numbers and baseline") {
  const PipelineConfig c = config_from_json(json::parse(R"({
    "query": {"targets": {"mass": {"max": 5.6}, "min_safety_factor": {"min": "baseline"}},
              "frozen": ["frame_material"]}})"));
  const auto& t = c.query.targets;
  CHECK(t[static_cast<std::size_t>(Target::Mass)].upper->value == 5.6);
  CHECK_FALSE(t[static_cast<std::size_t>(Target::Mass)].upper->from_baseline);
  CHECK(t[static_cast<std::size_t>(Target::MinSafetyFactor)].lower->from_baseline);
  CHECK_FALSE(t[static_cast<std::size_t>(Target::Theta)].lower.has_value());
  CHECK(c.query.frozen[static_cast<std::size_t>(optimizer::feature_index("frame_material"))]);
}

TEST_CASE("load_config reports a missing file") {
  CHECK(code_of([] { load_config("/nonexistent/walker.json"); }) == ErrorCode::IoError);
}

TEST_CASE("generate is reproducible and reports counts") {
  testing::TempDir dir("cli_generate");
  const PipelineConfig c = config_in(dir);
  std::ostringstream out;
  cmd_generate(c, 128, out);
  const std::string first = slurp(OutputPaths{c.output_dir}.designs());
  const Dataset rows = read_dataset_csv(OutputPaths{c.output_dir}.designs());
  std::ostringstream expected;
  expected << "requested=128 dropped=" << 128 - rows.size() << " valid=" << rows.size() << "\n";
  CHECK(out.str() == expected.str());
  for (const DatasetRow& r : rows) {
    CHECK(r.status == SimStatus::Pending);
    CHECK(check_feasibility(r.design).valid);
  }
  std::ostringstream again;
  cmd_generate(c, 128, again);
  CHECK(slurp(OutputPaths{c.output_dir}.designs()) == first);
}

TEST_CASE("simulate is deterministic across workers and resumable") {
  testing::TempDir one("cli_sim_one"), many("cli_sim_many");
  const PipelineConfig c1 = config_in(one, 1);
  const PipelineConfig c4 = config_in(many, 4);
  std::ostringstream sink;
  cmd_generate(c1, 96, sink);
  cmd_generate(c4, 96, sink);

  const SimulateSummary s1 = cmd_simulate(c1, std::nullopt, false, sink);
  const SimulateSummary s4 = cmd_simulate(c4, std::nullopt, false, sink);
  CHECK(s1.simulated == s4.simulated);
  CHECK(s1.failed == 0);
  CHECK(slurp(OutputPaths{one.path()}.dataset()) == slurp(OutputPaths{many.path()}.dataset()));

  const std::string before = slurp(OutputPaths{one.path()}.dataset());
  std::ostringstream rerun;
  const SimulateSummary again = cmd_simulate(c1, std::nullopt, false, rerun);
  CHECK(again.simulated == 0);
  CHECK(again.skipped == s1.simulated);
  CHECK(slurp(OutputPaths{one.path()}.dataset()) == before);

  const SimulateSummary forced = cmd_simulate(c1, std::nullopt, true, rerun);
  CHECK(forced.simulated == s1.simulated);
  CHECK(slurp(OutputPaths{one.path()}.dataset()) == before);
}

TEST_CASE("a failing design is isolated") {
  testing::TempDir dir("cli_sim_fail");
  const PipelineConfig c = config_in(dir, 3);
  Dataset rows(4);
  for (int i = 0; i < 4; ++i) {
    rows[i].design_id = i;
    rows[i].sobol_index = i;
    rows[i].design = original_design();
  }
  rows[1].design[Param::FrameTubeInnerDiameter] = 2.0;  // outer diameter above the limit
  rows[2].design[Param::OverallHeight] = 36.0;
  write_designs_csv(OutputPaths{c.output_dir}.designs(), rows);

  std::ostringstream out;
  const SimulateSummary s = cmd_simulate(c, std::nullopt, false, out);
  CHECK(s.failed == 1);
  CHECK(s.ok == 3);
  CHECK(out.str() == "simulated=4 skipped=0 ok=3 failed=1\n");
  const Dataset back = read_dataset_csv(OutputPaths{c.output_dir}.dataset());
  REQUIRE(back.size() == 4);
  CHECK(back[1].status == SimStatus::Failed);
  const csv::Table raw = csv::read(OutputPaths{c.output_dir}.dataset());
  CHECK(raw.rows[1][raw.require("mass_lbs")].empty());
  CHECK(raw.rows[1][raw.require("sim_status")] == "failed");
  CHECK(back[0].status == SimStatus::Ok);
  CHECK(back[0].performance.mass_lbs == back[3].performance.mass_lbs);
  CHECK(back[2].performance.mass_lbs > back[0].performance.mass_lbs);

  // A failed row stays failed on rerun unless forced.
  std::ostringstream rerun;
  CHECK(cmd_simulate(c, std::nullopt, false, rerun).simulated == 0);
}

TEST_CASE("missing inputs name the file") {
  testing::TempDir dir("cli_missing");
  const PipelineConfig c = config_in(dir);
  std::ostringstream out;
  CHECK(message_of([&] { cmd_simulate(c, std::nullopt, false, out); }).find("designs.csv") != std::string::npos);
  CHECK(code_of([&] { cmd_train(c, out); }) == ErrorCode::IoError);
  CHECK(code_of([&] { cmd_optimize(c, out); }) == ErrorCode::IoError);
  CHECK(code_of([&] { cmd_plotdata(c, {}, out); }) == ErrorCode::IoError);
}

TEST_CASE("directory lock is exclusive") {
  testing::TempDir dir("cli_lock");
  const OutputPaths p{dir.path()};
  {
    DirectoryLock a(p.lock());
    CHECK(code_of([&] { DirectoryLock b(p.lock()); }) == ErrorCode::IoError);
  }
  DirectoryLock c(p.lock());
}

TEST_CASE("pearson") {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 4, 6, 8, 10};
  const std::vector<double> z{5, 4, 3, 2, 1};
  CHECK(analysis::pearson(x, y) == Approx(1.0));
  CHECK(analysis::pearson(x, z) == Approx(-1.0));
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{1, 3, 2, 4};
  CHECK(analysis::pearson(a, b) == Approx(0.8));
  const std::vector<double> flat{3, 3, 3, 3, 3};
  CHECK(std::isnan(analysis::pearson(x, flat)));
  CHECK(code_of([&] { analysis::pearson(x, a); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("silverman bandwidth") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> v(4000);
  for (double& x : v) x = n01(rng);
  CHECK(analysis::silverman_bandwidth(v) == Approx(0.9 * std::pow(4000.0, -0.2)).epsilon(0.05));
  const std::vector<double> flat{2, 2, 2};
  CHECK(analysis::silverman_bandwidth(flat) > 0.0);
}

TEST_CASE("kde integrates to one") {
  std::mt19937_64 rng(5);
  std::gamma_distribution<double> g(2.0, 1.5);
  std::vector<double> v(800);
  for (double& x : v) x = g(rng);
  const analysis::KdeCurve k = analysis::gaussian_kde(v);
  CHECK(analysis::trapezoid(k.x, k.density) == Approx(1.0).epsilon(0.01));
  CHECK(analysis::kde_at(v, k.bandwidth, k.x[100]) == Approx(k.density[100]).epsilon(1e-12));
  v.push_back(500.0);
  const analysis::KdeCurve tail = analysis::gaussian_kde(v);
  CHECK(analysis::trapezoid(tail.x, tail.density) == Approx(1.0).epsilon(0.01));
  CHECK(tail.x[1] - tail.x[0] <= 0.5 * tail.bandwidth);
  const std::vector<double> one{1.0};
  CHECK(code_of([&] { analysis::gaussian_kde(one); }) == ErrorCode::InsufficientData);
}

TEST_CASE("plotdata tables") {
  testing::TempDir dir("cli_plot");
  PipelineConfig c = config_in(dir, 2);
  std::ostringstream sink;
  cmd_generate(c, 128, sink);
  cmd_simulate(c, std::nullopt, false, sink);

  std::ostringstream out;
  cmd_plotdata(c, {}, out);
  const OutputPaths p{c.output_dir};
  const csv::Table scatter = csv::read(p.scatter());
  const Dataset ok = usable_rows(read_dataset_csv(p.dataset()));
  CHECK(scatter.rows.size() == ok.size() + 1);
  CHECK(scatter.rows.back()[0] == "query");
  for (const char* col : {"handle_dx_in", "handle_dy_in", "handle_dz_in"}) {
    const int k = scatter.require(col);
    for (const auto& r : scatter.rows) CHECK(csv::parse_double(r[k], "scatter") >= 0.0);
  }

  const csv::Table kde = csv::read(p.kde());
  for (Target t : c.plot_targets) {
    std::vector<double> x, y;
    for (const auto& r : kde.rows)
      if (r[0] == short_name(t) && r[1] == "kde") {
        x.push_back(csv::parse_double(r[2], "kde"));
        y.push_back(csv::parse_double(r[3], "kde"));
      }
    CHECK(analysis::trapezoid(x, y) == Approx(1.0).epsilon(0.01));
  }
  const csv::Table corr = csv::read(p.correlations());
  CHECK(corr.rows.size() == c.plot_targets.size() * (c.plot_targets.size() - 1) / 2);
  CHECK(out.str().find("pearson(mass, handle_dx)=") != std::string::npos);

  std::ostringstream chosen;
  cmd_plotdata(c, {"mass", "theta"}, chosen);
  CHECK(chosen.str().rfind("rows=" + std::to_string(ok.size()) + " targets=2\n", 0) == 0);
  CHECK(code_of([&] { cmd_plotdata(c, {"massiness"}, chosen); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("stability command") {
  std::ostringstream out;
  cmd_stability(7.5, 22, 19, 35, 400, out);
  const std::string s = out.str();
  REQUIRE(s.rfind("status=tips phi_deg=", 0) == 0);
  const double theta = std::stod(s.substr(s.find("theta_deg=") + 10));
  CHECK(theta == Approx(2.792).epsilon(1e-3));
  std::ostringstream none;
  cmd_stability(7.5, 22, 19, 35, 0.01, none);
  CHECK(none.str() == "status=no_tip\n");
  CHECK(code_of([] {
          std::ostringstream o;
          cmd_stability(7.5, 22, 19, 0, 400, o);
        }) == ErrorCode::InvalidStabilityInput);
}

TEST_CASE("train, optimize and validate end to end") {
  testing::TempDir dir("cli_e2e");
  PipelineConfig c = config_from_json(json::parse(R"({
    "workers": 2,
    "surrogate": {"forest_trees": 10, "boosting_rounds": 30, "folds": 3},
    "optimizer": {"population_size": 24, "generations": 15},
    "query": {"targets": {"mass": {"max": 100}}}
  })"));
  c.output_dir = dir.path();
  std::ostringstream sink;
  cmd_generate(c, 512, sink);
  cmd_simulate(c, std::nullopt, false, sink);

  std::ostringstream trained;
  cmd_train(c, trained);
  const OutputPaths p{c.output_dir};
  CHECK(std::filesystem::exists(p.model()));
  const csv::Table report = csv::read(p.report());
  CHECK(report.rows.size() == kNumTargets);
  CHECK(trained.str().find("mass") != std::string::npos);

  std::ostringstream evaluated;
  cmd_evaluate(c, evaluated);
  CHECK(evaluated.str() == trained.str());

  std::ostringstream optimized;
  cmd_optimize(c, optimized);
  const csv::Table cf = csv::read(p.counterfactuals());
  const int role = cf.require("role");
  int baseline = 0, results = 0;
  for (const auto& r : cf.rows) {
    baseline += r[role] == "baseline";
    results += r[role] == "counterfactual";
  }
  CHECK(baseline == 1);
  CHECK(results >= 1);
  CHECK(results <= c.optimizer.sample_count);
  CHECK(optimized.str().rfind("evaluations=", 0) == 0);

  std::ostringstream validated;
  cmd_validate(c, validated);
  CHECK(validated.str().rfind("validated=" + std::to_string(results) + " ", 0) == 0);
}
