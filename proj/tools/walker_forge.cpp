#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "walker/error.hpp"

using namespace walker;
using namespace walker::cli;

int main(int argc, char** argv) {
  CLI::App app{"walker_forge: walker frame dataset generation, surrogate training and counterfactual design search"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool force = false;
  app.add_option("--config", config_path, "JSON pipeline config (defaults apply to omitted fields)");
  app.add_option("--seed", seed, "Seed for sampling, training and optimization");
  app.add_option("--workers", workers, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_flag("--force", force, "Recompute results that already exist");

  auto* generate = app.add_subcommand("generate", "Sample designs and drop infeasible ones -> designs.csv");
  std::optional<int> count;
  generate->add_option("-n,--count", count, "Designs to request")->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "Run the beam model on every design -> dataset.csv");
  std::optional<std::string> designs_path;
  simulate->add_option("--designs", designs_path, "Designs file (default: <output>/designs.csv)");

  auto* train = app.add_subcommand("train", "Fit the surrogate ensemble -> model.bin, r2_report.csv");
  auto* evaluate = app.add_subcommand("evaluate", "Score a saved model on its held-out split -> r2_report.csv");
  auto* optimize = app.add_subcommand("optimize", "Counterfactual search and validation -> counterfactuals.csv");
  auto* validate = app.add_subcommand("validate", "Re-simulate the designs in counterfactuals.csv");

  auto* plotdata = app.add_subcommand("plotdata", "Scatter, density and correlation tables for plotting");
  std::vector<std::string> plot_targets;
  plotdata->add_option("targets", plot_targets, "Performance values (default: config plot_targets)");

  auto* stability = app.add_subcommand("stability", "Tipping angle for one walker (lb, in, lbf)");
  double mass = 0, leg_width = 0, handle_distance = 0, height = 0, force_lbf = 400.0;
  stability->add_option("--mass", mass, "Frame mass, lb")->required();
  stability->add_option("--leg-width", leg_width, "Lateral distance between leg tips (L1), in")->required();
  stability->add_option("--handle-distance", handle_distance, "Lateral distance between handles (L2), in")->required();
  stability->add_option("--height", height, "Overall height (H), in")->required();
  stability->add_option("--force", force_lbf, "Outward handle force (F), lbf");

  auto* pipeline = app.add_subcommand("pipeline", "generate, simulate, train, optimize and plotdata in sequence");
  auto* show_config = app.add_subcommand("config", "Print the effective config as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (seed) {
      cfg.seed = *seed;
      cfg.surrogate.seed = *seed;
      cfg.optimizer.seed = *seed;
    }
    if (workers) cfg.workers = *workers;
    if (const char* dir = std::getenv("WALKER_FORGE_DIR"); dir && *dir) cfg.output_dir = dir;

    if (show_config->parsed()) {
      std::cout << config_to_json(cfg).dump(2) << "\n";
      return 0;
    }
    if (stability->parsed()) {
      cmd_stability(mass, leg_width, handle_distance, height, force_lbf, std::cout);
      return 0;
    }

    std::filesystem::create_directories(cfg.output_dir);
    DirectoryLock lock(OutputPaths{cfg.output_dir}.lock());
    std::optional<std::filesystem::path> designs;
    if (designs_path) designs = *designs_path;

    if (generate->parsed()) cmd_generate(cfg, count, std::cout);
    if (simulate->parsed()) cmd_simulate(cfg, designs, force, std::cout);
    if (train->parsed()) cmd_train(cfg, std::cout);
    if (evaluate->parsed()) cmd_evaluate(cfg, std::cout);
    if (optimize->parsed()) cmd_optimize(cfg, std::cout);
    if (validate->parsed()) cmd_validate(cfg, std::cout);
    if (plotdata->parsed()) cmd_plotdata(cfg, plot_targets, std::cout);
    if (pipeline->parsed()) {
      cmd_generate(cfg, std::nullopt, std::cout);
      cmd_simulate(cfg, std::nullopt, force, std::cout);
      cmd_train(cfg, std::cout);
      cmd_optimize(cfg, std::cout);
      cmd_plotdata(cfg, {}, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
