#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "walker/design.hpp"
#include "walker/fea.hpp"
#include "walker/feasibility.hpp"
#include "walker/optimizer/counterfactual.hpp"
#include "walker/surrogate/ensemble.hpp"

namespace walker::cli {

struct QuerySpec {
  DesignVector design = original_design();
  ParameterRanges exploration;  // filled from the dataset ranges, then overridden
  std::array<bool, kNumDesignFeatures> frozen{};
  optimizer::TargetSpecs targets{};
  bool allow_unreliable_targets = false;
};

struct PipelineConfig {
  std::filesystem::path output_dir = "walker_forge_out";
  std::uint64_t seed = 1;
  int workers = 0;  // 0 = hardware concurrency
  int design_count = 8192;
  ParameterRanges ranges = ParameterRanges::defaults();
  FeasibilityLimits limits;
  fea::SimulationOptions simulation;
  double stability_force_lbf = 400.0;
  surrogate::SurrogateConfig surrogate;
  optimizer::GAConfig optimizer;
  QuerySpec query;
  std::vector<Target> plot_targets{Target::Mass, Target::HandleDx, Target::HandleDy, Target::HandleDz,
                                   Target::MinSafetyFactor};

  int resolved_workers() const;
};

/// Generic scenario: 32-38 in height, 19 +- 0.5 in handles,
/// mass under 6 lb, safety factor, leg deflection and theta no worse than
/// the original design's predictions.
PipelineConfig default_config();

/// Applies a JSON document on top of the defaults. Unknown keys and bad
/// values raise Error(InvalidConfig) naming the offending field.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::filesystem::path& path);

nlohmann::json config_to_json(const PipelineConfig& c);

}  // namespace walker::cli
