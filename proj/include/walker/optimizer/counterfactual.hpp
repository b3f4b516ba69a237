#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "walker/design.hpp"
#include "walker/fea.hpp"
#include "walker/feasibility.hpp"
#include "walker/optimizer/constraints.hpp"
#include "walker/optimizer/gower.hpp"
#include "walker/surrogate/ensemble.hpp"

namespace walker::optimizer {

/// Feature index 0..13 is the continuous parameter, 14 the front crossbeam
/// material and 15 the frame material.
inline constexpr int kFrontMaterialFeature = kNumContinuous;
inline constexpr int kFrameMaterialFeature = kNumContinuous + 1;

/// Accepts any design CSV column name. Throws Error(InvalidQuery) otherwise.
int feature_index(std::string_view column);
std::string_view feature_name(int feature);

struct CounterfactualQuery {
  DesignVector query_design;
  PerformanceTargets targets;
  std::array<bool, kNumDesignFeatures> frozen{};
  ParameterRanges exploration = ParameterRanges::defaults();
  bool allow_unreliable_targets = false;
};

/// Throws Error(InvalidQuery) when exploration ranges leave the dataset
/// ranges, a frozen value or bound is non-finite, or a bound sits on a
/// target the ensemble flags unreliable (unless allowed).
void validate_query(const CounterfactualQuery& q, const ParameterRanges& dataset_ranges,
                    const surrogate::SurrogateEnsemble& e);

struct GAConfig {
  int population_size = 100;
  int generations = 1000;
  double crossover_rate = 0.9;
  double mutation_rate = 1.0 / kNumDesignFeatures;  // per gene
  double sbx_eta = 15.0;
  double mutation_eta = 20.0;
  std::uint64_t seed = 42;
  int sample_count = 10;
  double diversity_weight = 0.3;
  std::array<double, 3> objective_weights{1.0, 1.0, 1.0};
  int neighbor_k = 5;
  double change_tolerance = 0.01;
  int workers = 1;

  /// Throws Error(InvalidConfig).
  void validate() const;
};

struct Candidate {
  DesignVector design;
  PerformanceRecord predicted;
  Objectives objectives{};
  ConstraintReport constraints;
  bool geometric_feasible = false;
};

struct EvolveResult {
  std::vector<Candidate> archive;             // constraint-satisfying, deduplicated, in discovery order
  std::vector<Candidate> initial_population;  // after evaluation
  std::int64_t evaluations = 0;               // surrogate queries
};

/// Constrained NSGA-II over the exploration box. Throws
/// Error(NoCounterfactualsFound) listing the bounds the best candidate misses
/// when no candidate satisfies every bound.
EvolveResult evolve(const CounterfactualQuery& q, const surrogate::SurrogateEnsemble& e,
                    std::span<const DesignVector> dataset, const ParameterRanges& dataset_ranges,
                    const GAConfig& cfg, const FeasibilityLimits& limits = {});

struct CounterfactualResult {
  DesignVector design;
  PerformanceRecord predicted;
  Objectives objectives{};
  std::array<bool, kNumTargets> predicted_satisfied{};

  // Filled by validate().
  std::optional<PerformanceRecord> simulated;
  std::array<bool, kNumTargets> simulated_satisfied{};
  TargetVector relative_error = TargetVector::Constant(std::numeric_limits<double>::quiet_NaN());
  bool flagged = false;
  std::string note;
};

/// Greedy pick from the archive's non-dominated set: each step adds the
/// candidate maximizing -weights . objectives + diversity_weight * (mean
/// Gower distance to the designs already chosen). With a positive diversity
/// weight, designs identical to a chosen one are skipped.
std::vector<CounterfactualResult> final_sample(std::span<const Candidate> archive, const GAConfig& cfg,
                                               const GowerMetric& metric);

/// Re-simulates every result and records simulated values, relative
/// prediction errors and simulated bound checks. Failed simulations and
/// simulated bound violations are flagged, never dropped.
void validate(std::span<CounterfactualResult> results, const PerformanceTargets& targets,
              const fea::SimulationOptions& options, double stability_force_lbf);

/// Baseline row first (role "baseline"), then one row per result.
void write_counterfactuals_csv(const std::filesystem::path& path, const DesignVector& baseline_design,
                               const PerformanceRecord& baseline_predicted,
                               const std::optional<PerformanceRecord>& baseline_simulated,
                               std::span<const CounterfactualResult> results);

}  // namespace walker::optimizer
