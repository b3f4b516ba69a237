#include "walker/optimizer/counterfactual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <thread>

#include "walker/csv.hpp"
#include "walker/error.hpp"
#include "walker/stability.hpp"

namespace walker::optimizer {

namespace {

using Key = std::array<double, kNumDesignFeatures>;

Key key_of(const DesignVector& d) {
  Key k{};
  for (int i = 0; i < kNumContinuous; ++i) k[static_cast<std::size_t>(i)] = d.values[i];
  k[kFrontMaterialFeature] = static_cast<double>(d.front_crossbeam_material);
  k[kFrameMaterialFeature] = static_cast<double>(d.frame_material);
  return k;
}

bool satisfied(const Candidate& c) { return c.geometric_feasible && c.constraints.ok(); }

// Feasibility-first dominance.
bool constrained_dominates(const Candidate& a, const Candidate& b) {
  const bool fa = satisfied(a), fb = satisfied(b);
  if (fa != fb) return fa;
  if (!fa) return a.constraints.violation < b.constraints.violation;
  return dominates(a.objectives, b.objectives);
}

std::vector<std::vector<int>> non_dominated_fronts(const std::vector<Candidate>& pop) {
  const int n = static_cast<int>(pop.size());
  std::vector<std::vector<int>> dominated(static_cast<std::size_t>(n));
  std::vector<int> count(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<int>> fronts(1);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (constrained_dominates(pop[i], pop[j])) {
        dominated[i].push_back(j);
        ++count[j];
      } else if (constrained_dominates(pop[j], pop[i])) {
        dominated[j].push_back(i);
        ++count[i];
      }
    }
  }
  for (int i = 0; i < n; ++i)
    if (count[i] == 0) fronts[0].push_back(i);
  for (std::size_t f = 0; !fronts[f].empty(); ++f) {
    std::vector<int> next;
    for (int i : fronts[f])
      for (int j : dominated[i])
        if (--count[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(next));
  }
  fronts.pop_back();
  return fronts;
}

void crowding(const std::vector<Candidate>& pop, const std::vector<int>& front, std::vector<double>& dist) {
  for (int i : front) dist[i] = 0.0;
  if (front.size() <= 2) {
    for (int i : front) dist[i] = std::numeric_limits<double>::infinity();
    return;
  }
  std::vector<int> order = front;
  for (std::size_t m = 0; m < 3; ++m) {
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return pop[a].objectives[m] < pop[b].objectives[m]; });
    const double lo = pop[order.front()].objectives[m];
    const double hi = pop[order.back()].objectives[m];
    dist[order.front()] = dist[order.back()] = std::numeric_limits<double>::infinity();
    if (hi <= lo) continue;
    for (std::size_t k = 1; k + 1 < order.size(); ++k)
      dist[order[k]] += (pop[order[k + 1]].objectives[m] - pop[order[k - 1]].objectives[m]) / (hi - lo);
  }
}

class Evolver {
 public:
  Evolver(const CounterfactualQuery& q, const surrogate::SurrogateEnsemble& e, std::span<const DesignVector> dataset,
          const ParameterRanges& dataset_ranges, const GAConfig& cfg, const FeasibilityLimits& limits)
      : q_(q), e_(e), cfg_(cfg), limits_(limits), metric_(dataset_ranges),
        proximity_(dataset, metric_, cfg.neighbor_k), rng_(cfg.seed), lo_(q.exploration.lower),
        hi_(q.exploration.upper()) {
    for (int i = 0; i < kNumTargets; ++i) normalizers_[i] = e.target_scale(static_cast<Target>(i));
  }

  EvolveResult run(std::span<const DesignVector> dataset) {
    EvolveResult out;
    std::vector<Candidate> pop = initial_population(dataset);
    evaluate(pop);
    out.initial_population = pop;
    record(pop, out);
    for (int g = 0; g < cfg_.generations; ++g) {
      std::vector<int> rank;
      std::vector<double> crowd;
      rank_population(pop, rank, crowd);
      std::vector<Candidate> offspring = make_offspring(pop, rank, crowd);
      evaluate(offspring);
      record(offspring, out);
      pop.insert(pop.end(), offspring.begin(), offspring.end());
      pop = survive(std::move(pop));
    }
    out.evaluations = evaluations_;
    if (out.archive.empty()) {
      const Candidate* best = nullptr;
      for (const Candidate& c : pop)
        if (c.geometric_feasible && (!best || c.constraints.violation < best->constraints.violation)) best = &c;
      std::string detail = best ? describe_violations(best->predicted, q_.targets)
                                : std::string("no geometrically feasible candidate was produced");
      throw Error(ErrorCode::NoCounterfactualsFound,
                  "no candidate satisfied every performance bound; closest candidate misses: " + detail);
    }
    return out;
  }

 private:
  bool frozen(int f) const { return q_.frozen[static_cast<std::size_t>(f)]; }

  // Clamp into the exploration box, restore frozen genes, repair categories.
  void repair(DesignVector& d) const {
    for (int k = 0; k < kNumContinuous; ++k)
      d.values[k] = frozen(k) ? q_.query_design.values[k] : std::clamp(d.values[k], lo_[k], hi_[k]);
    auto fix = [&](Material& m, Material query_m, const std::vector<Material>& allowed, bool is_frozen) {
      if (is_frozen) {
        m = query_m;
      } else if (std::find(allowed.begin(), allowed.end(), m) == allowed.end()) {
        m = std::find(allowed.begin(), allowed.end(), query_m) != allowed.end() ? query_m : allowed.front();
      }
    };
    fix(d.front_crossbeam_material, q_.query_design.front_crossbeam_material,
        q_.exploration.front_crossbeam_materials, frozen(kFrontMaterialFeature));
    fix(d.frame_material, q_.query_design.frame_material, q_.exploration.frame_materials,
        frozen(kFrameMaterialFeature));
  }

  Material random_material(const std::vector<Material>& allowed) {
    std::uniform_int_distribution<std::size_t> pick(0, allowed.size() - 1);
    return allowed[pick(rng_)];
  }

  std::vector<Candidate> initial_population(std::span<const DesignVector> dataset) {
    std::vector<Candidate> pop;
    auto add = [&](DesignVector d) {
      repair(d);
      Candidate c;
      c.design = d;
      pop.push_back(std::move(c));
    };
    add(q_.query_design);

    std::vector<std::pair<double, std::size_t>> near;
    near.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) near.emplace_back(metric_(dataset[i], q_.query_design), i);
    const std::size_t n_near = std::min(dataset.size(), static_cast<std::size_t>(cfg_.population_size / 4));
    std::partial_sort(near.begin(), near.begin() + static_cast<std::ptrdiff_t>(n_near), near.end());
    for (std::size_t i = 0; i < n_near; ++i) add(dataset[near[i].second]);

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<int>(pop.size()) < cfg_.population_size) {
      DesignVector d = q_.query_design;
      for (int k = 0; k < kNumContinuous; ++k) d.values[k] = lo_[k] + unit(rng_) * (hi_[k] - lo_[k]);
      d.front_crossbeam_material = random_material(q_.exploration.front_crossbeam_materials);
      d.frame_material = random_material(q_.exploration.frame_materials);
      add(d);
    }
    return pop;
  }

  void evaluate_one(Candidate& c) const {
    c.geometric_feasible = check_feasibility(c.design, limits_).valid;
    c.objectives = counterfactual_objectives(c.design, q_.query_design, metric_, proximity_, cfg_.change_tolerance);
    if (!c.geometric_feasible) {
      c.constraints = {};
      c.constraints.satisfied.fill(false);
      c.constraints.violation = 1e12;
      return;
    }
    c.predicted = e_.predict(c.design);
    c.constraints = constraint_check(c.predicted, q_.targets, normalizers_);
  }

  void evaluate(std::vector<Candidate>& batch) {
    const int workers = std::max(1, std::min<int>(cfg_.workers, static_cast<int>(batch.size())));
    if (workers == 1) {
      for (Candidate& c : batch) evaluate_one(c);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t i = static_cast<std::size_t>(w); i < batch.size(); i += static_cast<std::size_t>(workers))
            evaluate_one(batch[i]);
        });
      for (std::thread& t : pool) t.join();
    }
    for (const Candidate& c : batch) evaluations_ += c.geometric_feasible;
  }

  void record(const std::vector<Candidate>& batch, EvolveResult& out) {
    for (const Candidate& c : batch)
      if (satisfied(c) && seen_.insert(key_of(c.design)).second) out.archive.push_back(c);
  }

  void rank_population(const std::vector<Candidate>& pop, std::vector<int>& rank, std::vector<double>& crowd) const {
    rank.assign(pop.size(), 0);
    crowd.assign(pop.size(), 0.0);
    const auto fronts = non_dominated_fronts(pop);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
      for (int i : fronts[f]) rank[i] = static_cast<int>(f);
      crowding(pop, fronts[f], crowd);
    }
  }

  std::vector<Candidate> survive(std::vector<Candidate> pool) const {
    const auto fronts = non_dominated_fronts(pool);
    std::vector<double> crowd(pool.size(), 0.0);
    std::vector<Candidate> next;
    next.reserve(static_cast<std::size_t>(cfg_.population_size));
    for (const auto& front : fronts) {
      const std::size_t room = static_cast<std::size_t>(cfg_.population_size) - next.size();
      if (room == 0) break;
      if (front.size() <= room) {
        for (int i : front) next.push_back(pool[i]);
        continue;
      }
      crowding(pool, front, crowd);
      std::vector<int> order = front;
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (!satisfied(pool[a]) && !satisfied(pool[b]))
          return pool[a].constraints.violation < pool[b].constraints.violation;
        return crowd[a] > crowd[b];
      });
      for (std::size_t k = 0; k < room; ++k) next.push_back(pool[order[k]]);
    }
    return next;
  }

  int tournament(const std::vector<int>& rank, const std::vector<double>& crowd) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(rank.size()) - 1);
    const int a = pick(rng_), b = pick(rng_);
    if (rank[a] != rank[b]) return rank[a] < rank[b] ? a : b;
    if (crowd[a] != crowd[b]) return crowd[a] > crowd[b] ? a : b;
    return std::min(a, b);
  }

  void sbx(double& x1, double& x2, double lo, double hi) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (unit(rng_) > 0.5 || std::abs(x1 - x2) <= 1e-14 || hi <= lo) return;
    const double y1 = std::min(x1, x2), y2 = std::max(x1, x2);
    const double eta = cfg_.sbx_eta;
    const double u = unit(rng_);
    auto spread = [&](double beta) {
      const double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
      return u <= 1.0 / alpha ? std::pow(u * alpha, 1.0 / (eta + 1.0))
                              : std::pow(1.0 / (2.0 - u * alpha), 1.0 / (eta + 1.0));
    };
    double c1 = 0.5 * ((y1 + y2) - spread(1.0 + 2.0 * (y1 - lo) / (y2 - y1)) * (y2 - y1));
    double c2 = 0.5 * ((y1 + y2) + spread(1.0 + 2.0 * (hi - y2) / (y2 - y1)) * (y2 - y1));
    c1 = std::clamp(c1, lo, hi);
    c2 = std::clamp(c2, lo, hi);
    if (unit(rng_) < 0.5) std::swap(c1, c2);
    x1 = c1;
    x2 = c2;
  }

  void polynomial_mutation(double& x, double lo, double hi) {
    if (hi <= lo) return;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double eta = cfg_.mutation_eta;
    const double d1 = (x - lo) / (hi - lo), d2 = (hi - x) / (hi - lo);
    const double u = unit(rng_);
    const double power = 1.0 / (eta + 1.0);
    double dq;
    if (u < 0.5) {
      const double v = 2.0 * u + (1.0 - 2.0 * u) * std::pow(1.0 - d1, eta + 1.0);
      dq = std::pow(v, power) - 1.0;
    } else {
      const double v = 2.0 * (1.0 - u) + 2.0 * (u - 0.5) * std::pow(1.0 - d2, eta + 1.0);
      dq = 1.0 - std::pow(v, power);
    }
    x = std::clamp(x + dq * (hi - lo), lo, hi);
  }

  void mutate(DesignVector& d) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < kNumContinuous; ++k)
      if (!frozen(k) && unit(rng_) < cfg_.mutation_rate) polynomial_mutation(d.values[k], lo_[k], hi_[k]);
    if (!frozen(kFrontMaterialFeature) && unit(rng_) < cfg_.mutation_rate)
      d.front_crossbeam_material = random_material(q_.exploration.front_crossbeam_materials);
    if (!frozen(kFrameMaterialFeature) && unit(rng_) < cfg_.mutation_rate)
      d.frame_material = random_material(q_.exploration.frame_materials);
  }

  std::vector<Candidate> make_offspring(const std::vector<Candidate>& pop, const std::vector<int>& rank,
                                        const std::vector<double>& crowd) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Candidate> out;
    out.reserve(pop.size());
    while (out.size() < pop.size()) {
      DesignVector a = pop[tournament(rank, crowd)].design;
      DesignVector b = pop[tournament(rank, crowd)].design;
      if (unit(rng_) < cfg_.crossover_rate) {
        for (int k = 0; k < kNumContinuous; ++k)
          if (!frozen(k)) sbx(a.values[k], b.values[k], lo_[k], hi_[k]);
        if (!frozen(kFrontMaterialFeature) && unit(rng_) < 0.5)
          std::swap(a.front_crossbeam_material, b.front_crossbeam_material);
        if (!frozen(kFrameMaterialFeature) && unit(rng_) < 0.5) std::swap(a.frame_material, b.frame_material);
      }
      for (DesignVector* child : {&a, &b}) {
        if (out.size() == pop.size()) break;
        mutate(*child);
        repair(*child);
        Candidate c;
        c.design = *child;
        out.push_back(std::move(c));
      }
    }
    return out;
  }

  const CounterfactualQuery& q_;
  const surrogate::SurrogateEnsemble& e_;
  const GAConfig& cfg_;
  FeasibilityLimits limits_;
  GowerMetric metric_;
  DatasetProximity proximity_;
  std::mt19937_64 rng_;
  ContinuousVector lo_;
  ContinuousVector hi_;
  TargetVector normalizers_;
  std::set<Key> seen_;
  std::int64_t evaluations_ = 0;
};

std::string bound_text(double v) { return csv::format(v); }

}  // namespace

int feature_index(std::string_view column) {
  for (int k = 0; k < kNumContinuous; ++k)
    if (column_name(k) == column) return k;
  if (column == kFrontCrossbeamMaterialColumn) return kFrontMaterialFeature;
  if (column == kFrameMaterialColumn) return kFrameMaterialFeature;
  throw Error(ErrorCode::InvalidQuery, "unknown design parameter '" + std::string(column) + "'");
}

std::string_view feature_name(int feature) {
  if (feature == kFrontMaterialFeature) return kFrontCrossbeamMaterialColumn;
  if (feature == kFrameMaterialFeature) return kFrameMaterialColumn;
  return column_name(feature);
}

void validate_query(const CounterfactualQuery& q, const ParameterRanges& dataset_ranges,
                    const surrogate::SurrogateEnsemble& e) {
  if (!q.query_design.values.allFinite()) throw Error(ErrorCode::InvalidQuery, "query design has non-finite values");
  try {
    q.exploration.validate();
  } catch (const Error& err) {
    throw Error(ErrorCode::InvalidQuery, std::string("exploration ranges: ") + err.what());
  }
  const ContinuousVector up = q.exploration.upper(), dup = dataset_ranges.upper();
  for (int k = 0; k < kNumContinuous; ++k) {
    if (q.exploration.lower[k] < dataset_ranges.lower[k] - 1e-12 || up[k] > dup[k] + 1e-12)
      throw Error(ErrorCode::InvalidQuery, "exploration range for " + std::string(column_name(k)) + " [" +
                                               bound_text(q.exploration.lower[k]) + ", " + bound_text(up[k]) +
                                               "] leaves the dataset range [" +
                                               bound_text(dataset_ranges.lower[k]) + ", " + bound_text(dup[k]) + "]");
  }
  if (!q.exploration.is_subset_of(dataset_ranges))
    throw Error(ErrorCode::InvalidQuery, "exploration materials must be a subset of the dataset materials");
  for (int i = 0; i < kNumTargets; ++i) {
    const auto t = static_cast<Target>(i);
    const TargetBound& b = q.targets[t];
    if (!b.constrained()) continue;
    if ((b.lower && std::isnan(*b.lower)) || (b.upper && std::isnan(*b.upper)))
      throw Error(ErrorCode::InvalidQuery, "bound on " + std::string(short_name(t)) + " is NaN");
    if (b.lower && b.upper && *b.lower > *b.upper)
      throw Error(ErrorCode::InvalidQuery, "bound on " + std::string(short_name(t)) + " has lower > upper");
    if (!q.allow_unreliable_targets && !e.reliable(t)) {
      throw Error(ErrorCode::InvalidQuery, "target " + std::string(short_name(t)) +
                                               " is unreliable (held-out R^2 " +
                                               bound_text(e.test_r2(t).value_or(0.0)) +
                                               "); remove the bound or allow unreliable targets");
    }
  }
}

void GAConfig::validate() const {
  if (population_size < 10) throw Error(ErrorCode::InvalidConfig, "population_size must be at least 10");
  if (generations < 1) throw Error(ErrorCode::InvalidConfig, "generations must be at least 1");
  if (sample_count < 1) throw Error(ErrorCode::InvalidConfig, "sample_count must be at least 1");
  if (crossover_rate < 0.0 || crossover_rate > 1.0 || mutation_rate < 0.0 || mutation_rate > 1.0)
    throw Error(ErrorCode::InvalidConfig, "crossover and mutation rates must lie in [0, 1]");
  if (!(sbx_eta >= 0.0) || !(mutation_eta >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "distribution indices must be non-negative");
  if (diversity_weight < 0.0) throw Error(ErrorCode::InvalidConfig, "diversity_weight must be non-negative");
  if (neighbor_k < 1) throw Error(ErrorCode::InvalidConfig, "neighbor_k must be at least 1");
  if (!(change_tolerance >= 0.0)) throw Error(ErrorCode::InvalidConfig, "change_tolerance must be non-negative");
}

EvolveResult evolve(const CounterfactualQuery& q, const surrogate::SurrogateEnsemble& e,
                    std::span<const DesignVector> dataset, const ParameterRanges& dataset_ranges,
                    const GAConfig& cfg, const FeasibilityLimits& limits) {
  cfg.validate();
  Evolver ev(q, e, dataset, dataset_ranges, cfg, limits);
  return ev.run(dataset);
}

std::vector<CounterfactualResult> final_sample(std::span<const Candidate> archive, const GAConfig& cfg,
                                               const GowerMetric& metric) {
  std::vector<int> front;
  for (std::size_t i = 0; i < archive.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < archive.size() && !dominated; ++j)
      dominated = j != i && dominates(archive[j].objectives, archive[i].objectives);
    if (!dominated) front.push_back(static_cast<int>(i));
  }

  auto weighted = [&](const Candidate& c) {
    double s = 0.0;
    for (std::size_t m = 0; m < 3; ++m) s += cfg.objective_weights[m] * c.objectives[m];
    return -s;
  };

  std::vector<int> chosen;
  std::vector<bool> used(front.size(), false);
  while (static_cast<int>(chosen.size()) < cfg.sample_count) {
    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < front.size(); ++f) {
      if (used[f]) continue;
      const Candidate& c = archive[static_cast<std::size_t>(front[f])];
      double diversity = 0.0;
      bool duplicate = false;
      for (int s : chosen) {
        const double g = metric(c.design, archive[static_cast<std::size_t>(s)].design);
        duplicate = duplicate || g == 0.0;
        diversity += g;
      }
      if (cfg.diversity_weight > 0.0 && duplicate) continue;
      if (!chosen.empty()) diversity /= static_cast<double>(chosen.size());
      const double score = weighted(c) + cfg.diversity_weight * diversity;
      if (score > best_score) {
        best_score = score;
        best = static_cast<int>(f);
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    chosen.push_back(front[static_cast<std::size_t>(best)]);
  }

  std::vector<CounterfactualResult> out;
  out.reserve(chosen.size());
  for (int i : chosen) {
    const Candidate& c = archive[static_cast<std::size_t>(i)];
    CounterfactualResult r;
    r.design = c.design;
    r.predicted = c.predicted;
    r.objectives = c.objectives;
    r.predicted_satisfied = c.constraints.satisfied;
    out.push_back(std::move(r));
  }
  return out;
}

void validate(std::span<CounterfactualResult> results, const PerformanceTargets& targets,
              const fea::SimulationOptions& options, double stability_force_lbf) {
  for (CounterfactualResult& r : results) {
    try {
      PerformanceRecord sim = fea::simulate(r.design, options);
      annotate_dataset(std::span<PerformanceRecord>(&sim, 1), std::span<const DesignVector>(&r.design, 1),
                       stability_force_lbf);
      r.simulated = sim;
      for (int i = 0; i < kNumTargets; ++i) {
        const auto t = static_cast<Target>(i);
        const double s = t == Target::Theta ? theta_for_learning(r.design, sim) : sim.value(t);
        const double p = t == Target::Theta ? theta_for_learning(r.design, r.predicted) : r.predicted.value(t);
        r.relative_error[i] = s != 0.0 ? std::abs(p - s) / std::abs(s)
                                       : (p == s ? 0.0 : std::numeric_limits<double>::infinity());
      }
      const ConstraintReport rep = constraint_check(sim, targets);
      r.simulated_satisfied = rep.satisfied;
      r.flagged = !rep.ok();
      r.note = r.flagged ? "simulation misses: " + describe_violations(sim, targets) : std::string();
    } catch (const Error& err) {
      r.simulated.reset();
      r.simulated_satisfied.fill(false);
      r.flagged = true;
      r.note = err.what();
    }
  }
}

void write_counterfactuals_csv(const std::filesystem::path& path, const DesignVector& baseline_design,
                               const PerformanceRecord& baseline_predicted,
                               const std::optional<PerformanceRecord>& baseline_simulated,
                               std::span<const CounterfactualResult> results) {
  csv::Table table;
  table.header = {"role", "rank"};
  for (int f = 0; f < kNumDesignFeatures; ++f) table.header.emplace_back(feature_name(f));
  for (int i = 0; i < kNumTargets; ++i) table.header.push_back("pred_" + std::string(column_name(static_cast<Target>(i))));
  for (int i = 0; i < kNumTargets; ++i) table.header.push_back("sim_" + std::string(column_name(static_cast<Target>(i))));
  table.header.emplace_back("sim_tip_status");
  for (int i = 0; i < kNumTargets; ++i) table.header.push_back("relerr_" + std::string(short_name(static_cast<Target>(i))));
  for (const char* c : {"gower_to_query", "changed_feature_ratio", "avg_gower_to_dataset", "predicted_ok",
                        "simulated_ok", "flagged", "note"})
    table.header.emplace_back(c);

  auto design_cells = [](std::vector<std::string>& row, const DesignVector& d) {
    for (int k = 0; k < kNumContinuous; ++k) row.push_back(csv::format(d.values[k]));
    row.emplace_back(to_string(d.front_crossbeam_material));
    row.emplace_back(to_string(d.frame_material));
  };
  auto perf_cells = [](std::vector<std::string>& row, const std::optional<PerformanceRecord>& p) {
    for (int i = 0; i < kNumTargets; ++i) {
      const auto t = static_cast<Target>(i);
      if (!p || (t == Target::Theta && p->tip_status != TipStatus::Tips)) row.emplace_back();
      else row.push_back(csv::format(p->value(t)));
    }
  };
  auto all_true = [](const std::array<bool, kNumTargets>& a) {
    return std::all_of(a.begin(), a.end(), [](bool b) { return b; });
  };

  std::vector<std::string> base{"baseline", "0"};
  design_cells(base, baseline_design);
  perf_cells(base, baseline_predicted);
  perf_cells(base, baseline_simulated);
  base.emplace_back(baseline_simulated ? std::string(to_string(baseline_simulated->tip_status)) : std::string());
  for (int i = 0; i < kNumTargets; ++i) base.emplace_back();
  for (int i = 0; i < 7; ++i) base.emplace_back();
  table.rows.push_back(std::move(base));

  for (std::size_t n = 0; n < results.size(); ++n) {
    const CounterfactualResult& r = results[n];
    std::vector<std::string> row{"counterfactual", std::to_string(n + 1)};
    design_cells(row, r.design);
    perf_cells(row, r.predicted);
    perf_cells(row, r.simulated);
    row.emplace_back(r.simulated ? std::string(to_string(r.simulated->tip_status)) : std::string());
    for (int i = 0; i < kNumTargets; ++i)
      row.push_back(std::isnan(r.relative_error[i]) ? std::string() : csv::format(r.relative_error[i]));
    for (double o : r.objectives) row.push_back(csv::format(o));
    row.emplace_back(all_true(r.predicted_satisfied) ? "true" : "false");
    row.emplace_back(r.simulated ? (all_true(r.simulated_satisfied) ? "true" : "false") : "");
    row.emplace_back(r.flagged ? "true" : "false");
    row.push_back(r.note);
    table.rows.push_back(std::move(row));
  }
  csv::write(path, table);
}

}  // namespace walker::optimizer
