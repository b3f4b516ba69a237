#include "config.hpp"

#include <fstream>
#include <set>
#include <thread>

#include "walker/error.hpp"

namespace walker::cli {

using nlohmann::json;
using fea::Support;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, field + ": " + why);
}

void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(where.empty() ? k : where + "." + k, "unknown field");
}

template <typename T>
void read(const json& j, const char* key, const std::string& where, T& out) {
  if (!j.contains(key)) return;
  const std::string field = where.empty() ? key : where + "." + key;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    fail(field, "wrong type");
  }
}

void read_positive(const json& j, const char* key, const std::string& where, double& out) {
  read(j, key, where, out);
  if (!(out > 0.0)) fail(where + "." + key, "must be positive");
}

std::vector<Material> read_materials(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a non-empty list of materials");
  std::vector<Material> out;
  for (const json& m : j) {
    if (!m.is_string()) fail(field, "materials must be strings");
    try {
      out.push_back(material_from_string(m.get<std::string>()));
    } catch (const Error& e) {
      fail(field, e.what());
    }
  }
  return out;
}

json materials_json(const std::vector<Material>& ms) {
  json a = json::array();
  for (Material m : ms) a.push_back(std::string(to_string(m)));
  return a;
}

// Object of column -> [lo, hi] plus optional material lists, applied onto `r`.
void read_ranges(const json& j, const std::string& where, ParameterRanges& r) {
  if (!j.is_object()) fail(where, "expected an object");
  for (const auto& [k, v] : j.items()) {
    const std::string field = where + "." + k;
    if (k == "front_crossbeam_materials") {
      r.front_crossbeam_materials = read_materials(v, field);
      continue;
    }
    if (k == "frame_materials") {
      r.frame_materials = read_materials(v, field);
      continue;
    }
    int idx = -1;
    for (int p = 0; p < kNumContinuous; ++p)
      if (column_name(p) == k) idx = p;
    if (idx < 0) fail(field, "unknown parameter");
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      fail(field, "expected [lower, upper]");
    const double lo = v[0].get<double>(), hi = v[1].get<double>();
    if (!(hi >= lo)) fail(field, "upper bound below lower bound");
    r.set(static_cast<Param>(idx), lo, hi);
  }
  try {
    r.validate();
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

json ranges_json(const ParameterRanges& r) {
  json j;
  const ContinuousVector up = r.upper();
  for (int p = 0; p < kNumContinuous; ++p) j[std::string(column_name(p))] = {r.lower[p], up[p]};
  j["front_crossbeam_materials"] = materials_json(r.front_crossbeam_materials);
  j["frame_materials"] = materials_json(r.frame_materials);
  return j;
}

Support support_from(const std::string& s, const std::string& field) {
  if (s == "free") return Support::Free;
  if (s == "pinned") return Support::Pinned;
  if (s == "roller") return Support::Roller;
  if (s == "clamped") return Support::Clamped;
  fail(field, "expected free, pinned, roller or clamped");
}

std::string support_name(Support s) {
  switch (s) {
    case Support::Free: return "free";
    case Support::Pinned: return "pinned";
    case Support::Roller: return "roller";
    case Support::Clamped: return "clamped";
  }
  return "free";
}

DesignVector read_design(const json& j, const std::string& where) {
  if (j.is_string()) {
    if (j.get<std::string>() != "original") fail(where, "the only named design is \"original\"");
    return original_design();
  }
  if (!j.is_object()) fail(where, "expected \"original\" or an object of parameter values");
  DesignVector d = original_design();
  for (const auto& [k, v] : j.items()) {
    const std::string field = where + "." + k;
    int idx;
    try {
      idx = optimizer::feature_index(k);
    } catch (const Error&) {
      fail(field, "unknown parameter");
    }
    if (idx < kNumContinuous) {
      if (!v.is_number()) fail(field, "expected a number");
      d.values[idx] = v.get<double>();
    } else {
      if (!v.is_string()) fail(field, "expected a material name");
      try {
        const Material m = material_from_string(v.get<std::string>());
        (idx == optimizer::kFrontMaterialFeature ? d.front_crossbeam_material : d.frame_material) = m;
      } catch (const Error& e) {
        fail(field, e.what());
      }
    }
  }
  return d;
}

json design_json(const DesignVector& d) {
  json j;
  for (int p = 0; p < kNumContinuous; ++p) j[std::string(column_name(p))] = d.values[p];
  j[std::string(kFrontCrossbeamMaterialColumn)] = std::string(to_string(d.front_crossbeam_material));
  j[std::string(kFrameMaterialColumn)] = std::string(to_string(d.frame_material));
  return j;
}

std::optional<optimizer::BoundValue> read_bound_value(const json& v, const std::string& field) {
  if (v.is_null()) return std::nullopt;
  if (v.is_string()) {
    if (v.get<std::string>() != "baseline") fail(field, "expected a number or \"baseline\"");
    return optimizer::BoundValue{true, 0.0};
  }
  if (!v.is_number()) fail(field, "expected a number or \"baseline\"");
  return optimizer::BoundValue{false, v.get<double>()};
}

json bound_value_json(const std::optional<optimizer::BoundValue>& b) {
  if (!b) return nullptr;
  if (b->from_baseline) return "baseline";
  return b->value;
}

void read_query(const json& j, PipelineConfig& c) {
  const std::string where = "query";
  check_keys(j, where, {"design", "exploration", "frozen", "targets", "allow_unreliable_targets"});
  if (j.contains("design")) c.query.design = read_design(j.at("design"), where + ".design");
  if (j.contains("exploration")) read_ranges(j.at("exploration"), where + ".exploration", c.query.exploration);
  if (j.contains("frozen")) {
    const json& f = j.at("frozen");
    if (!f.is_array()) fail(where + ".frozen", "expected a list of parameter names");
    c.query.frozen.fill(false);
    for (const json& name : f) {
      if (!name.is_string()) fail(where + ".frozen", "expected parameter names");
      try {
        c.query.frozen[static_cast<std::size_t>(optimizer::feature_index(name.get<std::string>()))] = true;
      } catch (const Error&) {
        fail(where + ".frozen", "unknown parameter '" + name.get<std::string>() + "'");
      }
    }
  }
  if (j.contains("targets")) {
    const json& t = j.at("targets");
    if (!t.is_object()) fail(where + ".targets", "expected an object");
    c.query.targets = {};
    for (const auto& [k, v] : t.items()) {
      const std::string field = where + ".targets." + k;
      Target target;
      try {
        target = target_from_string(k);
      } catch (const Error&) {
        fail(field, "unknown performance value");
      }
      check_keys(v, field, {"min", "max"});
      auto& spec = c.query.targets[static_cast<std::size_t>(target)];
      if (v.contains("min")) spec.lower = read_bound_value(v.at("min"), field + ".min");
      if (v.contains("max")) spec.upper = read_bound_value(v.at("max"), field + ".max");
    }
  }
  read(j, "allow_unreliable_targets", where, c.query.allow_unreliable_targets);
}

}  // namespace

int PipelineConfig::resolved_workers() const {
  if (workers > 0) return workers;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

PipelineConfig default_config() {
  PipelineConfig c;
  c.surrogate.seed = c.seed;
  c.optimizer.seed = c.seed;
  c.query.exploration = c.ranges;
  c.query.exploration.set(Param::OverallHeight, 32.0, 38.0);
  c.query.exploration.set(Param::HandleDistance, 18.5, 19.5);
  using optimizer::BoundValue;
  auto& t = c.query.targets;
  t[static_cast<std::size_t>(Target::Mass)].upper = BoundValue{false, 6.0};
  t[static_cast<std::size_t>(Target::MinSafetyFactor)].lower = BoundValue{true, 0.0};
  t[static_cast<std::size_t>(Target::LegDisplacement)].upper = BoundValue{true, 0.0};
  t[static_cast<std::size_t>(Target::Theta)].lower = BoundValue{true, 0.0};
  return c;
}

namespace {

PipelineConfig apply_json(const json& j) {
  PipelineConfig c = default_config();
  check_keys(j, "", {"output_dir", "seed", "workers", "design_count", "ranges", "feasibility", "simulation",
                     "stability_force_lbf", "surrogate", "optimizer", "query", "plot_targets"});
  if (j.contains("output_dir")) {
    std::string dir;
    read(j, "output_dir", "", dir);
    c.output_dir = dir;
  }
  read(j, "seed", "", c.seed);
  c.surrogate.seed = c.seed;
  c.optimizer.seed = c.seed;
  read(j, "workers", "", c.workers);
  if (c.workers < 0) fail("workers", "must be non-negative");
  read(j, "design_count", "", c.design_count);
  if (c.design_count < 1) fail("design_count", "must be at least 1");

  const bool ranges_given = j.contains("ranges");
  if (ranges_given) read_ranges(j.at("ranges"), "ranges", c.ranges);

  if (j.contains("feasibility")) {
    const json& f = j.at("feasibility");
    check_keys(f, "feasibility", {"min_outer_diameter_in", "max_outer_diameter_in", "min_handle_distance_in",
                                  "max_handle_distance_in"});
    read_positive(f, "min_outer_diameter_in", "feasibility", c.limits.min_outer_diameter);
    read_positive(f, "max_outer_diameter_in", "feasibility", c.limits.max_outer_diameter);
    read_positive(f, "min_handle_distance_in", "feasibility", c.limits.min_handle_distance);
    read_positive(f, "max_handle_distance_in", "feasibility", c.limits.max_handle_distance);
  }
  c.simulation.limits = c.limits;

  if (j.contains("simulation")) {
    const json& s = j.at("simulation");
    const std::string w = "simulation";
    check_keys(s, w, {"handle_down_force_lbf", "handle_lateral_force_lbf", "rear_tip_support", "front_tip_support",
                      "max_element_length_in", "safety_factor_cap"});
    read(s, "handle_down_force_lbf", w, c.simulation.loads.handle_down_force_lbf);
    read(s, "handle_lateral_force_lbf", w, c.simulation.loads.handle_lateral_force_lbf);
    if (s.contains("rear_tip_support"))
      c.simulation.bc.rear_tip = support_from(s.value("rear_tip_support", ""), w + ".rear_tip_support");
    if (s.contains("front_tip_support"))
      c.simulation.bc.front_tip = support_from(s.value("front_tip_support", ""), w + ".front_tip_support");
    read_positive(s, "max_element_length_in", w, c.simulation.max_element_length_in);
    read_positive(s, "safety_factor_cap", w, c.simulation.safety_factor_cap);
  }
  read(j, "stability_force_lbf", "", c.stability_force_lbf);
  if (!(c.stability_force_lbf > 0.0)) fail("stability_force_lbf", "must be positive");

  if (j.contains("surrogate")) {
    const json& s = j.at("surrogate");
    const std::string w = "surrogate";
    check_keys(s, w, {"test_fraction", "seed", "folds", "knn_k", "forest_trees", "forest_max_depth",
                      "forest_min_leaf", "boosting_rounds", "boosting_depth", "boosting_min_leaf", "learning_rate",
                      "ridge_alpha", "ridge_degree", "meta_alpha", "max_bins", "learners", "reliability_threshold"});
    auto& g = c.surrogate;
    read(s, "test_fraction", w, g.test_fraction);
    read(s, "seed", w, g.seed);
    read(s, "folds", w, g.folds);
    read(s, "knn_k", w, g.knn_k);
    read(s, "forest_trees", w, g.forest_trees);
    read(s, "forest_max_depth", w, g.forest_max_depth);
    read(s, "forest_min_leaf", w, g.forest_min_leaf);
    read(s, "boosting_rounds", w, g.boosting_rounds);
    read(s, "boosting_depth", w, g.boosting_depth);
    read(s, "boosting_min_leaf", w, g.boosting_min_leaf);
    read(s, "learning_rate", w, g.learning_rate);
    read(s, "ridge_alpha", w, g.ridge_alpha);
    read(s, "ridge_degree", w, g.ridge_degree);
    read(s, "meta_alpha", w, g.meta_alpha);
    read(s, "max_bins", w, g.max_bins);
    read(s, "reliability_threshold", w, g.reliability_threshold);
    if (s.contains("learners")) {
      const json& l = s.at("learners");
      check_keys(l, w + ".learners", {"knn", "random_forest", "gradient_boosting", "ridge"});
      for (int b = 0; b < surrogate::kNumBaseLearners; ++b) {
        const std::string name(surrogate::to_string(static_cast<surrogate::BaseLearner>(b)));
        bool on = g.enabled[static_cast<std::size_t>(b)];
        read(l, name.c_str(), w + ".learners", on);
        g.enabled[static_cast<std::size_t>(b)] = on;
      }
    }
    if (!(g.test_fraction > 0.0 && g.test_fraction < 1.0)) fail(w + ".test_fraction", "must lie in (0, 1)");
  }

  if (j.contains("optimizer")) {
    const json& s = j.at("optimizer");
    const std::string w = "optimizer";
    check_keys(s, w, {"population_size", "generations", "crossover_rate", "mutation_rate", "sbx_eta", "mutation_eta",
                      "seed", "sample_count", "diversity_weight", "objective_weights", "neighbor_k",
                      "change_tolerance"});
    auto& g = c.optimizer;
    read(s, "population_size", w, g.population_size);
    read(s, "generations", w, g.generations);
    read(s, "crossover_rate", w, g.crossover_rate);
    read(s, "mutation_rate", w, g.mutation_rate);
    read(s, "sbx_eta", w, g.sbx_eta);
    read(s, "mutation_eta", w, g.mutation_eta);
    read(s, "seed", w, g.seed);
    read(s, "sample_count", w, g.sample_count);
    read(s, "diversity_weight", w, g.diversity_weight);
    read(s, "objective_weights", w, g.objective_weights);
    read(s, "neighbor_k", w, g.neighbor_k);
    read(s, "change_tolerance", w, g.change_tolerance);
    try {
      g.validate();
    } catch (const Error& e) {
      fail(w, e.what());
    }
  }

  // Exploration defaults follow the dataset box when the file redefines it.
  if (ranges_given) {
    const ParameterRanges generic = c.query.exploration;
    c.query.exploration = c.ranges;
    for (Param p : {Param::OverallHeight, Param::HandleDistance}) {
      const int k = static_cast<int>(p);
      const double lo = std::max(generic.lower[k], c.ranges.lower[k]);
      const double hi = std::min(generic.upper()[k], c.ranges.upper()[k]);
      if (hi >= lo) c.query.exploration.set(p, lo, hi);
    }
  }
  if (j.contains("query")) read_query(j.at("query"), c);

  if (j.contains("plot_targets")) {
    const json& p = j.at("plot_targets");
    if (!p.is_array() || p.empty()) fail("plot_targets", "expected a non-empty list of performance values");
    c.plot_targets.clear();
    for (const json& name : p) {
      try {
        c.plot_targets.push_back(target_from_string(name.get<std::string>()));
      } catch (const std::exception&) {
        fail("plot_targets", "unknown performance value " + name.dump());
      }
    }
  }
  return c;
}

}  // namespace

PipelineConfig config_from_json(const json& j) {
  try {
    return apply_json(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("malformed config: ") + e.what());
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::IoError, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(is, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

json config_to_json(const PipelineConfig& c) {
  json j;
  j["output_dir"] = c.output_dir.string();
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["design_count"] = c.design_count;
  j["ranges"] = ranges_json(c.ranges);
  j["feasibility"] = {{"min_outer_diameter_in", c.limits.min_outer_diameter},
                      {"max_outer_diameter_in", c.limits.max_outer_diameter},
                      {"min_handle_distance_in", c.limits.min_handle_distance},
                      {"max_handle_distance_in", c.limits.max_handle_distance}};
  j["simulation"] = {{"handle_down_force_lbf", c.simulation.loads.handle_down_force_lbf},
                     {"handle_lateral_force_lbf", c.simulation.loads.handle_lateral_force_lbf},
                     {"rear_tip_support", support_name(c.simulation.bc.rear_tip)},
                     {"front_tip_support", support_name(c.simulation.bc.front_tip)},
                     {"max_element_length_in", c.simulation.max_element_length_in},
                     {"safety_factor_cap", c.simulation.safety_factor_cap}};
  j["stability_force_lbf"] = c.stability_force_lbf;
  const auto& s = c.surrogate;
  json learners;
  for (int b = 0; b < surrogate::kNumBaseLearners; ++b)
    learners[std::string(surrogate::to_string(static_cast<surrogate::BaseLearner>(b)))] =
        static_cast<bool>(s.enabled[static_cast<std::size_t>(b)]);
  j["surrogate"] = {{"test_fraction", s.test_fraction},       {"seed", s.seed},
                    {"folds", s.folds},                       {"knn_k", s.knn_k},
                    {"forest_trees", s.forest_trees},         {"forest_max_depth", s.forest_max_depth},
                    {"forest_min_leaf", s.forest_min_leaf},   {"boosting_rounds", s.boosting_rounds},
                    {"boosting_depth", s.boosting_depth},     {"boosting_min_leaf", s.boosting_min_leaf},
                    {"learning_rate", s.learning_rate},       {"ridge_alpha", s.ridge_alpha}, {"ridge_degree", s.ridge_degree},
                    {"meta_alpha", s.meta_alpha},             {"max_bins", s.max_bins},
                    {"learners", learners},                   {"reliability_threshold", s.reliability_threshold}};
  const auto& g = c.optimizer;
  j["optimizer"] = {{"population_size", g.population_size}, {"generations", g.generations},
                    {"crossover_rate", g.crossover_rate},   {"mutation_rate", g.mutation_rate},
                    {"sbx_eta", g.sbx_eta},                 {"mutation_eta", g.mutation_eta},
                    {"seed", g.seed},                       {"sample_count", g.sample_count},
                    {"diversity_weight", g.diversity_weight}, {"objective_weights", g.objective_weights},
                    {"neighbor_k", g.neighbor_k},           {"change_tolerance", g.change_tolerance}};
  json q;
  q["design"] = design_json(c.query.design);
  q["exploration"] = ranges_json(c.query.exploration);
  q["frozen"] = json::array();
  for (int f = 0; f < kNumDesignFeatures; ++f)
    if (c.query.frozen[static_cast<std::size_t>(f)]) q["frozen"].push_back(std::string(optimizer::feature_name(f)));
  json targets = json::object();
  for (int t = 0; t < kNumTargets; ++t) {
    const auto& spec = c.query.targets[static_cast<std::size_t>(t)];
    if (!spec.lower && !spec.upper) continue;
    json b = json::object();
    if (spec.lower) b["min"] = bound_value_json(spec.lower);
    if (spec.upper) b["max"] = bound_value_json(spec.upper);
    targets[std::string(short_name(static_cast<Target>(t)))] = b;
  }
  q["targets"] = targets;
  q["allow_unreliable_targets"] = c.query.allow_unreliable_targets;
  j["query"] = q;
  j["plot_targets"] = json::array();
  for (Target t : c.plot_targets) j["plot_targets"].push_back(std::string(short_name(t)));
  return j;
}

}  // namespace walker::cli
