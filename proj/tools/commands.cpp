#include "commands.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <map>
#include <thread>

#include "walker/analysis.hpp"
#include "walker/csv.hpp"
#include "walker/dataset.hpp"
#include "walker/error.hpp"
#include "walker/sampling.hpp"
#include "walker/stability.hpp"

namespace walker::cli {

namespace {

OutputPaths paths(const PipelineConfig& c) { return {c.output_dir}; }

void require_file(const std::filesystem::path& p, std::string_view what) {
  if (!std::filesystem::exists(p))
    throw Error(ErrorCode::IoError, std::string(what) + " not found: " + p.string());
}

PerformanceRecord simulate_with_theta(const DesignVector& d, const PipelineConfig& c) {
  PerformanceRecord p = fea::simulate(d, c.simulation);
  annotate_dataset(std::span<PerformanceRecord>(&p, 1), std::span<const DesignVector>(&d, 1),
                   c.stability_force_lbf);
  return p;
}

std::string fmt(double v, int precision = 4) {
  if (!std::isfinite(v)) return csv::format(v);
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

void print_report(const surrogate::EvaluationReport& rep, std::ostream& out) {
  out << "n_train=" << rep.train_size << " n_test=" << rep.test_size << " threshold=" << rep.threshold << "\n";
  out << std::left << std::setw(20) << "target" << std::setw(10) << "r2"
      << "reliable\n";
  for (const auto& en : rep.entries)
    out << std::left << std::setw(20) << short_name(en.target) << std::setw(10) << fmt(en.r2)
        << (en.reliable ? "yes" : "no") << "\n";
}

struct Resolved {
  optimizer::CounterfactualQuery query;
  PerformanceRecord baseline_predicted;
};

Resolved resolve_query(const PipelineConfig& c, const surrogate::SurrogateEnsemble& e) {
  Resolved r;
  r.baseline_predicted = e.predict(c.query.design);
  r.query.query_design = c.query.design;
  r.query.targets = optimizer::resolve_targets(c.query.targets, r.baseline_predicted);
  r.query.frozen = c.query.frozen;
  r.query.exploration = c.query.exploration;
  r.query.allow_unreliable_targets = c.query.allow_unreliable_targets;
  optimizer::validate_query(r.query, c.ranges, e);
  return r;
}

bool is_deflection(Target t) {
  return t == Target::HandleDx || t == Target::HandleDy || t == Target::HandleDz || t == Target::LegDisplacement;
}

double plot_value(const DesignVector& d, const PerformanceRecord& p, Target t) {
  const double v = t == Target::Theta ? theta_for_learning(d, p) : p.value(t);
  return is_deflection(t) ? std::abs(v) : v;
}

void print_result_line(std::ostream& out, const std::string& label, const PerformanceRecord& pred,
                       const std::optional<PerformanceRecord>& sim) {
  out << label << " pred: mass=" << fmt(pred.mass_lbs) << " sf=" << fmt(pred.min_safety_factor)
      << " leg_displ=" << fmt(pred.leg_displacement_in) << " theta=" << fmt(pred.theta_deg);
  if (sim) {
    out << " | sim: mass=" << fmt(sim->mass_lbs) << " sf=" << fmt(sim->min_safety_factor)
        << " leg_displ=" << fmt(sim->leg_displacement_in) << " theta="
        << (sim->tip_status == TipStatus::Tips ? fmt(sim->theta_deg) : std::string("no_tip"));
  }
  out << "\n";
}

}  // namespace

DirectoryLock::DirectoryLock(const std::filesystem::path& lock_file) {
  if (lock_file.has_parent_path()) std::filesystem::create_directories(lock_file.parent_path());
  fd_ = ::open(lock_file.c_str(), O_RDWR | O_CREAT, 0644);
  if (fd_ < 0) throw Error(ErrorCode::IoError, "cannot open lock file " + lock_file.string() + ": " + std::strerror(errno));
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::IoError, "output directory " + lock_file.parent_path().string() +
                                        " is in use by another walker_forge process");
  }
}

DirectoryLock::~DirectoryLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

void cmd_generate(const PipelineConfig& c, std::optional<int> count, std::ostream& out) {
  const int n = count.value_or(c.design_count);
  const SampleBatch batch = generate_batch(n, c.ranges, c.limits, c.seed);
  write_designs_csv(paths(c).designs(), rows_from_batch(batch));
  out << "requested=" << batch.requested << " dropped=" << batch.dropped_infeasible
      << " valid=" << batch.designs.size() << "\n";
}

SimulateSummary cmd_simulate(const PipelineConfig& c, const std::optional<std::filesystem::path>& designs, bool force,
                             std::ostream& out) {
  const OutputPaths p = paths(c);
  const std::filesystem::path in = designs.value_or(p.designs());
  require_file(in, "designs file");
  Dataset rows = read_dataset_csv(in);

  SimulateSummary summary;
  std::vector<std::size_t> todo;
  std::map<std::int64_t, const DatasetRow*> prior_by_id;
  Dataset prior;
  if (!force && std::filesystem::exists(p.dataset()) && std::filesystem::absolute(in) != std::filesystem::absolute(p.dataset())) {
    prior = read_dataset_csv(p.dataset());
    for (const DatasetRow& r : prior) prior_by_id[r.design_id] = &r;
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    DatasetRow& r = rows[i];
    if (!force) {
      const auto it = prior_by_id.find(r.design_id);
      if (it != prior_by_id.end() && it->second->status != SimStatus::Pending && it->second->design == r.design) {
        r = *it->second;
        ++summary.skipped;
        continue;
      }
      if (r.status != SimStatus::Pending) {
        ++summary.skipped;
        continue;
      }
    }
    todo.push_back(i);
  }

  std::vector<std::string> errors(rows.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < todo.size(); k = next++) {
      DatasetRow& r = rows[todo[k]];
      try {
        r.performance = simulate_with_theta(r.design, c);
        r.status = SimStatus::Ok;
      } catch (const Error& e) {
        r.performance = {};
        r.status = SimStatus::Failed;
        errors[todo[k]] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(c.resolved_workers(), static_cast<int>(todo.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (!errors[i].empty()) warn("design_id=" + std::to_string(rows[i].design_id) + " failed: " + errors[i]);

  summary.simulated = todo.size();
  for (const DatasetRow& r : rows) {
    summary.ok += r.status == SimStatus::Ok;
    summary.failed += r.status == SimStatus::Failed;
  }
  write_dataset_csv(p.dataset(), rows);
  out << "simulated=" << summary.simulated << " skipped=" << summary.skipped << " ok=" << summary.ok
      << " failed=" << summary.failed << "\n";
  return summary;
}

void cmd_train(const PipelineConfig& c, std::ostream& out) {
  const OutputPaths p = paths(c);
  require_file(p.dataset(), "dataset");
  const Dataset rows = read_dataset_csv(p.dataset());
  const surrogate::DataSplit split = surrogate::split(rows, c.surrogate.test_fraction, c.surrogate.seed);
  surrogate::SurrogateEnsemble e = surrogate::SurrogateEnsemble::train(split.train, c.ranges, c.surrogate);
  const surrogate::EvaluationReport rep = surrogate::evaluate(e, split.test, c.surrogate.reliability_threshold);
  e.set_test_r2(rep.r2_vector());
  e.save(p.model());
  surrogate::write_report_csv(p.report(), rep);
  print_report(rep, out);
}

void cmd_evaluate(const PipelineConfig& c, std::ostream& out) {
  const OutputPaths p = paths(c);
  require_file(p.model(), "model");
  require_file(p.dataset(), "dataset");
  const surrogate::SurrogateEnsemble e = surrogate::SurrogateEnsemble::load(p.model());
  const Dataset rows = read_dataset_csv(p.dataset());
  const surrogate::DataSplit split = surrogate::split(rows, e.config().test_fraction, e.config().seed);
  const surrogate::EvaluationReport rep = surrogate::evaluate(e, split.test, c.surrogate.reliability_threshold);
  surrogate::write_report_csv(p.report(), rep);
  print_report(rep, out);
}

void cmd_optimize(const PipelineConfig& c, std::ostream& out) {
  const OutputPaths p = paths(c);
  require_file(p.model(), "model");
  require_file(p.dataset(), "dataset");
  const surrogate::SurrogateEnsemble e = surrogate::SurrogateEnsemble::load(p.model());
  const std::vector<DesignVector> dataset = designs_of(usable_rows(read_dataset_csv(p.dataset())));
  const Resolved r = resolve_query(c, e);

  optimizer::GAConfig ga = c.optimizer;
  ga.workers = c.resolved_workers();
  const optimizer::EvolveResult evo = optimizer::evolve(r.query, e, dataset, c.ranges, ga, c.limits);
  std::vector<optimizer::CounterfactualResult> results =
      optimizer::final_sample(evo.archive, ga, optimizer::GowerMetric(c.ranges));
  optimizer::validate(results, r.query.targets, c.simulation, c.stability_force_lbf);

  std::optional<PerformanceRecord> baseline_sim;
  try {
    baseline_sim = simulate_with_theta(c.query.design, c);
  } catch (const Error& err) {
    warn(std::string("baseline simulation failed: ") + err.what());
  }
  optimizer::write_counterfactuals_csv(p.counterfactuals(), c.query.design, r.baseline_predicted, baseline_sim,
                                       results);

  std::size_t flagged = 0;
  for (const auto& res : results) flagged += res.flagged;
  out << "evaluations=" << evo.evaluations << " archive=" << evo.archive.size() << " returned=" << results.size()
      << " flagged=" << flagged << "\n";
  print_result_line(out, "baseline", r.baseline_predicted, baseline_sim);
  for (std::size_t i = 0; i < results.size(); ++i)
    print_result_line(out, "design " + std::to_string(i + 1) + (results[i].flagged ? " [flagged]" : ""),
                      results[i].predicted, results[i].simulated);
}

void cmd_validate(const PipelineConfig& c, std::ostream& out) {
  const OutputPaths p = paths(c);
  require_file(p.counterfactuals(), "counterfactuals file");
  require_file(p.model(), "model");
  const surrogate::SurrogateEnsemble e = surrogate::SurrogateEnsemble::load(p.model());
  const Resolved r = resolve_query(c, e);
  const csv::Table t = csv::read(p.counterfactuals());
  const std::size_t role = t.require("role");

  std::vector<optimizer::CounterfactualResult> results;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    if (f[role] != "counterfactual") continue;
    const std::string ctx = p.counterfactuals().string() + " row " + std::to_string(i + 2);
    optimizer::CounterfactualResult res;
    res.design = parse_design(t.header, f, ctx);
    for (int k = 0; k < kNumTargets; ++k) {
      const auto target = static_cast<Target>(k);
      res.predicted.set(target, csv::parse_double(f[t.require("pred_" + std::string(column_name(target)))], ctx));
    }
    res.objectives = {csv::parse_double(f[t.require("gower_to_query")], ctx),
                      csv::parse_double(f[t.require("changed_feature_ratio")], ctx),
                      csv::parse_double(f[t.require("avg_gower_to_dataset")], ctx)};
    res.predicted_satisfied = optimizer::constraint_check(res.predicted, r.query.targets).satisfied;
    results.push_back(std::move(res));
  }
  optimizer::validate(results, r.query.targets, c.simulation, c.stability_force_lbf);
  std::optional<PerformanceRecord> baseline_sim;
  try {
    baseline_sim = simulate_with_theta(c.query.design, c);
  } catch (const Error& err) {
    warn(std::string("baseline simulation failed: ") + err.what());
  }
  optimizer::write_counterfactuals_csv(p.counterfactuals(), c.query.design, r.baseline_predicted, baseline_sim,
                                       results);
  std::size_t flagged = 0;
  double worst_mass = 0.0;
  for (const auto& res : results) {
    flagged += res.flagged;
    if (res.simulated) worst_mass = std::max(worst_mass, res.relative_error[static_cast<int>(Target::Mass)]);
  }
  out << "validated=" << results.size() << " flagged=" << flagged << " max_mass_rel_error=" << fmt(worst_mass) << "\n";
}

void cmd_plotdata(const PipelineConfig& c, const std::vector<std::string>& names, std::ostream& out) {
  std::vector<Target> targets;
  if (names.empty()) {
    targets = c.plot_targets;
  } else {
    for (const std::string& n : names) targets.push_back(target_from_string(n));
  }
  const OutputPaths p = paths(c);
  require_file(p.dataset(), "dataset");
  const Dataset rows = usable_rows(read_dataset_csv(p.dataset()));
  if (rows.size() < 2) throw Error(ErrorCode::InsufficientData, "plotdata needs at least 2 simulated designs");

  std::vector<std::vector<double>> cols(targets.size());
  for (std::size_t k = 0; k < targets.size(); ++k)
    for (const DatasetRow& r : rows) cols[k].push_back(plot_value(r.design, r.performance, targets[k]));

  std::optional<PerformanceRecord> query_perf;
  try {
    query_perf = simulate_with_theta(c.query.design, c);
  } catch (const Error& err) {
    warn(std::string("query design simulation failed; overlay omitted: ") + err.what());
  }

  csv::Table scatter;
  scatter.header = {"role", "design_id"};
  for (Target t : targets) scatter.header.emplace_back(column_name(t));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<std::string> row{"dataset", std::to_string(rows[i].design_id)};
    for (const auto& col : cols) row.push_back(csv::format(col[i]));
    scatter.rows.push_back(std::move(row));
  }
  if (query_perf) {
    std::vector<std::string> row{"query", ""};
    for (Target t : targets) row.push_back(csv::format(plot_value(c.query.design, *query_perf, t)));
    scatter.rows.push_back(std::move(row));
  }
  csv::write(p.scatter(), scatter);

  csv::Table kde;
  kde.header = {"target", "role", "x", "density", "bandwidth"};
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const analysis::KdeCurve curve = analysis::gaussian_kde(cols[k]);
    const std::string name(short_name(targets[k]));
    for (std::size_t i = 0; i < curve.x.size(); ++i)
      kde.rows.push_back({name, "kde", csv::format(curve.x[i]), csv::format(curve.density[i]),
                          csv::format(curve.bandwidth)});
    if (query_perf) {
      const double x = plot_value(c.query.design, *query_perf, targets[k]);
      kde.rows.push_back({name, "query", csv::format(x), csv::format(analysis::kde_at(cols[k], curve.bandwidth, x)),
                          csv::format(curve.bandwidth)});
    }
  }
  csv::write(p.kde(), kde);

  csv::Table corr;
  corr.header = {"a", "b", "pearson"};
  for (std::size_t a = 0; a < targets.size(); ++a)
    for (std::size_t b = a + 1; b < targets.size(); ++b)
      corr.rows.push_back({std::string(short_name(targets[a])), std::string(short_name(targets[b])),
                           csv::format(analysis::pearson(cols[a], cols[b]))});
  csv::write(p.correlations(), corr);

  out << "rows=" << rows.size() << " targets=" << targets.size() << "\n";
  for (const auto& r : corr.rows) out << "pearson(" << r[0] << ", " << r[1] << ")=" << r[2] << "\n";
}

void cmd_stability(double mass_lbs, double leg_width_in, double handle_distance_in, double height_in,
                   double force_lbf, std::ostream& out) {
  StabilityInput<double> s{units::pounds_to_kilograms(mass_lbs), units::inches_to_meters(leg_width_in),
                           units::inches_to_meters(handle_distance_in), units::inches_to_meters(height_in),
                           units::lbf_to_newtons(force_lbf)};
  const StabilityResult<double> r = tipping_angle(s);
  if (r.status == TipStatus::NoTip) {
    out << "status=no_tip\n";
    return;
  }
  out << "status=tips phi_deg=" << csv::format(units::radians_to_degrees(*r.phi))
      << " theta_deg=" << csv::format(units::radians_to_degrees(*r.theta)) << "\n";
}

}  // namespace walker::cli
