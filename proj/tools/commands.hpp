#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace walker::cli {

struct OutputPaths {
  std::filesystem::path dir;

  std::filesystem::path designs() const { return dir / "designs.csv"; }
  std::filesystem::path dataset() const { return dir / "dataset.csv"; }
  std::filesystem::path model() const { return dir / "model.bin"; }
  std::filesystem::path report() const { return dir / "r2_report.csv"; }
  std::filesystem::path counterfactuals() const { return dir / "counterfactuals.csv"; }
  std::filesystem::path scatter() const { return dir / "plot_scatter.csv"; }
  std::filesystem::path kde() const { return dir / "plot_kde.csv"; }
  std::filesystem::path correlations() const { return dir / "plot_correlations.csv"; }
  std::filesystem::path lock() const { return dir / ".walker_forge.lock"; }
};

/// Advisory exclusive lock on the output directory, released on destruction.
/// Throws Error(IoError) when another process holds it.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& lock_file);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  int fd_ = -1;
};

struct SimulateSummary {
  std::size_t simulated = 0;
  std::size_t skipped = 0;
  std::size_t ok = 0;
  std::size_t failed = 0;
};

void cmd_generate(const PipelineConfig& c, std::optional<int> count, std::ostream& out);
SimulateSummary cmd_simulate(const PipelineConfig& c, const std::optional<std::filesystem::path>& designs, bool force,
                             std::ostream& out);
void cmd_train(const PipelineConfig& c, std::ostream& out);
void cmd_evaluate(const PipelineConfig& c, std::ostream& out);
void cmd_optimize(const PipelineConfig& c, std::ostream& out);
void cmd_validate(const PipelineConfig& c, std::ostream& out);
void cmd_plotdata(const PipelineConfig& c, const std::vector<std::string>& targets, std::ostream& out);
void cmd_stability(double mass_lbs, double leg_width_in, double handle_distance_in, double height_in,
                   double force_lbf, std::ostream& out);

}  // namespace walker::cli
