#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "walker/design.hpp"
#include "walker/performance.hpp"
#include "walker/sampling.hpp"

namespace walker {

enum class SimStatus { Pending, Ok, Failed };
std::string_view to_string(SimStatus s);
SimStatus sim_status_from_string(std::string_view s);

struct DatasetRow {
  std::int64_t design_id = 0;
  std::int64_t sobol_index = 0;
  DesignVector design;
  PerformanceRecord performance;
  SimStatus status = SimStatus::Pending;
};

using Dataset = std::vector<DatasetRow>;

Dataset rows_from_batch(const SampleBatch& batch);

/// Leading columns shared by designs.csv and dataset.csv.
std::vector<std::string> design_header();
std::vector<std::string> design_fields(const DatasetRow& row);
DesignVector parse_design(const std::vector<std::string>& header, const std::vector<std::string>& fields,
                          std::string_view context);

/// design_id, sobol_index, 14 parameters, 2 materials.
void write_designs_csv(const std::filesystem::path& path, std::span<const DatasetRow> rows);
/// Designs columns, the 8 simulated values, theta_deg, tip_status, sim_status.
/// Performance cells are empty for rows that are not Ok.
void write_dataset_csv(const std::filesystem::path& path, std::span<const DatasetRow> rows);
/// Reads either file layout; rows without sim_status come back Pending.
Dataset read_dataset_csv(const std::filesystem::path& path);

/// Rows with status Ok.
Dataset usable_rows(std::span<const DatasetRow> rows);
std::vector<DesignVector> designs_of(std::span<const DatasetRow> rows);

}  // namespace walker
