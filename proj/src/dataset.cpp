#include "walker/dataset.hpp"

#include <string>

#include "walker/csv.hpp"
#include "walker/error.hpp"

namespace walker {

std::string_view to_string(SimStatus s) {
  switch (s) {
    case SimStatus::Pending: return "pending";
    case SimStatus::Ok: return "ok";
    case SimStatus::Failed: return "failed";
  }
  return "pending";
}

SimStatus sim_status_from_string(std::string_view s) {
  if (s == "ok") return SimStatus::Ok;
  if (s == "failed") return SimStatus::Failed;
  if (s == "pending" || s.empty()) return SimStatus::Pending;
  throw Error(ErrorCode::FormatError, "unknown sim_status '" + std::string(s) + "'");
}

Dataset rows_from_batch(const SampleBatch& batch) {
  Dataset rows;
  rows.reserve(batch.designs.size());
  for (const SampledDesign& s : batch.designs) {
    DatasetRow r;
    r.design_id = s.design_id;
    r.sobol_index = s.sobol_index;
    r.design = s.design;
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::string> design_header() {
  std::vector<std::string> h{"design_id", "sobol_index"};
  for (int k = 0; k < kNumContinuous; ++k) h.emplace_back(column_name(k));
  h.emplace_back(kFrontCrossbeamMaterialColumn);
  h.emplace_back(kFrameMaterialColumn);
  return h;
}

std::vector<std::string> design_fields(const DatasetRow& row) {
  std::vector<std::string> f{std::to_string(row.design_id), std::to_string(row.sobol_index)};
  for (int k = 0; k < kNumContinuous; ++k) f.push_back(csv::format(row.design.values[k]));
  f.emplace_back(to_string(row.design.front_crossbeam_material));
  f.emplace_back(to_string(row.design.frame_material));
  return f;
}

DesignVector parse_design(const std::vector<std::string>& header, const std::vector<std::string>& fields,
                          std::string_view context) {
  csv::Table view{header, {}};
  DesignVector d;
  for (int k = 0; k < kNumContinuous; ++k) {
    d.values[k] = csv::parse_double(fields[view.require(column_name(k))], context);
  }
  d.front_crossbeam_material = material_from_string(fields[view.require(kFrontCrossbeamMaterialColumn)]);
  d.frame_material = material_from_string(fields[view.require(kFrameMaterialColumn)]);
  return d;
}

void write_designs_csv(const std::filesystem::path& path, std::span<const DatasetRow> rows) {
  csv::Table t;
  t.header = design_header();
  for (const DatasetRow& r : rows) t.rows.push_back(design_fields(r));
  csv::write(path, t);
}

void write_dataset_csv(const std::filesystem::path& path, std::span<const DatasetRow> rows) {
  csv::Table t;
  t.header = design_header();
  for (int i = 0; i < kNumSimulatedValues; ++i) t.header.emplace_back(column_name(static_cast<Target>(i)));
  t.header.emplace_back(column_name(Target::Theta));
  t.header.emplace_back("tip_status");
  t.header.emplace_back("sim_status");
  for (const DatasetRow& r : rows) {
    auto f = design_fields(r);
    const bool ok = r.status == SimStatus::Ok;
    for (int i = 0; i < kNumSimulatedValues; ++i) {
      f.push_back(ok ? csv::format(r.performance.value(static_cast<Target>(i))) : std::string());
    }
    const bool has_theta = ok && r.performance.tip_status == TipStatus::Tips;
    f.push_back(has_theta ? csv::format(r.performance.theta_deg) : std::string());
    f.emplace_back(ok ? to_string(r.performance.tip_status) : std::string_view(""));
    f.emplace_back(to_string(r.status));
    t.rows.push_back(std::move(f));
  }
  csv::write(path, t);
}

Dataset read_dataset_csv(const std::filesystem::path& path) {
  const csv::Table t = csv::read(path);
  const int id_col = t.require("design_id");
  const int sobol_col = t.find("sobol_index");
  const int status_col = t.find("sim_status");
  Dataset rows;
  rows.reserve(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    const std::string ctx = path.filename().string() + " row " + std::to_string(i + 1);
    DatasetRow r;
    r.design_id = csv::parse_int(f[id_col], ctx);
    r.sobol_index = sobol_col >= 0 ? csv::parse_int(f[sobol_col], ctx) : r.design_id;
    r.design = parse_design(t.header, f, ctx);
    r.status = status_col >= 0 ? sim_status_from_string(f[status_col]) : SimStatus::Pending;
    if (r.status == SimStatus::Ok) {
      for (int k = 0; k < kNumSimulatedValues; ++k) {
        const auto target = static_cast<Target>(k);
        r.performance.set(target, csv::parse_double(f[t.require(column_name(target))], ctx));
      }
      r.performance.tip_status = tip_status_from_string(f[t.require("tip_status")]);
      if (r.performance.tip_status == TipStatus::Tips) {
        r.performance.theta_deg = csv::parse_double(f[t.require(column_name(Target::Theta))], ctx);
      }
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

Dataset usable_rows(std::span<const DatasetRow> rows) {
  Dataset out;
  for (const DatasetRow& r : rows) {
    if (r.status == SimStatus::Ok) out.push_back(r);
  }
  return out;
}

std::vector<DesignVector> designs_of(std::span<const DatasetRow> rows) {
  std::vector<DesignVector> out;
  out.reserve(rows.size());
  for (const DatasetRow& r : rows) out.push_back(r.design);
  return out;
}

}  // namespace walker
