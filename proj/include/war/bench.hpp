#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "war/engine.hpp"

namespace war {

inline constexpr const char* kArtifactVersion = "war_bench 1.0.0";

/// Where a dataset lives and how the query loop is sized for it.
struct DatasetPreset {
  std::string name;
  std::string file;  // relative to the grid's data_dir unless absolute
  ColumnRef target;
  std::vector<ColumnRef> drop;
  std::optional<bool> header;
  int initial_size = 1;
  int batch_size = 1;
  int n_query = -1;  // -1: enough rounds to reach `fraction` of the train split
  double alpha = 1.0;
  double beta = 1.0;
  double train_ratio = 0.8;
};

/// Built-in presets: boston, airfoil, energy, yacht, concrete_slump.
std::optional<DatasetPreset> find_preset(std::string_view name);
std::vector<std::string> preset_names();

struct GridConfig {
  std::filesystem::path data_dir = "data";
  std::vector<DatasetPreset> datasets;
  std::vector<StrategyKind> strategies;
  WarConfig training;  // alpha, beta and pool sizes are taken per dataset
  int repetitions = 5;
  std::uint64_t master_seed = 0;
  int jobs = 1;
  double fraction = 0.25;

  /// Throws ConfigError on unknown keys, bad values or unknown names.
  /// Relative data_dir values are resolved against `base_dir`.
  static GridConfig from_json(const nlohmann::json& doc,
                              const std::filesystem::path& base_dir = {});
};

GridConfig load_grid_config(const std::filesystem::path& path);

struct CellSeeds {
  std::uint64_t split = 0;
  std::uint64_t model = 0;
  std::uint64_t strategy = 0;
};

/// Split and model seeds depend on (dataset, repetition) only, so all
/// strategies of a repetition see the same split, the same seeded pool and
/// the same initial committee. The strategy seed also mixes in the strategy.
CellSeeds cell_seeds(std::uint64_t master, std::string_view dataset, StrategyKind strategy,
                     int repetition);

struct Cell {
  const DatasetPreset* dataset = nullptr;
  StrategyKind strategy = StrategyKind::WAR;
  int repetition = 0;
};

std::vector<Cell> grid_cells(const GridConfig& config);
std::string cell_id(const Cell& cell);

/// The WarConfig a cell runs with, n_query resolved against the train size.
WarConfig cell_config(const GridConfig& grid, const DatasetPreset& preset, Index train_size);

/// Runs one cell and returns its record. Never throws for failures inside the
/// experiment; those produce a record with status "failed".
nlohmann::json run_cell(const GridConfig& grid, const Cell& cell);

struct GridSummary {
  int completed = 0;  // ran now and succeeded
  int skipped = 0;    // already present with status "ok"
  int failed = 0;
};

/// Runs every cell, writing <out>/records/<cell id>.json as each finishes and
/// a wall-clock sidecar in <out>/timing/. Cells whose record already exists
/// with status "ok" are skipped. `jobs` <= 0 uses grid.jobs.
GridSummary run_grid(const GridConfig& grid, const std::filesystem::path& out_dir, int jobs = 0,
                     const std::function<void(const std::string&)>& log = {});

/// Writes `text` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace war
