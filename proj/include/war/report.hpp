#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "war/curve.hpp"

namespace war {

/// The parts of a cell record the report needs.
struct RecordSummary {
  std::string dataset;
  std::string strategy;
  int repetition = 0;
  std::vector<CurvePoint> curve;
  double auc = 0.0;
  std::optional<double> rmse_at_fraction;
};

/// Throws SchemaError when a field is missing. Records whose status is not
/// "ok" return nullopt.
std::optional<RecordSummary> summarize_record(const nlohmann::json& record);

/// Reads every *.json under `records_dir` (sorted by file name).
std::vector<nlohmann::json> load_records(const std::filesystem::path& records_dir);

struct Stat {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single value
  int count = 0;
};

/// strategies x datasets table of one metric. Missing cells are absent from
/// `cells`.
struct MetricTable {
  std::vector<std::string> strategies;
  std::vector<std::string> datasets;
  std::map<std::pair<std::string, std::string>, Stat> cells;  // (strategy, dataset)

  /// Strategy with the lowest mean in the dataset column, "" if none.
  std::string lowest(const std::string& dataset) const;
};

struct MeanCurve {
  std::string dataset;
  std::string strategy;
  std::vector<CurvePoint> points;  // pointwise mean over repetitions
  int repetitions = 0;
};

struct Report {
  MetricTable rmse_at_fraction;
  MetricTable auc;
  std::vector<MeanCurve> curves;
};

/// Pure function of the summaries: rows follow the canonical strategy
/// order, columns are sorted dataset names. Curves of different repetitions
/// are averaged over their common prefix of labeled counts.
Report build_report(const std::vector<RecordSummary>& records);

/// Writes rmse25.csv, rmse25_std.csv, auc.csv, auc_std.csv, tables.md and
/// curves/<dataset>__<strategy>.csv into `out_dir`.
void write_report(const Report& report, const std::filesystem::path& out_dir);

std::string format_number(double value);

}  // namespace war
