#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "war/types.hpp"

namespace war {

/// A column picked either by header name or by zero-based position.
using ColumnRef = std::variant<std::string, std::size_t>;

struct CsvOptions {
  /// ',' or ' ' (any run of spaces/tabs). 0 picks ',' when the first line
  /// contains a comma and whitespace otherwise.
  char delimiter = 0;
  /// nullopt: treat the first line as a header when any of its cells is not
  /// a number.
  std::optional<bool> header;
};

struct RawTable {
  std::vector<std::string> feature_names;
  std::string target_name;
  Matrix features;  // rows x features
  Vector targets;
};

/// Reads a delimited numeric table, drops `drop_columns`, and splits off the
/// target column. Throws IngestError (with 1-based row and column) on a cell
/// that is not a finite number or a ragged row, SchemaError when a named
/// column does not exist, and Error when the file cannot be opened.
RawTable load_csv(const std::filesystem::path& path, const ColumnRef& target,
                  std::span<const ColumnRef> drop_columns = {},
                  const CsvOptions& options = {});

/// Same as load_csv on in-memory text.
RawTable parse_csv(std::string_view text, const ColumnRef& target,
                   std::span<const ColumnRef> drop_columns = {},
                   const CsvOptions& options = {});

struct Split {
  std::vector<Index> train;
  std::vector<Index> test;
};

/// Seeded shuffle of 0..n-1, first floor(ratio * n) rows go to train.
/// Throws DomainError for n < 2 or ratio outside (0, 1).
Split split_train_test(std::size_t n, double ratio, std::uint64_t seed);

struct ScaleParams {
  std::vector<double> min;
  std::vector<double> max;
};

struct Scaled {
  Matrix features;
  ScaleParams params;
};

/// Per-column (x - min) / (max - min) with min and max taken over the train
/// rows only. A column that is constant on the train rows maps to 0.
Scaled minmax_scale(const Matrix& features, std::span<const Index> train);

/// Inverse of minmax_scale. Constant columns come back as their train value.
Matrix minmax_unscale(const Matrix& scaled, const ScaleParams& params);

/// Scaled features, raw targets and the train/test split of one dataset.
struct Dataset {
  std::string name;
  Matrix features;  // scaled
  Vector targets;   // raw units
  std::vector<std::string> feature_names;
  std::string target_name;
  ScaleParams scale;
  std::vector<Index> train;
  std::vector<Index> test;

  Index train_size() const { return static_cast<Index>(train.size()); }
};

/// Split, then scale with train statistics.
Dataset prepare_dataset(std::string name, RawTable table, double train_ratio,
                        std::uint64_t split_seed);

/// Writes {meta.json, features.csv, targets.csv, split.json} into `dir`.
void write_bundle(const Dataset& dataset, const std::filesystem::path& dir);
Dataset read_bundle(const std::filesystem::path& dir);

}  // namespace war
