#include "war/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "war/errors.hpp"
#include "war/random.hpp"

namespace war {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\"");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\"");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_line(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  if (delimiter == ',') {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      cells.push_back(trim(line.substr(start, pos - start)));
      if (pos == std::string_view::npos) break;
      start = pos + 1;
    }
  } else {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
      cells.push_back(trim(line.substr(i, j - i)));
      i = j;
    }
  }
  return cells;
}

std::optional<double> parse_number(std::string_view cell) {
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::size_t resolve(const ColumnRef& ref, const std::vector<std::string>& names,
                    bool has_header) {
  if (const auto* index = std::get_if<std::size_t>(&ref)) {
    if (*index >= names.size()) {
      throw SchemaError("column index " + std::to_string(*index) + " out of range (" +
                        std::to_string(names.size()) + " columns)");
    }
    return *index;
  }
  const auto& name = std::get<std::string>(ref);
  if (!has_header) {
    throw SchemaError("column '" + name + "' requested by name but the file has no header");
  }
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    throw SchemaError("no column named '" + name + "'");
  }
  return static_cast<std::size_t>(it - names.begin());
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RawTable parse_csv(std::string_view text, const ColumnRef& target,
                   std::span<const ColumnRef> drop_columns, const CsvOptions& options) {
  std::vector<std::string_view> lines;
  std::vector<std::size_t> line_numbers;
  {
    std::size_t start = 0;
    std::size_t number = 1;
    while (start <= text.size()) {
      const auto pos = text.find('\n', start);
      const auto line = text.substr(start, pos == std::string_view::npos ? pos : pos - start);
      if (!trim(line).empty()) {
        lines.push_back(line);
        line_numbers.push_back(number);
      }
      if (pos == std::string_view::npos) break;
      start = pos + 1;
      ++number;
    }
  }
  if (lines.empty()) {
    throw SchemaError("table is empty");
  }

  const char delimiter =
      options.delimiter != 0 ? options.delimiter
                             : (lines.front().find(',') != std::string_view::npos ? ',' : ' ');
  const auto first = split_line(lines.front(), delimiter);
  bool has_header = false;
  if (options.header.has_value()) {
    has_header = *options.header;
  } else {
    has_header = std::any_of(first.begin(), first.end(),
                             [](std::string_view c) { return !parse_number(c).has_value(); });
  }

  std::vector<std::string> names;
  for (std::size_t c = 0; c < first.size(); ++c) {
    names.push_back(has_header ? std::string(first[c]) : "x" + std::to_string(c));
  }
  const std::size_t width = names.size();
  const std::size_t target_col = resolve(target, names, has_header);
  std::vector<bool> dropped(width, false);
  for (const auto& ref : drop_columns) {
    dropped[resolve(ref, names, has_header)] = true;
  }
  if (dropped[target_col]) {
    throw SchemaError("target column is also listed for dropping");
  }

  std::vector<std::size_t> feature_cols;
  RawTable table;
  table.target_name = names[target_col];
  for (std::size_t c = 0; c < width; ++c) {
    if (c != target_col && !dropped[c]) {
      feature_cols.push_back(c);
      table.feature_names.push_back(names[c]);
    }
  }

  const std::size_t body_start = has_header ? 1 : 0;
  const auto rows = static_cast<Index>(lines.size() - body_start);
  table.features.resize(rows, static_cast<Index>(feature_cols.size()));
  table.targets.resize(rows);
  for (std::size_t li = body_start; li < lines.size(); ++li) {
    const auto cells = split_line(lines[li], delimiter);
    const std::size_t row_number = line_numbers[li];
    if (cells.size() != width) {
      throw IngestError("expected " + std::to_string(width) + " cells, found " +
                            std::to_string(cells.size()),
                        row_number, cells.size() < width ? cells.size() + 1 : width + 1);
    }
    const auto r = static_cast<Index>(li - body_start);
    auto cell_value = [&](std::size_t c) {
      const auto v = parse_number(cells[c]);
      if (!v) {
        throw IngestError("cannot parse '" + std::string(cells[c]) + "' as a finite number",
                          row_number, c + 1);
      }
      return *v;
    };
    for (std::size_t k = 0; k < feature_cols.size(); ++k) {
      table.features(r, static_cast<Index>(k)) = cell_value(feature_cols[k]);
    }
    table.targets(r) = cell_value(target_col);
  }
  return table;
}

RawTable load_csv(const std::filesystem::path& path, const ColumnRef& target,
                  std::span<const ColumnRef> drop_columns, const CsvOptions& options) {
  return parse_csv(read_text(path), target, drop_columns, options);
}

Split split_train_test(std::size_t n, double ratio, std::uint64_t seed) {
  if (n < 2) {
    throw DomainError("need at least two rows to split");
  }
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw DomainError("train ratio must lie in (0, 1)");
  }
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i);
    std::swap(order[i], order[pick(rng)]);
  }
  const auto n_train = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(n)));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

Scaled minmax_scale(const Matrix& features, std::span<const Index> train) {
  if (train.empty()) {
    throw DomainError("scaling needs at least one train row");
  }
  Scaled out;
  out.features.resize(features.rows(), features.cols());
  for (Index c = 0; c < features.cols(); ++c) {
    double lo = features(train.front(), c);
    double hi = lo;
    for (Index r : train) {
      lo = std::min(lo, features(r, c));
      hi = std::max(hi, features(r, c));
    }
    out.params.min.push_back(lo);
    out.params.max.push_back(hi);
    if (hi > lo) {
      out.features.col(c) = (features.col(c).array() - lo) / (hi - lo);
    } else {
      out.features.col(c).setZero();
    }
  }
  return out;
}

Matrix minmax_unscale(const Matrix& scaled, const ScaleParams& params) {
  if (static_cast<std::size_t>(scaled.cols()) != params.min.size()) {
    throw ShapeError("scale parameters do not match column count");
  }
  Matrix out(scaled.rows(), scaled.cols());
  for (Index c = 0; c < scaled.cols(); ++c) {
    const double lo = params.min[static_cast<std::size_t>(c)];
    const double hi = params.max[static_cast<std::size_t>(c)];
    out.col(c) = (scaled.col(c).array() * (hi - lo) + lo).matrix();
  }
  return out;
}

Dataset prepare_dataset(std::string name, RawTable table, double train_ratio,
                        std::uint64_t split_seed) {
  Dataset d;
  d.name = std::move(name);
  auto split = split_train_test(static_cast<std::size_t>(table.features.rows()), train_ratio,
                                split_seed);
  auto scaled = minmax_scale(table.features, split.train);
  d.features = std::move(scaled.features);
  d.scale = std::move(scaled.params);
  d.targets = std::move(table.targets);
  d.feature_names = std::move(table.feature_names);
  d.target_name = std::move(table.target_name);
  d.train = std::move(split.train);
  d.test = std::move(split.test);
  return d;
}

void write_bundle(const Dataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  json meta;
  meta["name"] = dataset.name;
  meta["rows"] = dataset.features.rows();
  meta["features"] = dataset.feature_names;
  meta["target"] = dataset.target_name;
  json scale = json::array();
  for (std::size_t c = 0; c < dataset.scale.min.size(); ++c) {
    scale.push_back({{"column", dataset.feature_names.at(c)},
                     {"min", dataset.scale.min[c]},
                     {"max", dataset.scale.max[c]}});
  }
  meta["scale"] = scale;
  write_text(dir / "meta.json", meta.dump(2) + "\n");

  std::string features;
  for (std::size_t c = 0; c < dataset.feature_names.size(); ++c) {
    features += (c ? "," : "") + dataset.feature_names[c];
  }
  features += "\n";
  for (Index r = 0; r < dataset.features.rows(); ++r) {
    for (Index c = 0; c < dataset.features.cols(); ++c) {
      features += (c ? "," : "") + format_double(dataset.features(r, c));
    }
    features += "\n";
  }
  write_text(dir / "features.csv", features);

  std::string targets = dataset.target_name + "\n";
  for (Index r = 0; r < dataset.targets.size(); ++r) {
    targets += format_double(dataset.targets(r)) + "\n";
  }
  write_text(dir / "targets.csv", targets);

  json split;
  split["train"] = dataset.train;
  split["test"] = dataset.test;
  write_text(dir / "split.json", split.dump() + "\n");
}

Dataset read_bundle(const std::filesystem::path& dir) {
  Dataset d;
  const json meta = json::parse(read_text(dir / "meta.json"));
  d.name = meta.at("name").get<std::string>();
  d.target_name = meta.at("target").get<std::string>();
  d.feature_names = meta.at("features").get<std::vector<std::string>>();
  for (const auto& entry : meta.at("scale")) {
    d.scale.min.push_back(entry.at("min").get<double>());
    d.scale.max.push_back(entry.at("max").get<double>());
  }
  CsvOptions with_header;
  with_header.delimiter = ',';
  with_header.header = true;
  RawTable features = parse_csv(read_text(dir / "features.csv") , std::size_t{0}, {}, with_header);
  // The first feature column was taken as target above; stitch it back.
  d.features.resize(features.features.rows(), features.features.cols() + 1);
  d.features.col(0) = features.targets;
  d.features.rightCols(features.features.cols()) = features.features;

  const std::string targets_text = read_text(dir / "targets.csv");
  d.targets = parse_csv(targets_text, std::size_t{0}, {}, with_header).targets;

  const json split = json::parse(read_text(dir / "split.json"));
  d.train = split.at("train").get<std::vector<Index>>();
  d.test = split.at("test").get<std::vector<Index>>();
  if (d.targets.size() != d.features.rows() ||
      d.train.size() + d.test.size() != static_cast<std::size_t>(d.features.rows())) {
    throw SchemaError("bundle parts disagree on the number of rows");
  }
  return d;
}

}  // namespace war
