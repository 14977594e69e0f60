#include "war/bench.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "war/errors.hpp"
#include "war/random.hpp"

namespace war {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

DatasetPreset preset(std::string name, std::string file, ColumnRef target,
                     std::vector<ColumnRef> drop, int b0, double alpha, double beta) {
  DatasetPreset p;
  p.name = std::move(name);
  p.file = std::move(file);
  p.target = std::move(target);
  p.drop = std::move(drop);
  p.initial_size = b0;
  p.batch_size = b0;
  p.alpha = alpha;
  p.beta = beta;
  return p;
}

const std::vector<DatasetPreset>& builtin_presets() {
  static const std::vector<DatasetPreset> presets = {
      preset("boston", "boston.csv", std::string("MEDV"), {}, 8, 2.0, 3.0),
      preset("airfoil", "airfoil.csv", std::string("sound_pressure"), {}, 24, 0.0, 2.5),
      preset("energy", "energy.csv", std::string("Y1"), {std::string("Y2")}, 12, 0.0, 2.5),
      preset("yacht", "yacht.csv", std::string("resistance"), {}, 5, 1.0, 3.0),
      preset("concrete_slump", "concrete_slump.csv", std::string("slump"),
             {std::string("no"), std::string("flow"), std::string("strength")}, 2, 1.0, 6.0),
  };
  return presets;
}

[[noreturn]] void bad(const std::string& what) { throw ConfigError("grid config: " + what); }

void check_keys(const json& obj, std::string_view where,
                std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) bad(std::string(where) + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) bad("unknown key '" + key + "' in " + std::string(where));
  }
}

template <class T>
T get(const json& obj, std::string_view where, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    bad(std::string(where) + "." + key + " has the wrong type");
  }
}

ColumnRef column_from_json(const json& j, std::string_view where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_unsigned()) return j.get<std::size_t>();
  bad(std::string(where) + " must be a column name or a non-negative index");
}

json column_to_json(const ColumnRef& c) {
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  return std::get<std::size_t>(c);
}

DatasetPreset dataset_from_json(const json& j) {
  if (j.is_string()) {
    auto p = find_preset(j.get<std::string>());
    if (!p) bad("unknown dataset preset '" + j.get<std::string>() + "'");
    return *p;
  }
  check_keys(j, "datasets[]",
             {"name", "preset", "file", "target", "drop", "header", "initial_size",
              "batch_size", "n_query", "alpha", "beta", "train_ratio"});
  DatasetPreset p;
  if (auto it = j.find("preset"); it != j.end()) {
    auto base = find_preset(it->get<std::string>());
    if (!base) bad("unknown dataset preset '" + it->get<std::string>() + "'");
    p = *base;
  }
  const std::string where = "datasets[]";
  p.name = get<std::string>(j, where, "name", p.name);
  if (p.name.empty()) bad("a dataset entry needs a name or a preset");
  p.file = get<std::string>(j, where, "file", p.file);
  if (p.file.empty()) bad("dataset '" + p.name + "' needs a file");
  if (auto it = j.find("target"); it != j.end()) {
    p.target = column_from_json(*it, where + ".target");
  } else if (!j.contains("preset")) {
    bad("dataset '" + p.name + "' needs a target");
  }
  if (auto it = j.find("drop"); it != j.end()) {
    if (!it->is_array()) bad(where + ".drop must be an array");
    p.drop.clear();
    for (const auto& c : *it) p.drop.push_back(column_from_json(c, where + ".drop"));
  }
  if (auto it = j.find("header"); it != j.end()) p.header = it->get<bool>();
  p.initial_size = get<int>(j, where, "initial_size", p.initial_size);
  p.batch_size = get<int>(j, where, "batch_size", p.batch_size);
  p.n_query = get<int>(j, where, "n_query", p.n_query);
  p.alpha = get<double>(j, where, "alpha", p.alpha);
  p.beta = get<double>(j, where, "beta", p.beta);
  p.train_ratio = get<double>(j, where, "train_ratio", p.train_ratio);
  if (p.initial_size < 1 || p.batch_size < 1) bad("dataset '" + p.name + "': sizes must be >= 1");
  if (p.n_query < -1) bad("dataset '" + p.name + "': n_query must be >= 0 or -1");
  if (!(p.train_ratio > 0.0 && p.train_ratio < 1.0)) bad("train_ratio must lie in (0, 1)");
  return p;
}

json preset_to_json(const DatasetPreset& p) {
  json drop = json::array();
  for (const auto& c : p.drop) drop.push_back(column_to_json(c));
  json j = {{"name", p.name},
            {"file", p.file},
            {"target", column_to_json(p.target)},
            {"drop", drop},
            {"initial_size", p.initial_size},
            {"batch_size", p.batch_size},
            {"n_query", p.n_query},
            {"alpha", p.alpha},
            {"beta", p.beta},
            {"train_ratio", p.train_ratio}};
  j["header"] = p.header ? json(*p.header) : json(nullptr);
  return j;
}

json war_config_to_json(const WarConfig& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"batch_size", c.batch_size},
          {"initial_size", c.initial_size},
          {"n_query", c.n_query},
          {"committee_size", c.committee_size},
          {"hidden", c.hidden},
          {"lr_estimator", c.lr_estimator},
          {"weight_decay", c.weight_decay},
          {"epochs", c.epochs},
          {"critic_hidden", c.critic_hidden},
          {"critic_group_size", c.critic_group_size},
          {"critic_bias_bound", c.critic_bias_bound},
          {"lr_critic", c.lr_critic},
          {"critic_initial_steps", c.critic_initial_steps},
          {"critic_steps_per_point", c.critic_steps_per_point},
          {"critic_reset_per_point", c.critic_reset_per_point}};
}

// Seeds are written as decimal strings so that readers with 53-bit
// integers keep them intact.
std::string seed_text(std::uint64_t s) { return std::to_string(s); }

fs::path dataset_path(const GridConfig& grid, const DatasetPreset& p) {
  const fs::path file(p.file);
  return file.is_absolute() ? file : grid.data_dir / file;
}

}  // namespace

std::optional<DatasetPreset> find_preset(std::string_view name) {
  for (const auto& p : builtin_presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : builtin_presets()) names.push_back(p.name);
  return names;
}

GridConfig GridConfig::from_json(const json& doc, const fs::path& base_dir) {
  check_keys(doc, "config", {"data_dir", "datasets", "strategies", "war", "training", "critic", "grid"});
  GridConfig g;
  g.data_dir = get<std::string>(doc, "config", "data_dir", "data");
  if (g.data_dir.is_relative() && !base_dir.empty()) g.data_dir = base_dir / g.data_dir;

  const auto datasets = doc.find("datasets");
  if (datasets == doc.end() || !datasets->is_array() || datasets->empty()) {
    bad("'datasets' must be a non-empty array");
  }
  for (const auto& d : *datasets) {
    g.datasets.push_back(dataset_from_json(d));
    for (std::size_t i = 0; i + 1 < g.datasets.size(); ++i) {
      if (g.datasets[i].name == g.datasets.back().name) bad("duplicate dataset '" + g.datasets[i].name + "'");
    }
  }

  const auto strategies = doc.find("strategies");
  if (strategies == doc.end() || (strategies->is_string() && *strategies == "all")) {
    g.strategies.assign(std::begin(kAllStrategies), std::end(kAllStrategies));
  } else {
    if (!strategies->is_array() || strategies->empty()) bad("'strategies' must be \"all\" or a non-empty array");
    for (const auto& s : *strategies) {
      if (!s.is_string()) bad("strategy names must be strings");
      const auto kind = parse_strategy(s.get<std::string>());
      if (!kind) bad("unknown strategy '" + s.get<std::string>() + "'");
      for (auto seen : g.strategies) {
        if (seen == *kind) bad("duplicate strategy '" + s.get<std::string>() + "'");
      }
      g.strategies.push_back(*kind);
    }
  }

  if (auto war = doc.find("war"); war != doc.end()) {
    if (!war->is_object()) bad("'war' must be an object keyed by dataset name");
    for (const auto& [name, params] : war->items()) {
      DatasetPreset* target = nullptr;
      for (auto& d : g.datasets) {
        if (d.name == name) target = &d;
      }
      if (!target) bad("'war' names dataset '" + name + "' which is not in the grid");
      check_keys(params, "war." + name, {"alpha", "beta"});
      target->alpha = get<double>(params, "war." + name, "alpha", target->alpha);
      target->beta = get<double>(params, "war." + name, "beta", target->beta);
    }
  }

  WarConfig& t = g.training;
  if (auto tr = doc.find("training"); tr != doc.end()) {
    check_keys(*tr, "training", {"lr_h", "lr_phi", "epochs", "weight_decay", "committee", "hidden"});
    t.lr_estimator = get<double>(*tr, "training", "lr_h", t.lr_estimator);
    t.lr_critic = get<double>(*tr, "training", "lr_phi", t.lr_critic);
    t.epochs = get<int>(*tr, "training", "epochs", t.epochs);
    t.weight_decay = get<double>(*tr, "training", "weight_decay", t.weight_decay);
    t.committee_size = get<int>(*tr, "training", "committee", t.committee_size);
    t.hidden = get<std::vector<int>>(*tr, "training", "hidden", t.hidden);
  }
  if (auto cr = doc.find("critic"); cr != doc.end()) {
    check_keys(*cr, "critic", {"hidden", "group_size", "bias_bound", "initial_steps",
                               "steps_per_point", "reset_per_point"});
    t.critic_hidden = get<std::vector<int>>(*cr, "critic", "hidden", t.critic_hidden);
    t.critic_group_size = get<int>(*cr, "critic", "group_size", t.critic_group_size);
    t.critic_bias_bound = get<double>(*cr, "critic", "bias_bound", t.critic_bias_bound);
    t.critic_initial_steps = get<int>(*cr, "critic", "initial_steps", t.critic_initial_steps);
    t.critic_steps_per_point = get<int>(*cr, "critic", "steps_per_point", t.critic_steps_per_point);
    t.critic_reset_per_point = get<bool>(*cr, "critic", "reset_per_point", t.critic_reset_per_point);
  }
  if (auto gr = doc.find("grid"); gr != doc.end()) {
    check_keys(*gr, "grid", {"repetitions", "master_seed", "jobs", "fraction"});
    g.repetitions = get<int>(*gr, "grid", "repetitions", g.repetitions);
    g.master_seed = get<std::uint64_t>(*gr, "grid", "master_seed", g.master_seed);
    g.jobs = get<int>(*gr, "grid", "jobs", g.jobs);
    g.fraction = get<double>(*gr, "grid", "fraction", g.fraction);
  }
  if (g.repetitions < 1) bad("grid.repetitions must be >= 1");
  if (g.jobs < 1) bad("grid.jobs must be >= 1");
  if (!(g.fraction > 0.0 && g.fraction <= 1.0)) bad("grid.fraction must lie in (0, 1]");

  // Surface bad training values now rather than once per cell.
  for (const auto& d : g.datasets) {
    WarConfig probe = t;
    probe.alpha = d.alpha;
    probe.beta = d.beta;
    probe.initial_size = d.initial_size;
    probe.batch_size = d.batch_size;
    probe.n_query = std::max(d.n_query, 0);
    probe.validate();
  }
  return g;
}

GridConfig load_grid_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return GridConfig::from_json(doc, path.parent_path());
}

CellSeeds cell_seeds(std::uint64_t master, std::string_view dataset, StrategyKind strategy,
                     int repetition) {
  const std::string rep = std::to_string(repetition);
  return {derive_seed(master, {"split", dataset, rep}),
          derive_seed(master, {"model", dataset, rep}),
          derive_seed(master, {strategy_name(strategy), dataset, rep})};
}

std::vector<Cell> grid_cells(const GridConfig& config) {
  std::vector<Cell> cells;
  for (const auto& d : config.datasets) {
    for (int rep = 0; rep < config.repetitions; ++rep) {
      for (auto s : config.strategies) cells.push_back({&d, s, rep});
    }
  }
  return cells;
}

std::string cell_id(const Cell& cell) {
  return cell.dataset->name + "__" + std::string(strategy_name(cell.strategy)) + "__rep" +
         std::to_string(cell.repetition);
}

WarConfig cell_config(const GridConfig& grid, const DatasetPreset& preset, Index train_size) {
  WarConfig c = grid.training;
  c.alpha = preset.alpha;
  c.beta = preset.beta;
  c.initial_size = preset.initial_size;
  c.batch_size = preset.batch_size;
  c.n_query = preset.n_query >= 0
                  ? preset.n_query
                  : rounds_to_fraction(train_size, preset.initial_size, preset.batch_size,
                                       grid.fraction);
  return c;
}

json run_cell(const GridConfig& grid, const Cell& cell) {
  const DatasetPreset& preset = *cell.dataset;
  const CellSeeds seeds = cell_seeds(grid.master_seed, preset.name, cell.strategy, cell.repetition);
  json record = {{"version", kArtifactVersion},
                 {"cell", cell_id(cell)},
                 {"dataset", preset.name},
                 {"strategy", strategy_name(cell.strategy)},
                 {"repetition", cell.repetition},
                 {"preset", preset_to_json(preset)},
                 {"fraction", grid.fraction},
                 {"seeds",
                  {{"master", seed_text(grid.master_seed)},
                   {"split", seed_text(seeds.split)},
                   {"model", seed_text(seeds.model)},
                   {"strategy", seed_text(seeds.strategy)}}}};
  try {
    const RawTable raw = load_csv(dataset_path(grid, preset), preset.target, preset.drop,
                                  CsvOptions{0, preset.header});
    const Dataset data = prepare_dataset(preset.name, raw, preset.train_ratio, seeds.split);
    const WarConfig config = cell_config(grid, preset, data.train_size());
    record["config"] = war_config_to_json(config);
    record["train_size"] = data.train_size();
    record["test_size"] = data.test.size();

    ActiveLearner learner(data, cell.strategy, config, {seeds.model, seeds.strategy});
    const LearningCurve curve = learner.run();

    json points = json::array();
    for (const auto& p : curve.points) points.push_back({p.labeled_count, p.rmse});
    record["curve"] = points;
    json metrics = {{"auc", trapezoid_auc(curve)}};
    try {
      const auto m = rmse_at_fraction(curve, grid.fraction, data.train_size());
      metrics["rmse_at_fraction"] = m.rmse;
      metrics["labeled_at_fraction"] = m.labeled_count;
      metrics["reached_fraction"] = m.fraction;
      metrics["overshoot"] = m.overshoot;
    } catch (const ReportingError& e) {
      metrics["rmse_at_fraction"] = nullptr;
      metrics["reached_fraction"] = e.max_fraction();
    }
    record["metrics"] = metrics;
    record["status"] = "ok";
  } catch (const std::exception& e) {
    record["status"] = "failed";
    record["error"] = e.what();
  }
  return record;
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

bool completed(const fs::path& record) {
  std::ifstream in(record);
  if (!in) return false;
  try {
    const json doc = json::parse(in);
    return doc.value("status", "") == "ok";
  } catch (const json::exception&) {
    return false;
  }
}

}  // namespace

GridSummary run_grid(const GridConfig& grid, const fs::path& out_dir, int jobs,
                     const std::function<void(const std::string&)>& log) {
  const std::vector<Cell> cells = grid_cells(grid);
  const fs::path records = out_dir / "records";
  const fs::path timing = out_dir / "timing";
  fs::create_directories(records);
  fs::create_directories(timing);

  GridSummary summary;
  std::vector<const Cell*> todo;
  for (const auto& c : cells) {
    if (completed(records / (cell_id(c) + ".json"))) {
      ++summary.skipped;
    } else {
      todo.push_back(&c);
    }
  }
  if (log && summary.skipped > 0) {
    log(std::to_string(summary.skipped) + " cells already complete");
  }

  std::mutex writer;
  std::exception_ptr io_failure;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const Cell& cell = *todo[i];
      const auto start = std::chrono::steady_clock::now();
      const json record = run_cell(grid, cell);
      const double seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      const bool ok = record["status"] == "ok";
      const std::string id = cell_id(cell);

      std::lock_guard lock(writer);
      try {
        write_file_atomic(records / (id + ".json"), record.dump(2) + "\n");
        write_file_atomic(timing / (id + ".timing.json"),
                          json{{"cell", id}, {"wall_seconds", seconds}}.dump(2) + "\n");
      } catch (...) {
        if (!io_failure) io_failure = std::current_exception();
        next = todo.size();
        return;
      }
      ok ? ++summary.completed : ++summary.failed;
      if (log) {
        std::ostringstream line;
        line << (ok ? "ok     " : "FAILED ") << id << " (" << seconds << " s)";
        if (!ok) line << ": " << record["error"].get<std::string>();
        log(line.str());
      }
    }
  };

  const int threads = std::max(1, std::min<int>(jobs > 0 ? jobs : grid.jobs,
                                                static_cast<int>(todo.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (io_failure) std::rethrow_exception(io_failure);
  return summary;
}

}  // namespace war
