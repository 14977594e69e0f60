#include "war/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "war/bench.hpp"
#include "war/errors.hpp"

namespace war {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<RecordSummary> summarize_record(const json& record) {
  auto field = [&](const char* key) -> const json& {
    const auto it = record.find(key);
    if (it == record.end()) throw SchemaError(std::string("record lacks '") + key + "'");
    return *it;
  };
  if (field("status") != "ok") return std::nullopt;
  try {
    RecordSummary s;
    s.dataset = field("dataset").get<std::string>();
    s.strategy = field("strategy").get<std::string>();
    s.repetition = field("repetition").get<int>();
    for (const auto& p : field("curve")) {
      s.curve.push_back({p.at(0).get<int>(), p.at(1).get<double>()});
    }
    const json& metrics = field("metrics");
    s.auc = metrics.at("auc").get<double>();
    if (const auto it = metrics.find("rmse_at_fraction"); it != metrics.end() && !it->is_null()) {
      s.rmse_at_fraction = it->get<double>();
    }
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed record: ") + e.what());
  }
}

std::vector<json> load_records(const fs::path& records_dir) {
  if (!fs::is_directory(records_dir)) {
    throw Error("no records directory at " + records_dir.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(records_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<json> out;
  for (const auto& f : files) {
    std::ifstream in(f);
    try {
      out.push_back(json::parse(in));
    } catch (const json::parse_error& e) {
      throw SchemaError(f.string() + ": " + e.what());
    }
  }
  return out;
}

std::string MetricTable::lowest(const std::string& dataset) const {
  std::string best;
  double best_value = 0.0;
  for (const auto& s : strategies) {
    const auto it = cells.find({s, dataset});
    if (it == cells.end()) continue;
    if (best.empty() || it->second.mean < best_value) {
      best = s;
      best_value = it->second.mean;
    }
  }
  return best;
}

namespace {

Stat summarize(const std::vector<double>& values) {
  Stat s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / s.count;
  if (s.count > 1) {
    double sq = 0.0;
    for (double v : values) sq += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(sq / (s.count - 1));
  }
  return s;
}

int strategy_rank(const std::string& name) {
  int i = 0;
  for (auto kind : kAllStrategies) {
    if (strategy_name(kind) == name) return i;
    ++i;
  }
  return i;
}

std::string csv_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

std::string table_csv(const MetricTable& t, bool std_dev) {
  std::ostringstream out;
  out << "strategy";
  for (const auto& d : t.datasets) out << ',' << d;
  out << '\n';
  for (const auto& s : t.strategies) {
    out << s;
    for (const auto& d : t.datasets) {
      out << ',';
      const auto it = t.cells.find({s, d});
      if (it != t.cells.end()) out << csv_number(std_dev ? it->second.std : it->second.mean);
    }
    out << '\n';
  }
  if (!std_dev) {
    out << "lowest";
    for (const auto& d : t.datasets) out << ',' << t.lowest(d);
    out << '\n';
  }
  return out.str();
}

std::string table_markdown(const MetricTable& t, const std::string& title) {
  std::ostringstream out;
  out << "### " << title << "\n\n| strategy |";
  for (const auto& d : t.datasets) out << ' ' << d << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < t.datasets.size(); ++i) out << "---|";
  out << '\n';
  for (const auto& s : t.strategies) {
    out << "| " << s << " |";
    for (const auto& d : t.datasets) {
      const auto it = t.cells.find({s, d});
      if (it == t.cells.end()) {
        out << " - |";
        continue;
      }
      const std::string cell = format_number(it->second.mean) + " ± " + format_number(it->second.std);
      out << ' ' << (t.lowest(d) == s ? "**" + cell + "**" : cell) << " |";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

Report build_report(const std::vector<RecordSummary>& records) {
  std::set<std::string> dataset_set;
  std::set<std::string> strategy_set;
  std::map<std::pair<std::string, std::string>, std::vector<const RecordSummary*>> groups;
  for (const auto& r : records) {
    dataset_set.insert(r.dataset);
    strategy_set.insert(r.strategy);
    groups[{r.strategy, r.dataset}].push_back(&r);
  }
  std::vector<std::string> strategies(strategy_set.begin(), strategy_set.end());
  std::stable_sort(strategies.begin(), strategies.end(), [](const auto& a, const auto& b) {
    return strategy_rank(a) < strategy_rank(b);
  });
  const std::vector<std::string> datasets(dataset_set.begin(), dataset_set.end());

  Report report;
  report.rmse_at_fraction.strategies = report.auc.strategies = strategies;
  report.rmse_at_fraction.datasets = report.auc.datasets = datasets;

  for (const auto& s : strategies) {
    for (const auto& d : datasets) {
      const auto it = groups.find({s, d});
      if (it == groups.end()) continue;
      auto members = it->second;
      std::sort(members.begin(), members.end(),
                [](const auto* a, const auto* b) { return a->repetition < b->repetition; });

      std::vector<double> aucs;
      std::vector<double> rmses;
      for (const auto* m : members) {
        aucs.push_back(m->auc);
        if (m->rmse_at_fraction) rmses.push_back(*m->rmse_at_fraction);
      }
      report.auc.cells[{s, d}] = summarize(aucs);
      if (!rmses.empty()) report.rmse_at_fraction.cells[{s, d}] = summarize(rmses);

      std::size_t length = members.front()->curve.size();
      for (const auto* m : members) {
        std::size_t common = 0;
        while (common < std::min(length, m->curve.size()) &&
               m->curve[common].labeled_count == members.front()->curve[common].labeled_count) {
          ++common;
        }
        length = common;
      }
      MeanCurve curve{d, s, {}, static_cast<int>(members.size())};
      for (std::size_t i = 0; i < length; ++i) {
        double sum = 0.0;
        for (const auto* m : members) sum += m->curve[i].rmse;
        curve.points.push_back({members.front()->curve[i].labeled_count,
                                sum / static_cast<double>(members.size())});
      }
      report.curves.push_back(std::move(curve));
    }
  }
  return report;
}

void write_report(const Report& report, const fs::path& out_dir) {
  fs::create_directories(out_dir / "curves");
  write_text(out_dir / "rmse25.csv", table_csv(report.rmse_at_fraction, false));
  write_text(out_dir / "rmse25_std.csv", table_csv(report.rmse_at_fraction, true));
  write_text(out_dir / "auc.csv", table_csv(report.auc, false));
  write_text(out_dir / "auc_std.csv", table_csv(report.auc, true));
  write_text(out_dir / "tables.md",
             table_markdown(report.rmse_at_fraction, "Test RMSE at the labeled fraction") +
                 "\n" + table_markdown(report.auc, "Area under the learning curve") +
                 "\nCells show mean ± sample std over repetitions; the lowest mean per column is "
                 "in bold.\n");
  for (const auto& c : report.curves) {
    std::ostringstream out;
    out << "labeled_count,rmse\n";
    for (const auto& p : c.points) out << p.labeled_count << ',' << csv_number(p.rmse) << '\n';
    write_text(out_dir / "curves" / (c.dataset + "__" + c.strategy + ".csv"), out.str());
  }
}

}  // namespace war
