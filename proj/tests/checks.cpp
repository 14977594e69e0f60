#include "checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "war/bench.hpp"
#include "war/errors.hpp"
#include "war/random.hpp"
#include "war/report.hpp"
#include "war/wasserstein.hpp"

namespace checks {

namespace fs = std::filesystem;
using war::Index;
using war::Matrix;
using war::Vector;

namespace {

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Result verdict(bool ok, std::string detail) {
  Result r;
  r.status = ok ? Status::Pass : Status::Fail;
  r.detail = std::move(detail);
  return r;
}

// ---------------------------------------------------------------- C1

Result lipschitz_certificate_check() {
  std::mt19937_64 rng(0xC1);
  double worst = 0.0;
  double worst_library = 0.0;
  for (int net = 0; net < 20; ++net) {
    const int d = 1 + (net * 12) / 19;
    war::CriticNet critic = war::make_critic({d, {32, 32}, 2, 10.0}, war::mix64(1000 + net));
    if (net % 2 == 1) {
      // Inflate the initialization so every constraint is active before the
      // projection runs again.
      for (auto& layer : critic.net().layers()) {
        layer.weight *= 6.0;
        layer.bias *= 6.0;
      }
      war::project_constraints(critic);
    }
    std::vector<std::pair<Vector, Vector>> pairs;
    pairs.reserve(10000);
    const Matrix xs = oracle::uniform_points(10000, d, rng);
    const Matrix ys = oracle::uniform_points(10000, d, rng);
    for (Index i = 0; i < 10000; ++i) {
      const auto x = oracle::row(xs, i);
      const auto y = oracle::row(ys, i);
      const double fx = oracle::forward(critic.net(), x)[0];
      const double fy = oracle::forward(critic.net(), y)[0];
      worst = std::max(worst, std::abs(fx - fy) / oracle::euclid(x, y));
      pairs.emplace_back(xs.row(i).transpose(), ys.row(i).transpose());
    }
    worst_library = std::max(worst_library, war::lipschitz_certificate(critic, pairs));
  }
  const bool ok = worst <= 1.0 + 1e-9 && worst_library <= 1.0 + 1e-9;
  return verdict(ok, fmt("max ratio %.12f (library certificate %.12f), bound 1+1e-9", worst,
                         worst_library));
}

// ---------------------------------------------------------------- C2

// Smallest distance of any ReLU pre-activation from 0 or of any GroupSort
// pair from a tie, over the batch. Finite differences are only meaningful
// away from those kinks.
double kink_margin(const war::DenseNet& net, const Matrix& batch) {
  double margin = std::numeric_limits<double>::infinity();
  for (Index r = 0; r < batch.rows(); ++r) {
    oracle::Vec a = oracle::row(batch, r);
    for (const auto& layer : net.layers()) {
      oracle::Vec z(static_cast<std::size_t>(layer.out_dim()));
      for (Index o = 0; o < layer.out_dim(); ++o) {
        double s = layer.bias(o);
        for (Index c = 0; c < layer.in_dim(); ++c) s += layer.weight(o, c) * a[static_cast<std::size_t>(c)];
        z[static_cast<std::size_t>(o)] = s;
      }
      if (layer.activation == war::Activation::ReLU) {
        for (double v : z) margin = std::min(margin, std::abs(v));
        for (double& v : z) v = std::max(v, 0.0);
      } else if (layer.activation == war::Activation::GroupSort) {
        for (std::size_t g = 0; g < z.size(); g += 2) margin = std::min(margin, std::abs(z[g] - z[g + 1]));
        z = oracle::groupsort(z, layer.group_size);
      }
      a = z;
    }
  }
  return margin;
}

Result gradient_check() {
  std::mt19937_64 rng(0xC2);
  std::uniform_int_distribution<int> pick(0, 1);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> depth(1, 2);
  std::uniform_int_distribution<int> half_width(1, 8);
  std::normal_distribution<double> normal(0.0, 1.0);

  double worst = 0.0;
  long checked = 0;
  int relu_nets = 0;
  int groupsort_nets = 0;
  for (int trial = 0; trial < 100; ++trial) {
    war::NetSpec spec;
    spec.input_dim = dim(rng);
    const int hidden = depth(rng);
    bool has_relu = false;
    bool has_groupsort = false;
    for (int l = 0; l < hidden; ++l) {
      const bool gs = (trial % 3 == 0) ? false : (trial % 3 == 1) ? true : pick(rng) == 1;
      spec.layers.push_back({2 * half_width(rng), gs ? war::Activation::GroupSort : war::Activation::ReLU, 2});
      (gs ? has_groupsort : has_relu) = true;
    }
    spec.layers.push_back({dim(rng) > 2 ? 2 : 1, war::Activation::Identity, 2});
    relu_nets += has_relu;
    groupsort_nets += has_groupsort;

    war::DenseNet net = war::init_net(spec, war::mix64(2000 + trial));
    for (auto& layer : net.layers()) {
      for (Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = 0.3 * normal(rng);
    }
    const int batch_size = 3;
    Matrix batch(batch_size, spec.input_dim);
    do {
      for (Index i = 0; i < batch.size(); ++i) batch.data()[i] = normal(rng);
    } while (kink_margin(net, batch) < 1e-3);

    Matrix upstream(batch_size, net.output_dim());
    for (Index i = 0; i < upstream.size(); ++i) upstream.data()[i] = normal(rng);

    war::ForwardTape tape;
    net.forward(batch, tape);
    const war::Gradients grads = net.backward(tape, upstream);

    Matrix probe = batch;
    auto loss = [&] { return (net.forward(probe).array() * upstream.array()).sum(); };
    auto compare = [&](double analytic, double numeric) {
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
      ++checked;
    };
    const double h = 1e-6;
    for (std::size_t l = 0; l < net.depth(); ++l) {
      auto& layer = net.layers()[l];
      for (Index i = 0; i < layer.weight.size(); ++i) {
        compare(grads.weight[l].data()[i], oracle::central_difference(loss, layer.weight.data()[i], h));
      }
      for (Index i = 0; i < layer.bias.size(); ++i) {
        compare(grads.bias[l](i), oracle::central_difference(loss, layer.bias(i), h));
      }
    }
    for (Index i = 0; i < probe.size(); ++i) {
      compare(grads.input.data()[i], oracle::central_difference(loss, probe.data()[i], h));
    }
  }
  std::ostringstream detail;
  detail << "max relative error " << worst << " over " << checked << " gradients ("
         << relu_nets << " nets with ReLU, " << groupsort_nets << " with GroupSort), bound 1e-4";
  return verdict(worst <= 1e-4, detail.str());
}

// ---------------------------------------------------------------- C3

Result dual_tightness_1d() {
  Matrix all(50, 1);
  for (int i = 0; i < 50; ++i) all(i, 0) = i / 49.0;
  const Matrix labeled = all.topRows(25);
  std::vector<double> a(all.data(), all.data() + 50);
  std::vector<double> b(labeled.data(), labeled.data() + 25);
  const double exact = war::exact_w1_1d(a, b);
  const double reference = oracle::cdf_w1_1d(a, b);

  war::CriticTrainer trainer(war::make_critic({1, {32, 32}, 2, 10.0}, war::mix64(0xC3)), 0.01);
  const double dual = trainer.train(all, labeled, 2000).value;
  const bool oracle_agrees = std::abs(exact - reference) <= 1e-12;
  const bool ok = oracle_agrees && dual >= 0.8 * exact && dual <= exact + 1e-3;
  return verdict(ok, fmt("W*=%.6f (CDF oracle %.6f), dual %.6f, band [0.8 W*, W*+1e-3]", exact,
                         reference, dual));
}

// ---------------------------------------------------------------- C4

Result dual_lower_bound_2d() {
  std::mt19937_64 rng(0xC4);
  int above_bound = 0;
  int tight = 0;
  double worst_excess = -1.0;
  double worst_ratio = 2.0;
  double oracle_gap = 0.0;
  for (int instance = 0; instance < 20; ++instance) {
    const Matrix p = oracle::uniform_points(8, 2, rng);
    const Matrix q = oracle::uniform_points(8, 2, rng);
    const double exact = war::exact_w1_small(p, q, war::GroundMetric::L2);
    std::vector<oracle::Vec> pa;
    std::vector<oracle::Vec> qa;
    for (Index i = 0; i < 8; ++i) {
      pa.push_back(oracle::row(p, i));
      qa.push_back(oracle::row(q, i));
    }
    oracle_gap = std::max(oracle_gap, std::abs(exact - oracle::brute_force_w1(pa, qa, false)));

    war::CriticTrainer trainer(war::make_critic({2, {32, 32}, 2, 10.0}, war::mix64(4000 + instance)),
                               0.01);
    const double dual = trainer.train(p, q, 2000).value;
    worst_excess = std::max(worst_excess, dual - exact);
    worst_ratio = std::min(worst_ratio, dual / exact);
    above_bound += dual > exact + 1e-3;
    tight += dual >= 0.6 * exact;
  }
  const bool ok = above_bound == 0 && tight >= 16 && oracle_gap <= 1e-9;
  std::ostringstream detail;
  detail << tight << "/20 instances at >= 0.6 W1 (need 16), " << above_bound
         << " above W1+1e-3, worst dual-W1 " << worst_excess << ", worst ratio " << worst_ratio
         << ", exact vs brute force " << oracle_gap;
  return verdict(ok, detail.str());
}

// ---------------------------------------------------------------- C5

Result groupsort_example() {
  const std::vector<double> input{9, 6, 10, 8, 6, 10, 7, 9, 5, 9, 6, 4, 5, 8, 8};
  const std::vector<double> expected{10, 9, 6, 10, 8, 6, 9, 7, 5, 9, 6, 4, 8, 8, 5};
  const Vector out = war::groupsort(Eigen::Map<const Vector>(input.data(), 15), 3);
  bool ok = out.size() == 15;
  std::ostringstream got;
  for (Index i = 0; i < out.size(); ++i) {
    ok = ok && out(i) == expected[static_cast<std::size_t>(i)];
    got << (i ? "," : "") << out(i);
  }
  ok = ok && oracle::groupsort(input, 3) == expected;
  return verdict(ok, "output (" + got.str() + ")");
}

// ---------------------------------------------------------------- C6

war::Dataset synthetic_dataset(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 0.05);
  war::RawTable raw;
  raw.feature_names = {"x0", "x1", "x2"};
  raw.target_name = "y";
  raw.features.resize(100, 3);
  raw.targets.resize(100);
  for (Index i = 0; i < 100; ++i) {
    for (Index j = 0; j < 3; ++j) raw.features(i, j) = u(rng);
    raw.targets(i) = std::sin(3.0 * raw.features(i, 0)) + raw.features(i, 1) * raw.features(i, 2) +
                     noise(rng);
  }
  return war::prepare_dataset("synthetic", raw, 0.8, war::mix64(seed));
}

Result degeneration_equivalence() {
  const war::Dataset data = synthetic_dataset(0xC6);
  war::WarConfig config;
  config.alpha = 0.0;
  config.beta = 0.0;
  config.initial_size = 4;
  config.batch_size = 4;
  config.n_query = 12;
  const war::RunSeeds seeds{0x5EED, 0xBEEF};
  war::ActiveLearner war_run(data, war::StrategyKind::WAR, config, seeds);
  war::ActiveLearner baseline(data, war::StrategyKind::Disagreement, config, seeds);
  war_run.seed_pool();
  baseline.seed_pool();
  bool same = war_run.pool().labeled == baseline.pool().labeled;
  int rounds = 0;
  Index queried = 0;
  const Matrix probe = war::gather_rows(data.features, data.train);
  for (; same && rounds < config.n_query; ++rounds) {
    for (int m = 0; m < config.committee_size; ++m) {
      same = same && war_run.committee().members[static_cast<std::size_t>(m)].forward(probe) ==
                         baseline.committee().members[static_cast<std::size_t>(m)].forward(probe);
    }
    const auto a = war_run.run_round();
    const auto b = baseline.run_round();
    same = same && a.batch == b.batch;
    queried += static_cast<Index>(a.batch.size());
  }
  std::ostringstream detail;
  detail << rounds << " rounds, " << queried << " queried indices, sequences "
         << (same ? "identical" : "differ");
  return verdict(same && rounds == config.n_query, detail.str());
}

// ---------------------------------------------------------------- C7, C8, C10

bool dataset_available(const Options& o, const war::DatasetPreset& p) {
  return fs::exists(o.data_dir / p.file);
}

war::GridConfig base_grid(const Options& o) {
  war::GridConfig grid;
  grid.data_dir = o.data_dir;
  grid.master_seed = 20211;
  grid.repetitions = 5;
  return grid;
}

std::vector<war::RecordSummary> run_fresh_grid(const war::GridConfig& grid, const fs::path& dir,
                                               int jobs) {
  fs::remove_all(dir);
  const auto summary = war::run_grid(grid, dir, jobs);
  if (summary.failed > 0) {
    throw war::Error(std::to_string(summary.failed) + " grid cells failed under " + dir.string());
  }
  std::vector<war::RecordSummary> out;
  for (const auto& r : war::load_records(dir / "records")) {
    if (auto s = war::summarize_record(r)) out.push_back(*s);
  }
  return out;
}

Result concrete_table_value(const Options& o) {
  const auto preset = *war::find_preset("concrete_slump");
  if (!dataset_available(o, preset)) {
    Result r;
    r.status = Status::Skip;
    r.detail = "dataset file " + (o.data_dir / preset.file).string() +
               " is not present; run scripts/fetch_datasets.py with network access";
    return r;
  }
  war::GridConfig grid = base_grid(o);
  grid.datasets = {preset};
  grid.strategies = {war::StrategyKind::WAR};
  const auto report = war::build_report(run_fresh_grid(grid, o.work_dir / "c7", 1));
  const auto& cell = report.rmse_at_fraction.cells.at({"war", "concrete_slump"});
  const double target = 6.15;
  const bool ok = cell.count == 5 && std::abs(cell.mean - target) <= 0.3 * target;
  return verdict(ok, fmt("mean RMSE at 25%% = %.4f (std %.4f), band [%.3f, %.3f]", cell.mean,
                         cell.std, 0.7 * target) +
                         fmt(" upper %.3f", 1.3 * target));
}

Result war_beats_disagreement(const Options& o) {
  war::GridConfig grid = base_grid(o);
  std::vector<std::string> missing;
  for (const auto& name : war::preset_names()) {
    const auto p = *war::find_preset(name);
    if (dataset_available(o, p)) {
      grid.datasets.push_back(p);
    } else {
      missing.push_back(name);
    }
  }
  if (grid.datasets.empty()) {
    Result r;
    r.status = Status::Skip;
    r.detail = "no benchmark dataset present under " + o.data_dir.string();
    return r;
  }
  grid.strategies = {war::StrategyKind::WAR, war::StrategyKind::Disagreement};
  const auto report = war::build_report(run_fresh_grid(grid, o.work_dir / "c8", 1));

  const int available = static_cast<int>(grid.datasets.size());
  const int needed = static_cast<int>(std::ceil(4.0 * available / 5.0 - 1e-12));
  int wins = 0;
  std::ostringstream detail;
  for (const auto& d : grid.datasets) {
    const auto& w = report.auc.cells.at({"war", d.name});
    const auto& s = report.auc.cells.at({"disagreement", d.name});
    wins += w.mean < s.mean;
    detail << d.name << ": AUC war " << war::format_number(w.mean) << " vs disagreement "
           << war::format_number(s.mean) << "; ";
  }
  detail << "wins " << wins << "/" << available << " (need " << needed << ")";
  if (!missing.empty()) {
    detail << "; unavailable:";
    for (const auto& m : missing) detail << ' ' << m;
  }
  return verdict(wins >= needed, detail.str());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Result determinism(const Options& o) {
  const fs::path csv = o.work_dir / "c10_data" / "synthetic.csv";
  fs::create_directories(csv.parent_path());
  {
    const war::Dataset d = synthetic_dataset(0xC10);
    std::ofstream out(csv);
    out.precision(17);
    out << "x0,x1,x2,y\n";
    for (Index i = 0; i < d.features.rows(); ++i) {
      out << d.features(i, 0) << ',' << d.features(i, 1) << ',' << d.features(i, 2) << ','
          << d.targets(i) << '\n';
    }
  }
  const std::string config_text = R"({
    "data_dir": "c10_data",
    "datasets": [{"name": "synthetic", "file": "synthetic.csv", "target": "y",
                  "initial_size": 4, "batch_size": 4, "n_query": 4, "alpha": 1, "beta": 2}],
    "strategies": "all",
    "training": {"epochs": 30},
    "critic": {"initial_steps": 60, "steps_per_point": 10},
    "grid": {"repetitions": 2, "master_seed": 77}
  })";
  const war::GridConfig grid =
      war::GridConfig::from_json(nlohmann::json::parse(config_text), o.work_dir);
  const fs::path first = o.work_dir / "c10_first";
  const fs::path second = o.work_dir / "c10_second";
  fs::remove_all(first);
  fs::remove_all(second);
  const auto s1 = war::run_grid(grid, first, 1);
  const auto s2 = war::run_grid(grid, second, 2);

  int compared = 0;
  int differing = 0;
  for (const auto& entry : fs::directory_iterator(first / "records")) {
    const fs::path twin = second / "records" / entry.path().filename();
    ++compared;
    differing += !fs::exists(twin) || slurp(entry.path()) != slurp(twin);
  }
  const int expected = static_cast<int>(war::grid_cells(grid).size());
  const bool ok = s1.failed == 0 && s2.failed == 0 && compared == expected && differing == 0;
  std::ostringstream detail;
  detail << compared << "/" << expected << " records compared (serial vs 2 workers), " << differing
         << " differ";
  return verdict(ok, detail.str());
}

// ---------------------------------------------------------------- C9

Result metric_plumbing() {
  using war::CurvePoint;
  std::vector<std::string> failures;
  auto expect = [&](bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  };
  expect(war::trapezoid_auc(std::vector<CurvePoint>{{0, 1.0}, {1, 1.0}}) == 1.0, "constant curve");
  expect(war::trapezoid_auc(std::vector<CurvePoint>{{0, 0.0}, {2, 2.0}}) == 2.0, "triangle");
  expect(war::trapezoid_auc(std::vector<CurvePoint>{{0, 1.0}, {1, 3.0}, {3, 0.0}}) == 5.0,
         "three-point curve");
  expect(war::trapezoid_auc(std::vector<CurvePoint>{{8, 2.5}, {16, 2.5}, {40, 2.5}}) == 2.5 * 32,
         "constant over uneven grid");

  war::LearningCurve exact;
  exact.points = {{8, 9.0}, {50, 7.0}, {100, 5.0}, {150, 4.0}};
  const auto hit = war::rmse_at_fraction(exact, 0.25, 400);
  expect(hit.rmse == 5.0 && hit.labeled_count == 100 && !hit.overshoot, "exact 25% point");

  war::LearningCurve over;
  over.points = {{8, 9.0}, {96, 6.0}, {104, 5.5}, {112, 5.0}};
  const auto first = war::rmse_at_fraction(over, 0.25, 400);
  expect(first.rmse == 5.5 && first.labeled_count == 104 && first.overshoot &&
             first.fraction == 0.26,
         "first point at or past 25% (26%, flagged)");

  war::LearningCurve short_curve;
  short_curve.points = {{8, 9.0}, {40, 7.0}};
  bool raised = false;
  try {
    war::rmse_at_fraction(short_curve, 0.25, 400);
  } catch (const war::ReportingError& e) {
    raised = e.max_fraction() == 0.1;
  }
  expect(raised, "unreached fraction raises with the max fraction");

  expect(war::rounds_to_fraction(404, 8, 8, 0.25) == 12, "Boston preset reaches 101 at round 12");
  bool domain = false;
  try {
    war::trapezoid_auc(std::vector<CurvePoint>{{0, 1.0}});
  } catch (const war::DomainError&) {
    domain = true;
  }
  expect(domain, "single point raises");

  std::string detail = "9 constructed cases";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return verdict(failures.empty(), detail);
}

}  // namespace

std::string status_text(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    case Status::Skip: return "SKIP";
  }
  return "FAIL";
}

std::string format_line(const Result& r) {
  std::ostringstream out;
  out << status_text(r.status) << "  C" << r.criterion << "  " << r.title << "  " << r.detail
      << "  (" << war::format_number(r.seconds) << " s)";
  return out.str();
}

Result run_criterion(int criterion, const Options& options) {
  static const char* titles[] = {
      "",
      "Lipschitz certificate of projected critics",
      "gradients match central differences",
      "1D dual objective close to exact W1",
      "2D dual objective bounded by exact W1",
      "GroupSort worked example",
      "WAR with alpha=beta=0 queries like disagreement",
      "Concrete Slump RMSE at 25% within 30% of 6.15",
      "WAR AUC below disagreement AUC",
      "AUC and RMSE-at-fraction plumbing",
      "byte-identical grid records",
  };
  Result r;
  const auto start = std::chrono::steady_clock::now();
  try {
    fs::create_directories(options.work_dir);
    switch (criterion) {
      case 1: r = lipschitz_certificate_check(); break;
      case 2: r = gradient_check(); break;
      case 3: r = dual_tightness_1d(); break;
      case 4: r = dual_lower_bound_2d(); break;
      case 5: r = groupsort_example(); break;
      case 6: r = degeneration_equivalence(); break;
      case 7: r = concrete_table_value(options); break;
      case 8: r = war_beats_disagreement(options); break;
      case 9: r = metric_plumbing(); break;
      case 10: r = determinism(options); break;
      default:
        r.status = Status::Fail;
        r.detail = "no criterion " + std::to_string(criterion);
    }
  } catch (const std::exception& e) {
    r.status = Status::Fail;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.criterion = criterion;
  r.title = criterion >= 1 && criterion <= kCriterionCount ? titles[criterion] : "unknown";
  return r;
}

}  // namespace checks
