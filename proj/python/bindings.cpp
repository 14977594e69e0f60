#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "war/bench.hpp"
#include "war/errors.hpp"
#include "war/kmeans.hpp"
#include "war/random.hpp"

namespace py = pybind11;

namespace {

war::StrategyKind strategy_from(const std::string& name) {
  const auto kind = war::parse_strategy(name);
  if (!kind) throw war::ConfigError("unknown strategy '" + name + "'");
  return *kind;
}

war::WarConfig config_from(const py::dict& options) {
  war::WarConfig c;
  for (const auto& [key_obj, value] : options) {
    const auto key = key_obj.cast<std::string>();
    if (key == "alpha") c.alpha = value.cast<double>();
    else if (key == "beta") c.beta = value.cast<double>();
    else if (key == "batch_size") c.batch_size = value.cast<int>();
    else if (key == "initial_size") c.initial_size = value.cast<int>();
    else if (key == "n_query") c.n_query = value.cast<int>();
    else if (key == "committee_size") c.committee_size = value.cast<int>();
    else if (key == "hidden") c.hidden = value.cast<std::vector<int>>();
    else if (key == "lr_estimator") c.lr_estimator = value.cast<double>();
    else if (key == "weight_decay") c.weight_decay = value.cast<double>();
    else if (key == "epochs") c.epochs = value.cast<int>();
    else if (key == "critic_hidden") c.critic_hidden = value.cast<std::vector<int>>();
    else if (key == "lr_critic") c.lr_critic = value.cast<double>();
    else if (key == "critic_initial_steps") c.critic_initial_steps = value.cast<int>();
    else if (key == "critic_steps_per_point") c.critic_steps_per_point = value.cast<int>();
    else throw war::ConfigError("unknown option '" + key + "'");
  }
  return c;
}

py::list curve_to_list(const war::LearningCurve& curve) {
  py::list out;
  for (const auto& p : curve.points) out.append(py::make_tuple(p.labeled_count, p.rmse));
  return out;
}

std::vector<war::CurvePoint> points_from(const std::vector<std::pair<int, double>>& raw) {
  std::vector<war::CurvePoint> points;
  for (const auto& [n, r] : raw) points.push_back({n, r});
  return points;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Wasserstein active regression core";

  py::register_exception<war::Error>(m, "WarError", PyExc_RuntimeError);

  m.def("strategies", [] {
    std::vector<std::string> names;
    for (auto k : war::kAllStrategies) names.emplace_back(war::strategy_name(k));
    return names;
  });

  m.def("groupsort", &war::groupsort, py::arg("x"), py::arg("group_size"),
        "Sort each consecutive block of `group_size` entries in decreasing order.");

  m.def("exact_w1_1d", [](std::vector<double> a, std::vector<double> b) {
    return war::exact_w1_1d(a, b);
  });
  m.def(
      "exact_w1_small",
      [](const war::Matrix& a, const war::Matrix& b, const std::string& metric) {
        return war::exact_w1_small(a, b, metric == "l1" ? war::GroundMetric::L1 : war::GroundMetric::L2);
      },
      py::arg("a"), py::arg("b"), py::arg("metric") = "l2");

  py::class_<war::CriticNet>(m, "Critic")
      .def(py::init([](int input_dim, std::vector<int> hidden, std::uint64_t seed) {
             return war::make_critic({input_dim, std::move(hidden), 2, 10.0}, seed);
           }),
           py::arg("input_dim"), py::arg("hidden") = std::vector<int>{32, 32},
           py::arg("seed") = 0)
      .def("__call__", [](const war::CriticNet& c, const war::Matrix& x) { return c.evaluate(x); })
      .def_property_readonly("input_dim", &war::CriticNet::input_dim);

  m.def(
      "train_critic",
      [](const war::CriticNet& critic, const war::Matrix& all, const war::Matrix& labeled,
         int steps, double lr) {
        war::CriticTrainer trainer(critic, lr);
        const double value = trainer.train(all, labeled, steps).value;
        return py::make_tuple(trainer.critic(), value);
      },
      py::arg("critic"), py::arg("all_points"), py::arg("labeled_points"), py::arg("steps"),
      py::arg("learning_rate") = 0.01,
      "Ascent on the dual objective; returns (trained critic, objective).");
  m.def("dual_objective", [](const war::CriticNet& c, const war::Matrix& all, const war::Matrix& labeled) {
    return war::dual_objective(c, all, labeled).value;
  });

  m.def(
      "kmeans_seed",
      [](const war::Matrix& points, int count, std::uint64_t seed) {
        return war::kmeans_seed(points, count, seed);
      },
      py::arg("points"), py::arg("count"), py::arg("seed") = 0);

  m.def("trapezoid_auc", [](const std::vector<std::pair<int, double>>& curve) {
    return war::trapezoid_auc(points_from(curve));
  });
  m.def(
      "rmse_at_fraction",
      [](const std::vector<std::pair<int, double>>& curve, double fraction, long train_size) {
        war::LearningCurve c;
        c.points = points_from(curve);
        const auto r = war::rmse_at_fraction(c, fraction, train_size);
        return py::make_tuple(r.rmse, r.labeled_count, r.overshoot);
      },
      py::arg("curve"), py::arg("fraction") = 0.25, py::arg("train_size"));

  m.def(
      "run_active_learning",
      [](const war::Matrix& features, const war::Vector& targets, const std::string& strategy,
         const py::dict& options, double train_ratio, std::uint64_t seed) {
        war::RawTable raw;
        raw.features = features;
        raw.targets = targets;
        for (war::Index j = 0; j < features.cols(); ++j) raw.feature_names.push_back("x" + std::to_string(j));
        raw.target_name = "y";
        const war::Dataset data = war::prepare_dataset("array", raw, train_ratio, war::mix64(seed));
        const war::RunSeeds seeds{war::derive_seed(seed, {"model"}), war::derive_seed(seed, {strategy})};
        const war::WarConfig config = config_from(options);
        const war::StrategyKind kind = strategy_from(strategy);
        war::LearningCurve curve;
        {
          py::gil_scoped_release release;
          curve = war::run_strategy(data, kind, config, seeds);
        }
        return curve_to_list(curve);
      },
      py::arg("features"), py::arg("targets"), py::arg("strategy") = "war",
      py::arg("options") = py::dict(), py::arg("train_ratio") = 0.8, py::arg("seed") = 0,
      "Scale and split (features, targets), run one strategy, return [(labeled, rmse), ...].");

  m.def(
      "run_grid",
      [](const std::string& config_path, const std::string& out_dir, int jobs) {
        const auto grid = war::load_grid_config(config_path);
        war::GridSummary s;
        {
          py::gil_scoped_release release;
          s = war::run_grid(grid, out_dir, jobs);
        }
        return py::dict(py::arg("completed") = s.completed, py::arg("skipped") = s.skipped,
                        py::arg("failed") = s.failed);
      },
      py::arg("config"), py::arg("out"), py::arg("jobs") = 0);
}
