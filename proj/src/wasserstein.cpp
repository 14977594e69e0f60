#include "war/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "war/errors.hpp"

namespace war {
namespace {

void require_nonempty(const Matrix& all_points, const Matrix& labeled_points) {
  if (all_points.rows() == 0 || labeled_points.rows() == 0) {
    throw DomainError("dual objective needs two non-empty point sets");
  }
  if (all_points.cols() != labeled_points.cols()) {
    throw ShapeError("point sets differ in dimension");
  }
}

// Residual-graph min-cost flow with integer capacities and real costs.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : adj_(nodes) {}

  int add_edge(int from, int to, long capacity, double cost) {
    adj_[from].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({to, capacity, cost});
    adj_[to].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({from, 0, -cost});
    return static_cast<int>(edges_.size()) - 2;
  }

  long flow_on(int edge) const { return edges_[edge ^ 1].capacity; }

  // Successive shortest paths; Bellman-Ford handles the negative residual
  // costs. Returns the total flow pushed.
  long run(int source, int sink, long demand) {
    const int n = static_cast<int>(adj_.size());
    long pushed = 0;
    std::vector<double> dist(n);
    std::vector<int> via(n);
    while (pushed < demand) {
      std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
      std::fill(via.begin(), via.end(), -1);
      dist[source] = 0.0;
      for (int round = 0; round < n; ++round) {
        bool changed = false;
        for (int u = 0; u < n; ++u) {
          if (!std::isfinite(dist[u])) continue;
          for (int e : adj_[u]) {
            const Edge& edge = edges_[e];
            if (edge.capacity <= 0) continue;
            const double candidate = dist[u] + edge.cost;
            if (candidate < dist[edge.to] - 1e-13) {
              dist[edge.to] = candidate;
              via[edge.to] = e;
              changed = true;
            }
          }
        }
        if (!changed) break;
      }
      if (via[sink] < 0) break;
      long bottleneck = demand - pushed;
      for (int v = sink; v != source; v = edges_[via[v] ^ 1].to) {
        bottleneck = std::min(bottleneck, edges_[via[v]].capacity);
      }
      for (int v = sink; v != source; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].capacity -= bottleneck;
        edges_[via[v] ^ 1].capacity += bottleneck;
      }
      pushed += bottleneck;
    }
    return pushed;
  }

 private:
  struct Edge {
    int to;
    long capacity;
    double cost;
  };
  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
};

}  // namespace

DualObjectiveValue dual_objective(const CriticNet& critic, const Matrix& all_points,
                                  const Matrix& labeled_points) {
  require_nonempty(all_points, labeled_points);
  DualObjectiveValue v;
  v.mean_all = critic.evaluate(all_points).mean();
  v.mean_labeled = critic.evaluate(labeled_points).mean();
  v.value = std::abs(v.mean_all - v.mean_labeled);
  return v;
}

CriticTrainer::CriticTrainer(CriticNet critic, double learning_rate)
    : critic_(std::move(critic)) {
  if (!(learning_rate > 0.0)) {
    throw DomainError("critic learning rate must be positive");
  }
  AdamConfig config;
  config.learning_rate = learning_rate;
  optimizer_ = AdamState::for_net(critic_.net(), config);
}

DualObjectiveValue CriticTrainer::train(const Matrix& all_points,
                                        const Matrix& labeled_points, int steps,
                                        std::vector<double>* trace) {
  if (steps < 1) {
    throw DomainError("critic training needs at least one step");
  }
  require_nonempty(all_points, labeled_points);

  const Index n = all_points.rows();
  const Index m = labeled_points.rows();
  Matrix stacked(n + m, all_points.cols());
  stacked.topRows(n) = all_points;
  stacked.bottomRows(m) = labeled_points;
  // d objective / d phi(point): +1/n on the full sample, -1/m on the labeled.
  Matrix weights(n + m, 1);
  weights.topRows(n).setConstant(1.0 / static_cast<double>(n));
  weights.bottomRows(m).setConstant(-1.0 / static_cast<double>(m));
  const Matrix descent_upstream = -weights;

  if (!oriented_) {
    const auto start = dual_objective(critic_, all_points, labeled_points);
    if (start.mean_all - start.mean_labeled < 0.0) {
      Layer& out = critic_.net().layers().back();
      out.weight = -out.weight;
      out.bias = -out.bias;
    }
    oriented_ = true;
  }

  ForwardTape tape;
  for (int s = 0; s < steps; ++s) {
    const Matrix phi = critic_.net().forward(stacked, tape);
    const double objective = weights.col(0).dot(phi.col(0));
    if (!std::isfinite(objective)) {
      throw NumericError("critic objective is not finite", -1);
    }
    if (trace != nullptr && s > 0) {
      trace->push_back(objective);
    }
    adam_step(critic_.net(), critic_.net().backward(tape, descent_upstream), optimizer_);
    project_constraints(critic_);
  }

  const Vector phi = critic_.evaluate(stacked);
  DualObjectiveValue result;
  result.mean_all = phi.head(n).mean();
  result.mean_labeled = phi.tail(m).mean();
  result.value = std::abs(result.mean_all - result.mean_labeled);
  if (!std::isfinite(result.value)) {
    throw NumericError("critic objective is not finite", -1);
  }
  if (trace != nullptr) {
    trace->push_back(result.mean_all - result.mean_labeled);
  }
  return result;
}

CriticNet train_critic(CriticNet critic, const Matrix& all_points,
                       const Matrix& labeled_points, int steps, double learning_rate) {
  CriticTrainer trainer(std::move(critic), learning_rate);
  trainer.train(all_points, labeled_points, steps);
  return trainer.critic();
}

double exact_w1_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw DomainError("exact_w1_1d needs two non-empty samples");
  }
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  // Quantile levels are i/n and j/m; compare them as (i*m) vs (j*n) to stay
  // exact while walking both step functions.
  const auto n = static_cast<long long>(sa.size());
  const auto m = static_cast<long long>(sb.size());
  const double total = static_cast<double>(n * m);
  long long i = 0, j = 0, level = 0;  // level in units of 1/(n*m)
  double cost = 0.0;
  while (i < n && j < m) {
    const long long next_a = (i + 1) * m;
    const long long next_b = (j + 1) * n;
    const long long next = std::min(next_a, next_b);
    cost += static_cast<double>(next - level) * std::abs(sa[i] - sb[j]);
    level = next;
    if (next_a == next) ++i;
    if (next_b == next) ++j;
  }
  return cost / total;
}

double exact_w1_small(const Matrix& a, const Matrix& b, GroundMetric metric) {
  const Index n = a.rows();
  const Index m = b.rows();
  if (n == 0 || m == 0) {
    throw DomainError("exact_w1_small needs two non-empty samples");
  }
  if (n > kExactTransportCap || m > kExactTransportCap) {
    throw DomainError("exact_w1_small is capped at " +
                      std::to_string(kExactTransportCap) + " points per side");
  }
  if (a.cols() != b.cols()) {
    throw ShapeError("samples differ in dimension");
  }

  // Scale masses 1/n and 1/m to the integers m and n.
  const int source = 0;
  const int sink = static_cast<int>(n + m + 1);
  MinCostFlow flow(static_cast<int>(n + m + 2));
  std::vector<int> arcs(static_cast<std::size_t>(n * m));
  Matrix cost(n, m);
  for (Index i = 0; i < n; ++i) {
    flow.add_edge(source, static_cast<int>(1 + i), static_cast<long>(m), 0.0);
    for (Index j = 0; j < m; ++j) {
      const auto diff = a.row(i) - b.row(j);
      cost(i, j) = metric == GroundMetric::L2 ? diff.norm() : diff.lpNorm<1>();
      arcs[static_cast<std::size_t>(i * m + j)] =
          flow.add_edge(static_cast<int>(1 + i), static_cast<int>(1 + n + j),
                        static_cast<long>(n * m), cost(i, j));
    }
  }
  for (Index j = 0; j < m; ++j) {
    flow.add_edge(static_cast<int>(1 + n + j), sink, static_cast<long>(n), 0.0);
  }
  flow.run(source, sink, static_cast<long>(n * m));

  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) {
      total += static_cast<double>(flow.flow_on(arcs[static_cast<std::size_t>(i * m + j)])) *
               cost(i, j);
    }
  }
  return total / static_cast<double>(n * m);
}

}  // namespace war
