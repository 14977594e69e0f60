#include "war/baselines.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "war/errors.hpp"
#include "war/random.hpp"

namespace war {
namespace {

struct NamedStrategy {
  StrategyKind kind;
  std::string_view name;
};

constexpr NamedStrategy kNames[] = {
    {StrategyKind::Random, "random"},
    {StrategyKind::Disagreement, "disagreement"},
    {StrategyKind::GSx, "gsx"},
    {StrategyKind::IGS, "igs"},
    {StrategyKind::InfoDensityEuclidean, "euclidean"},
    {StrategyKind::InfoDensityCosine, "cosine"},
    {StrategyKind::WAR, "war"},
};

std::size_t batch_target(const PoolState& pool, int batch_size) {
  return std::min(static_cast<std::size_t>(std::max(batch_size, 0)), pool.unlabeled.size());
}

// Rows of U ordered by decreasing score, ties by increasing row.
std::vector<Index> top_rows(const std::vector<Index>& rows, const Vector& score,
                            std::size_t count) {
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double sa = score(static_cast<Index>(a));
    const double sb = score(static_cast<Index>(b));
    if (sa != sb) return sa > sb;
    return rows[a] < rows[b];
  });
  std::vector<Index> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(rows[order[i]]);
  return out;
}

std::vector<Index> full_sample_rows(const PoolState& pool) {
  std::vector<Index> rows = pool.labeled;
  rows.insert(rows.end(), pool.unlabeled.begin(), pool.unlabeled.end());
  rows.insert(rows.end(), pool.batch.begin(), pool.batch.end());
  return rows;
}

// Shared greedy loop of GSx and iGS: `criterion(position in U, min distance
// to the reference set)` is maximized, and `admit(row)` updates any state
// tied to the reference set once a row joins B.
template <typename Criterion, typename Admit>
std::vector<Index> greedy_select(const PoolState& pool, const Matrix& features,
                                 int batch_size, Criterion criterion, Admit admit) {
  const std::size_t target = batch_target(pool, batch_size);
  std::vector<Index> reference = pool.labeled;
  reference.insert(reference.end(), pool.batch.begin(), pool.batch.end());
  if (reference.empty()) {
    throw StateError("greedy sampling needs a non-empty labeled set");
  }
  std::vector<Index> candidates = pool.unlabeled;
  std::vector<double> nearest(candidates.size(), std::numeric_limits<double>::infinity());
  auto absorb = [&](Index ref) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      nearest[i] = std::min(nearest[i], (features.row(candidates[i]) - features.row(ref)).norm());
    }
  };
  for (Index ref : reference) absorb(ref);

  std::vector<Index> picked;
  for (std::size_t t = 0; t < target; ++t) {
    std::size_t best = 0;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const double v = criterion(candidates[i], nearest[i]);
      if (v > best_value || (v == best_value && candidates[i] < candidates[best])) {
        best = i;
        best_value = v;
      }
    }
    const Index row = candidates[best];
    picked.push_back(row);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
    nearest.erase(nearest.begin() + static_cast<std::ptrdiff_t>(best));
    absorb(row);
    admit(row);
  }
  return picked;
}

}  // namespace

std::string_view strategy_name(StrategyKind kind) {
  for (const auto& n : kNames) {
    if (n.kind == kind) return n.name;
  }
  return "unknown";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.kind;
  }
  return std::nullopt;
}

std::vector<Index> random_select(const PoolState& pool, int batch_size, std::uint64_t seed) {
  const std::size_t target = batch_target(pool, batch_size);
  std::vector<Index> rows = pool.unlabeled;
  Rng rng(seed);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < target; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, rows.size() - 1);
    std::swap(rows[i], rows[pick(rng)]);
  }
  rows.resize(target);
  return rows;
}

std::vector<Index> disagreement_select(const PoolState& pool, const Vector& uncertainty,
                                       int batch_size) {
  return top_rows(pool.unlabeled, gather(uncertainty, pool.unlabeled),
                  batch_target(pool, batch_size));
}

std::vector<Index> disagreement_select(const PoolState& pool, const Committee& committee,
                                       const Matrix& features, int batch_size) {
  const Vector s = committee_uncertainty(committee, gather_rows(features, pool.unlabeled));
  return top_rows(pool.unlabeled, s, batch_target(pool, batch_size));
}

std::vector<Index> gsx_select(const PoolState& pool, const Matrix& features, int batch_size) {
  return greedy_select(
      pool, features, batch_size, [](Index, double input_gap) { return input_gap; },
      [](Index) {});
}

std::vector<Index> igs_select(const PoolState& pool, const Matrix& features,
                              const Vector& predictions, const LabelOracle& labels,
                              int batch_size) {
  std::vector<double> outputs;
  for (Index row : pool.labeled) outputs.push_back(labels.label(row));
  for (Index row : pool.batch) outputs.push_back(predictions(row));
  return greedy_select(
      pool, features, batch_size,
      [&](Index row, double input_gap) {
        double output_gap = std::numeric_limits<double>::infinity();
        for (double y : outputs) {
          output_gap = std::min(output_gap, std::abs(predictions(row) - y));
        }
        return input_gap * output_gap;
      },
      [&](Index row) { outputs.push_back(predictions(row)); });
}

Vector information_density(const Matrix& full_sample, const Matrix& candidates,
                           Similarity similarity) {
  if (full_sample.rows() == 0) {
    throw DomainError("information density needs a non-empty sample");
  }
  Vector density(candidates.rows());
  const Vector sample_norms = full_sample.rowwise().norm();
  for (Index i = 0; i < candidates.rows(); ++i) {
    const auto x = candidates.row(i);
    if (similarity == Similarity::Euclidean) {
      density(i) = (1.0 / (1.0 + (full_sample.rowwise() - x).rowwise().norm().array())).mean();
    } else {
      const double xn = x.norm();
      double total = 0.0;
      for (Index j = 0; j < full_sample.rows(); ++j) {
        const double denom = xn * sample_norms(j);
        if (denom > 0.0) total += full_sample.row(j).dot(x) / denom;
      }
      density(i) = total / static_cast<double>(full_sample.rows());
    }
  }
  return density;
}

std::vector<Index> info_density_select(const PoolState& pool, const Vector& uncertainty,
                                       const Matrix& features, int batch_size,
                                       Similarity similarity) {
  const Matrix candidates = gather_rows(features, pool.unlabeled);
  const Vector density =
      information_density(gather_rows(features, full_sample_rows(pool)), candidates, similarity);
  const Vector score = gather(uncertainty, pool.unlabeled).cwiseProduct(density);
  return top_rows(pool.unlabeled, score, batch_target(pool, batch_size));
}

}  // namespace war
