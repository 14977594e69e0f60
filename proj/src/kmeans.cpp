#include "war/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "war/errors.hpp"
#include "war/random.hpp"

namespace war {
namespace {

Matrix plus_plus_init(const Matrix& points, int clusters, Rng& rng) {
  const Index n = points.rows();
  Matrix centers(clusters, points.cols());
  std::uniform_int_distribution<Index> pick(0, n - 1);
  centers.row(0) = points.row(pick(rng));

  Vector closest = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < clusters; ++c) {
    const double total = closest.sum();
    Index chosen = 0;
    if (total > 0.0) {
      double target = unit(rng) * total;
      chosen = n - 1;
      for (Index i = 0; i < n; ++i) {
        target -= closest(i);
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = points.row(chosen);
    closest = closest.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int clusters, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (clusters < 1 || clusters > points.rows()) {
    throw DomainError("cannot form " + std::to_string(clusters) + " clusters from " +
                      std::to_string(points.rows()) + " points");
  }
  Rng rng(seed);
  KMeansResult result;
  result.centers = plus_plus_init(points, clusters, rng);
  result.assignment.assign(static_cast<std::size_t>(points.rows()), 0);

  for (int it = 0; it < options.max_iterations; ++it) {
    for (Index i = 0; i < points.rows(); ++i) {
      Index best = 0;
      (result.centers.rowwise() - points.row(i)).rowwise().squaredNorm().minCoeff(&best);
      result.assignment[static_cast<std::size_t>(i)] = best;
    }
    Matrix sums = Matrix::Zero(clusters, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(clusters), 0);
    for (Index i = 0; i < points.rows(); ++i) {
      const Index c = result.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += points.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    double moved = 0.0;
    for (int c = 0; c < clusters; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      const auto updated = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      moved = std::max(moved, (updated - result.centers.row(c)).norm());
      result.centers.row(c) = updated;
    }
    result.iterations = it + 1;
    if (moved <= options.tolerance) break;
  }
  return result;
}

std::vector<Index> kmeans_seed(const Matrix& points, int count, std::uint64_t seed,
                               const KMeansOptions& options) {
  if (count < 1 || count > points.rows()) {
    throw DomainError("initial pool of " + std::to_string(count) + " from " +
                      std::to_string(points.rows()) + " points");
  }
  const KMeansResult km = kmeans(points, count, seed, options);
  std::vector<bool> used(static_cast<std::size_t>(points.rows()), false);
  std::vector<Index> chosen;
  std::vector<Index> order(static_cast<std::size_t>(points.rows()));
  for (int c = 0; c < count; ++c) {
    const Vector dist = (points.rowwise() - km.centers.row(c)).rowwise().squaredNorm();
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return dist(a) < dist(b); });
    for (Index row : order) {
      if (!used[static_cast<std::size_t>(row)]) {
        used[static_cast<std::size_t>(row)] = true;
        chosen.push_back(row);
        break;
      }
    }
  }
  return chosen;
}

}  // namespace war
