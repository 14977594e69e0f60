#pragma once

#include <cstdint>
#include <vector>

#include "war/types.hpp"

namespace war {

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-6;  // on the largest center displacement
};

struct KMeansResult {
  Matrix centers;                 // clusters x d
  std::vector<Index> assignment;  // cluster of each point
  int iterations = 0;
};

/// Lloyd iterations from a k-means++ start. A cluster that loses all its
/// points keeps its previous center.
KMeansResult kmeans(const Matrix& points, int clusters, std::uint64_t seed,
                    const KMeansOptions& options = {});

/// Initial labeled pool: clusters the points into `count` groups and returns,
/// for each center in order, the row closest to it. When that row was already
/// taken by an earlier center the next-closest free row is used instead.
/// Throws DomainError unless 1 <= count <= points.rows().
std::vector<Index> kmeans_seed(const Matrix& points, int count, std::uint64_t seed,
                               const KMeansOptions& options = {});

}  // namespace war
