#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "war/dense_net.hpp"

namespace war {

/// Splits `x` into contiguous blocks of `group_size` entries and sorts each
/// block in decreasing order. Throws ShapeError unless group_size >= 1
/// divides x.size().
Vector groupsort(const Vector& x, int group_size);

/// Row-wise GroupSort of a batch, in place. When `perm` is given it receives
/// the source column of every output entry (same shape as `z`).
void groupsort_rows(Matrix& z, int group_size, Eigen::MatrixXi* perm = nullptr);

/// GroupSort network with a scalar output whose parameters satisfy
///
///   every row of the first weight matrix has Euclidean norm <= 1,
///   every row of each later weight matrix has absolute sum <= 1,
///   every bias entry lies in [-bias_bound, bias_bound],
///
/// once project_constraints() has been applied. Under these bounds the
/// network is 1-Lipschitz from (R^d, |.|_2) to (R, |.|).
class CriticNet {
 public:
  CriticNet() = default;

  /// Throws ShapeError unless every hidden layer is GroupSort(group_size),
  /// the output layer is a scalar Identity layer and group_size >= 2.
  CriticNet(DenseNet net, int group_size, double bias_bound);

  const DenseNet& net() const { return net_; }
  DenseNet& net() { return net_; }
  int group_size() const { return group_size_; }
  double bias_bound() const { return bias_bound_; }
  int input_dim() const { return net_.input_dim(); }

  double operator()(const Vector& x) const;
  Vector evaluate(const Matrix& batch) const;

 private:
  DenseNet net_;
  int group_size_ = 2;
  double bias_bound_ = 10.0;
};

struct CriticSpec {
  int input_dim = 1;
  std::vector<int> hidden{32, 32};
  int group_size = 2;
  double bias_bound = 10.0;
};

/// Seeded initialization followed by projection.
CriticNet make_critic(const CriticSpec& spec, std::uint64_t seed);

/// Moves every violating weight row to the nearest point of its norm ball
/// (a rescale for the Euclidean rows, a soft threshold for the absolute-sum
/// rows) and clamps biases.
/// Rows already inside their ball are untouched, so the map is idempotent.
void project_constraints(CriticNet& critic);

/// Largest |phi(x) - phi(y)| / |x - y|_2 over the given pairs. Throws
/// DomainError on an empty list or a pair with x == y.
double lipschitz_certificate(const CriticNet& critic,
                             std::span<const std::pair<Vector, Vector>> pairs);

struct ArchitectureBounds {
  double size = 0.0;
  double depth = 0.0;
};

/// Size and depth orders of a GroupSort(2) critic that approximates W1 to
/// within epsilon, taken with unit implied constants:
///   size  = (sqrt(d) / (epsilon - delta))^(d^2)
///   depth = d^2 * log2(4 sqrt(d) / (epsilon - delta))
/// Informational only.
/// Throws DomainError unless 0 < delta < epsilon and d >= 1.
ArchitectureBounds architecture_bounds(double epsilon, double delta, int d);

}  // namespace war
