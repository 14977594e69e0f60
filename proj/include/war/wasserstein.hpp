#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "war/adam.hpp"
#include "war/groupsort.hpp"

namespace war {

/// |mean phi over the full sample - mean phi over the labeled sample|.
struct DualObjectiveValue {
  double value = 0.0;
  double mean_all = 0.0;
  double mean_labeled = 0.0;
};

/// Evaluates the Kantorovich-Rubinstein dual objective of `critic` between
/// the empirical measures of `all_points` and `labeled_points` (one point
/// per row). Throws DomainError when either set is empty.
DualObjectiveValue dual_objective(const CriticNet& critic, const Matrix& all_points,
                                  const Matrix& labeled_points);

/// Gradient ascent on mean_all - mean_labeled with Adam, projecting the
/// critic back onto its constraint set after every step.
///
/// The sign of the objective is fixed on the first call: if the untrained
/// critic gives mean_all < mean_labeled the output layer is negated, which
/// keeps the constraint set and turns the objective non-negative. From then
/// on the trainer always ascends mean_all - mean_labeled, so phi is large
/// where the full sample has more mass than the labeled one. Adam moments
/// persist across calls, which makes successive calls a warm continuation.
class CriticTrainer {
 public:
  CriticTrainer(CriticNet critic, double learning_rate);

  /// Runs `steps` ascent steps and returns the objective at the final
  /// iterate. When `trace` is given, the objective after every step is
  /// appended to it. Throws DomainError for steps < 1 or empty sets and
  /// NumericError when the objective stops being finite.
  DualObjectiveValue train(const Matrix& all_points, const Matrix& labeled_points,
                           int steps, std::vector<double>* trace = nullptr);

  const CriticNet& critic() const { return critic_; }
  const AdamState& optimizer() const { return optimizer_; }
  bool oriented() const { return oriented_; }
  std::int64_t steps_taken() const { return optimizer_.step_count; }

 private:
  CriticNet critic_;
  AdamState optimizer_;
  bool oriented_ = false;
};

/// One-shot training from a fresh optimizer state.
CriticNet train_critic(CriticNet critic, const Matrix& all_points,
                       const Matrix& labeled_points, int steps, double learning_rate);

/// Exact W1 between two 1D empirical measures with uniform weights,
/// integrating |F_a^-1(t) - F_b^-1(t)| over t in [0, 1]. Throws DomainError
/// on an empty sample.
double exact_w1_1d(std::span<const double> a, std::span<const double> b);

enum class GroundMetric { L1, L2 };

/// Largest sample size accepted by exact_w1_small.
inline constexpr Index kExactTransportCap = 16;

/// Exact W1 between two uniform empirical measures (rows of `a` and `b`)
/// obtained by solving the n x m transportation problem with successive
/// shortest augmenting paths on integer-scaled masses. Throws DomainError
/// when either side is empty or has more than kExactTransportCap points.
double exact_w1_small(const Matrix& a, const Matrix& b, GroundMetric metric);

}  // namespace war
