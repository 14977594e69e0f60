#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "war/baselines.hpp"

namespace war {

struct CurvePoint {
  int labeled_count = 0;
  double rmse = 0.0;
};

/// Test RMSE against the number of labeled points. labeled_count is
/// strictly increasing and every rmse is finite and non-negative.
struct LearningCurve {
  std::vector<CurvePoint> points;
  StrategyKind strategy = StrategyKind::WAR;
  std::string dataset;
  std::uint64_t seed = 0;

  /// Throws StateError when the invariants above are violated.
  void validate() const;
};

/// Composite trapezoidal rule over (labeled_count, rmse). Throws DomainError
/// with fewer than two points.
double trapezoid_auc(const LearningCurve& curve);
double trapezoid_auc(const std::vector<CurvePoint>& points);

struct FractionMetric {
  double rmse = 0.0;
  int labeled_count = 0;
  double fraction = 0.0;  // labeled_count / train_size
  bool overshoot = false; // labeled_count > fraction * train_size
};

/// RMSE at the first point whose labeled_count >= fraction * train_size.
/// Throws ReportingError (carrying the largest fraction reached) when no
/// point gets there, DomainError on an empty curve.
FractionMetric rmse_at_fraction(const LearningCurve& curve, double fraction,
                                Index train_size);

/// Number of rounds needed for b0 + rounds * n_B to reach fraction * train.
int rounds_to_fraction(Index train_size, int initial_size, int batch_size, double fraction);

}  // namespace war
