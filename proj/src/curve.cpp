#include "war/curve.hpp"

#include <cmath>

#include "war/errors.hpp"

namespace war {

void LearningCurve::validate() const {
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(points[i].rmse) || points[i].rmse < 0.0) {
      throw StateError("curve point " + std::to_string(i) + " has an invalid RMSE");
    }
    if (i > 0 && points[i].labeled_count <= points[i - 1].labeled_count) {
      throw StateError("curve labeled counts are not strictly increasing");
    }
  }
}

double trapezoid_auc(const std::vector<CurvePoint>& points) {
  if (points.size() < 2) {
    throw DomainError("area under a curve needs at least two points");
  }
  double area = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double width = points[i + 1].labeled_count - points[i].labeled_count;
    area += width * (points[i].rmse + points[i + 1].rmse) / 2.0;
  }
  return area;
}

double trapezoid_auc(const LearningCurve& curve) { return trapezoid_auc(curve.points); }

FractionMetric rmse_at_fraction(const LearningCurve& curve, double fraction,
                                Index train_size) {
  if (curve.points.empty()) {
    throw DomainError("rmse_at_fraction on an empty curve");
  }
  if (train_size <= 0) {
    throw DomainError("train size must be positive");
  }
  const double threshold = fraction * static_cast<double>(train_size);
  for (const auto& p : curve.points) {
    if (static_cast<double>(p.labeled_count) >= threshold) {
      return {p.rmse, p.labeled_count,
              static_cast<double>(p.labeled_count) / static_cast<double>(train_size),
              static_cast<double>(p.labeled_count) > threshold};
    }
  }
  const double reached =
      static_cast<double>(curve.points.back().labeled_count) / static_cast<double>(train_size);
  throw ReportingError("curve stops at labeled fraction " + std::to_string(reached) +
                           ", below the requested " + std::to_string(fraction),
                       reached);
}

int rounds_to_fraction(Index train_size, int initial_size, int batch_size, double fraction) {
  const double needed = fraction * static_cast<double>(train_size) - initial_size;
  if (needed <= 0.0) return 0;
  return static_cast<int>(std::ceil(needed / batch_size));
}

}  // namespace war
