#pragma once
// Reference computations written independently of the library code paths:
// plain loops over std::vector, brute-force search, hand-derivable formulas.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "war/dense_net.hpp"

namespace oracle {

using Vec = std::vector<double>;

// Descending sort inside consecutive blocks of `k`.
inline Vec groupsort(Vec x, int k) {
  for (std::size_t start = 0; start < x.size(); start += static_cast<std::size_t>(k)) {
    std::sort(x.begin() + static_cast<long>(start), x.begin() + static_cast<long>(start + k),
              std::greater<>());
  }
  return x;
}

// Scalar forward pass with explicit loops.
inline Vec forward(const war::DenseNet& net, const Vec& input) {
  Vec a = input;
  for (const auto& layer : net.layers()) {
    Vec z(static_cast<std::size_t>(layer.out_dim()), 0.0);
    for (long r = 0; r < layer.out_dim(); ++r) {
      double s = layer.bias(r);
      for (long c = 0; c < layer.in_dim(); ++c) s += layer.weight(r, c) * a[static_cast<std::size_t>(c)];
      z[static_cast<std::size_t>(r)] = s;
    }
    switch (layer.activation) {
      case war::Activation::Identity:
        break;
      case war::Activation::ReLU:
        for (double& v : z) v = v > 0.0 ? v : 0.0;
        break;
      case war::Activation::GroupSort:
        z = groupsort(z, layer.group_size);
        break;
    }
    a = z;
  }
  return a;
}

// Derivative of f with respect to one parameter by central differences.
inline double central_difference(const std::function<double()>& f, double& param, double h) {
  const double saved = param;
  param = saved + h;
  const double up = f();
  param = saved - h;
  const double down = f();
  param = saved;
  return (up - down) / (2.0 * h);
}

// Exact W1 between two equal-size uniform point clouds: the optimal plan
// is a permutation, so enumerate all of them.
inline double brute_force_w1(const std::vector<Vec>& a, const std::vector<Vec>& b, bool l1) {
  const std::size_t n = a.size();
  std::vector<std::vector<double>> cost(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double c = 0.0;
      for (std::size_t k = 0; k < a[i].size(); ++k) {
        const double d = a[i][k] - b[j][k];
        c += l1 ? std::abs(d) : d * d;
      }
      cost[i][j] = l1 ? c : std::sqrt(c);
    }
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost[i][perm[i]];
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(n);
}

// W1 on the line as the integral of |F_a - F_b| between consecutive
// breakpoints of the merged sample.
inline double cdf_w1_1d(Vec a, Vec b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  Vec points = a;
  points.insert(points.end(), b.begin(), b.end());
  std::sort(points.begin(), points.end());
  auto cdf = [](const Vec& s, double t) {
    return static_cast<double>(std::upper_bound(s.begin(), s.end(), t) - s.begin()) /
           static_cast<double>(s.size());
  };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    total += std::abs(cdf(a, points[i]) - cdf(b, points[i])) * (points[i + 1] - points[i]);
  }
  return total;
}

inline double euclid(const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

inline double population_std(const Vec& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Euclidean projection onto the unit L1 ball, with the threshold level found
// by bisection on the absolute sum.
inline Vec nearest_on_l1_ball(const Vec& x) {
  auto shrunk_sum = [&](double level) {
    double s = 0.0;
    for (double v : x) s += std::max(std::abs(v) - level, 0.0);
    return s;
  };
  if (shrunk_sum(0.0) <= 1.0) return x;
  double lo = 0.0;
  double hi = 0.0;
  for (double v : x) hi = std::max(hi, std::abs(v));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (shrunk_sum(mid) > 1.0 ? lo : hi) = mid;
  }
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::copysign(std::max(std::abs(x[i]) - hi, 0.0), x[i]);
  }
  return out;
}

inline Vec row(const war::Matrix& m, long r) {
  Vec out(static_cast<std::size_t>(m.cols()));
  for (long c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(r, c);
  return out;
}

inline war::Matrix uniform_points(long n, long d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  war::Matrix m(n, d);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < d; ++j) m(i, j) = u(rng);
  }
  return m;
}

}  // namespace oracle
