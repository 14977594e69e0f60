#include "war/groupsort.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "war/errors.hpp"

namespace war {
namespace {

void check_group(Index n, int group_size) {
  if (group_size < 1 || n % group_size != 0) {
    throw ShapeError("group size " + std::to_string(group_size) +
                     " does not divide length " + std::to_string(n));
  }
}

// Shrinks `row` by one ulp at a time until `norm(row) <= 1`. Needed so that a
// second projection sees the row as feasible and leaves it bit-identical.
template <typename Row, typename Norm>
void settle_on_ball(Row&& row, Norm norm) {
  constexpr double shrink = 1.0 - 0x1p-52;
  while (norm(row) > 1.0) {
    row *= shrink;
  }
}

// Nearest point of the unit L1 ball: soft-thresholds the entries by the
// smallest level that brings the absolute sum down to one.
template <typename Row>
void shrink_onto_l1_ball(Row&& row) {
  std::vector<double> mags(static_cast<std::size_t>(row.size()));
  for (Index c = 0; c < row.size(); ++c) {
    mags[static_cast<std::size_t>(c)] = std::abs(row(c));
  }
  std::sort(mags.begin(), mags.end(), std::greater<double>());
  double prefix = 0.0;
  double level = 0.0;
  for (std::size_t j = 0; j < mags.size(); ++j) {
    prefix += mags[j];
    const double candidate = (prefix - 1.0) / static_cast<double>(j + 1);
    if (j + 1 == mags.size() || mags[j + 1] <= candidate) {
      level = candidate;
      break;
    }
  }
  for (Index c = 0; c < row.size(); ++c) {
    const double mag = std::max(std::abs(row(c)) - level, 0.0);
    row(c) = std::copysign(mag, row(c));
  }
}

}  // namespace

Vector groupsort(const Vector& x, int group_size) {
  check_group(x.size(), group_size);
  Vector out = x;
  for (Index start = 0; start < out.size(); start += group_size) {
    std::sort(out.data() + start, out.data() + start + group_size,
              std::greater<double>());
  }
  return out;
}

void groupsort_rows(Matrix& z, int group_size, Eigen::MatrixXi* perm) {
  check_group(z.cols(), group_size);
  if (perm != nullptr) {
    perm->resize(z.rows(), z.cols());
  }
  const Index rows = z.rows();
  const Index cols = z.cols();

  if (group_size == 2) {
    for (Index c = 0; c < cols; c += 2) {
      for (Index r = 0; r < rows; ++r) {
        const double a = z(r, c);
        const double b = z(r, c + 1);
        const bool swap = b > a;
        if (swap) {
          z(r, c) = b;
          z(r, c + 1) = a;
        }
        if (perm != nullptr) {
          (*perm)(r, c) = static_cast<int>(swap ? c + 1 : c);
          (*perm)(r, c + 1) = static_cast<int>(swap ? c : c + 1);
        }
      }
    }
    return;
  }

  std::vector<int> order(group_size);
  std::vector<double> values(group_size);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; c += group_size) {
      std::iota(order.begin(), order.end(), 0);
      for (int j = 0; j < group_size; ++j) {
        values[j] = z(r, c + j);
      }
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return values[a] > values[b]; });
      for (int j = 0; j < group_size; ++j) {
        z(r, c + j) = values[order[j]];
        if (perm != nullptr) {
          (*perm)(r, c + j) = static_cast<int>(c + order[j]);
        }
      }
    }
  }
}

CriticNet::CriticNet(DenseNet net, int group_size, double bias_bound)
    : net_(std::move(net)), group_size_(group_size), bias_bound_(bias_bound) {
  if (group_size_ < 2) {
    throw ShapeError("critic grouping size must be at least 2");
  }
  if (!(bias_bound_ > 0.0)) {
    throw ShapeError("critic bias bound must be positive");
  }
  auto layers = net_.layers();
  if (layers.empty() || net_.output_dim() != 1 ||
      layers.back().activation != Activation::Identity) {
    throw ShapeError("critic must end in a scalar identity layer");
  }
  for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
    if (layers[i].activation != Activation::GroupSort ||
        layers[i].group_size != group_size_) {
      throw ShapeError("critic hidden layer " + std::to_string(i) +
                       " is not GroupSort(" + std::to_string(group_size_) + ")");
    }
  }
}

double CriticNet::operator()(const Vector& x) const { return net_.forward(x)(0); }

Vector CriticNet::evaluate(const Matrix& batch) const {
  return net_.forward(batch).col(0);
}

CriticNet make_critic(const CriticSpec& spec, std::uint64_t seed) {
  NetSpec ns;
  ns.input_dim = spec.input_dim;
  for (int w : spec.hidden) {
    ns.layers.push_back({w, Activation::GroupSort, spec.group_size});
  }
  ns.layers.push_back({1, Activation::Identity, spec.group_size});
  CriticNet critic(init_net(ns, seed), spec.group_size, spec.bias_bound);
  project_constraints(critic);
  return critic;
}

void project_constraints(CriticNet& critic) {
  auto layers = critic.net().layers();
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Matrix& w = layers[i].weight;
    for (Index r = 0; r < w.rows(); ++r) {
      if (i == 0) {
        const double norm = w.row(r).norm();
        if (norm > 1.0) {
          w.row(r) /= norm;
          settle_on_ball(w.row(r), [](const auto& row) { return row.norm(); });
        }
      } else {
        const double norm = w.row(r).lpNorm<1>();
        if (norm > 1.0) {
          shrink_onto_l1_ball(w.row(r));
          settle_on_ball(w.row(r), [](const auto& row) { return row.template lpNorm<1>(); });
        }
      }
    }
    const double k = critic.bias_bound();
    layers[i].bias = layers[i].bias.cwiseMax(-k).cwiseMin(k);
  }
}

double lipschitz_certificate(const CriticNet& critic,
                             std::span<const std::pair<Vector, Vector>> pairs) {
  if (pairs.empty()) {
    throw DomainError("lipschitz_certificate needs at least one pair");
  }
  const Index d = critic.input_dim();
  Matrix xs(static_cast<Index>(pairs.size()), d);
  Matrix ys(static_cast<Index>(pairs.size()), d);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [x, y] = pairs[i];
    if (x.size() != d || y.size() != d) {
      throw ShapeError("pair dimension does not match critic input");
    }
    xs.row(static_cast<Index>(i)) = x.transpose();
    ys.row(static_cast<Index>(i)) = y.transpose();
  }
  const Vector fx = critic.evaluate(xs);
  const Vector fy = critic.evaluate(ys);
  double worst = 0.0;
  for (Index i = 0; i < xs.rows(); ++i) {
    const double dist = (xs.row(i) - ys.row(i)).norm();
    if (dist == 0.0) {
      throw DomainError("lipschitz_certificate pair " + std::to_string(i) +
                        " has x == y");
    }
    worst = std::max(worst, std::abs(fx(i) - fy(i)) / dist);
  }
  return worst;
}

ArchitectureBounds architecture_bounds(double epsilon, double delta, int d) {
  if (!(delta > 0.0) || !(delta < epsilon) || d < 1) {
    throw DomainError("architecture_bounds requires 0 < delta < epsilon and d >= 1");
  }
  const double gap = epsilon - delta;
  const double dd = static_cast<double>(d);
  return {std::pow(std::sqrt(dd) / gap, dd * dd),
          dd * dd * std::log2(4.0 * std::sqrt(dd) / gap)};
}

}  // namespace war
