#include "war/dense_net.hpp"

#include <cmath>
#include <string>

#include "war/errors.hpp"
#include "war/groupsort.hpp"
#include "war/random.hpp"

namespace war {
namespace {

void apply_activation(const Layer& layer, Matrix& z, Eigen::MatrixXi* perm) {
  switch (layer.activation) {
    case Activation::Identity:
      break;
    case Activation::ReLU:
      z = z.cwiseMax(0.0);
      break;
    case Activation::GroupSort:
      groupsort_rows(z, layer.group_size, perm);
      break;
  }
}

Matrix affine(const Layer& layer, const Matrix& x) {
  Matrix z = x * layer.weight.transpose();
  z.rowwise() += layer.bias.transpose();
  return z;
}

}  // namespace

DenseNet::DenseNet(int input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ <= 0) {
    throw ShapeError("input dimension must be positive");
  }
  if (layers_.empty()) {
    throw ShapeError("network needs at least one layer");
  }
  Index in = input_dim_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.in_dim() != in || l.bias.size() != l.out_dim() || l.out_dim() == 0) {
      throw ShapeError("layer " + std::to_string(i) + " does not chain: expects " +
                       std::to_string(in) + " inputs, has " +
                       std::to_string(l.in_dim()));
    }
    if (l.activation == Activation::GroupSort &&
        (l.group_size < 1 || l.out_dim() % l.group_size != 0)) {
      throw ShapeError("layer " + std::to_string(i) + " width " +
                       std::to_string(l.out_dim()) +
                       " is not a multiple of its group size");
    }
    in = l.out_dim();
  }
  check_finite();
}

int DenseNet::output_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().out_dim());
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) {
    n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  }
  return n;
}

void DenseNet::check_finite() const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (!layers_[i].weight.allFinite() || !layers_[i].bias.allFinite()) {
      throw NumericError("non-finite parameter", static_cast<int>(i));
    }
  }
}

Vector DenseNet::forward(const Vector& x) const {
  if (x.size() != input_dim_) {
    throw ShapeError("input has length " + std::to_string(x.size()) +
                     ", network expects " + std::to_string(input_dim_));
  }
  Matrix out = forward(Matrix(x.transpose()));
  return out.row(0).transpose();
}

Matrix DenseNet::forward(const Matrix& batch) const {
  if (batch.cols() != input_dim_) {
    throw ShapeError("batch has " + std::to_string(batch.cols()) +
                     " columns, network expects " + std::to_string(input_dim_));
  }
  Matrix a = batch;
  for (const auto& layer : layers_) {
    Matrix z = affine(layer, a);
    apply_activation(layer, z, nullptr);
    a = std::move(z);
  }
  return a;
}

Matrix DenseNet::forward(const Matrix& batch, ForwardTape& tape) const {
  if (batch.cols() != input_dim_) {
    throw ShapeError("batch has " + std::to_string(batch.cols()) +
                     " columns, network expects " + std::to_string(input_dim_));
  }
  tape.inputs_.assign(layers_.size(), Matrix());
  tape.pre_.assign(layers_.size(), Matrix());
  tape.perm_.assign(layers_.size(), Eigen::MatrixXi());

  Matrix a = batch;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    Matrix z = affine(layer, a);
    tape.inputs_[i] = std::move(a);
    tape.pre_[i] = z;
    apply_activation(layer, z,
                     layer.activation == Activation::GroupSort ? &tape.perm_[i] : nullptr);
    a = std::move(z);
  }
  return a;
}

Gradients DenseNet::backward(const ForwardTape& tape, const Matrix& upstream) const {
  if (tape.empty()) {
    throw StateError("backward called without a forward tape");
  }
  if (tape.inputs_.size() != layers_.size() ||
      tape.inputs_.front().cols() != input_dim_) {
    throw StateError("forward tape was recorded on a different network");
  }
  const Index batch = tape.batch_size();
  if (upstream.rows() != batch || upstream.cols() != output_dim()) {
    throw ShapeError("upstream gradient must be " + std::to_string(batch) + " x " +
                     std::to_string(output_dim()));
  }

  Gradients g;
  g.weight.resize(layers_.size());
  g.bias.resize(layers_.size());

  Matrix grad_out = upstream;
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const Layer& layer = layers_[k];
    Matrix grad_pre;
    switch (layer.activation) {
      case Activation::Identity:
        grad_pre = std::move(grad_out);
        break;
      case Activation::ReLU:
        grad_pre = grad_out.cwiseProduct(
            (tape.pre_[k].array() > 0.0).cast<double>().matrix());
        break;
      case Activation::GroupSort: {
        const auto& perm = tape.perm_[k];
        grad_pre = Matrix::Zero(grad_out.rows(), grad_out.cols());
        for (Index r = 0; r < grad_out.rows(); ++r) {
          for (Index j = 0; j < grad_out.cols(); ++j) {
            grad_pre(r, perm(r, j)) = grad_out(r, j);
          }
        }
        break;
      }
    }
    g.weight[k] = grad_pre.transpose() * tape.inputs_[k];
    g.bias[k] = grad_pre.colwise().sum().transpose();
    grad_out = grad_pre * layer.weight;
  }
  g.input = std::move(grad_out);
  return g;
}

DenseNet init_net(const NetSpec& spec, std::uint64_t seed) {
  if (spec.input_dim <= 0 || spec.layers.empty()) {
    throw ShapeError("network spec needs a positive input size and one layer");
  }
  Rng rng(seed);
  std::vector<Layer> layers;
  layers.reserve(spec.layers.size());
  int fan_in = spec.input_dim;
  for (const auto& ls : spec.layers) {
    if (ls.width <= 0) {
      throw ShapeError("layer widths must be positive");
    }
    const double bound = std::sqrt(1.0 / fan_in);
    std::uniform_real_distribution<double> dist(-bound, bound);
    Layer layer;
    layer.weight.resize(ls.width, fan_in);
    // Row-major fill order so the draw sequence is independent of storage.
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = dist(rng);
      }
    }
    layer.bias = Vector::Zero(ls.width);
    layer.activation = ls.activation;
    layer.group_size = ls.group_size;
    layers.push_back(std::move(layer));
    fan_in = ls.width;
  }
  return DenseNet(spec.input_dim, std::move(layers));
}

NetSpec regression_spec(int input_dim, std::span<const int> hidden) {
  NetSpec spec;
  spec.input_dim = input_dim;
  for (int w : hidden) {
    spec.layers.push_back({w, Activation::ReLU, 2});
  }
  spec.layers.push_back({1, Activation::Identity, 2});
  return spec;
}

LossValue mse_loss(const Vector& predictions, const Vector& targets) {
  if (predictions.size() == 0) {
    throw DomainError("mse_loss of an empty batch");
  }
  if (predictions.size() != targets.size()) {
    throw ShapeError("predictions and targets differ in length");
  }
  const double n = static_cast<double>(predictions.size());
  Vector residual = predictions - targets;
  return {residual.squaredNorm() / n, (2.0 / n) * residual};
}

}  // namespace war
