#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "war/types.hpp"

namespace war {

enum class Activation { Identity, ReLU, GroupSort };

/// One affine map followed by an elementwise (or blockwise) activation.
struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::Identity;
  int group_size = 2;  // only read for GroupSort

  Index in_dim() const { return weight.cols(); }
  Index out_dim() const { return weight.rows(); }
};

struct LayerSpec {
  int width = 1;
  Activation activation = Activation::Identity;
  int group_size = 2;
};

struct NetSpec {
  int input_dim = 1;
  std::vector<LayerSpec> layers;
};

/// Gradients of a scalar objective with respect to every parameter and
/// to the input batch.
struct Gradients {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
  Matrix input;  // batch x input_dim
};

/// Activations cached by a taped forward pass; consumed by backward().
class ForwardTape {
 public:
  bool empty() const { return inputs_.empty(); }
  Index batch_size() const { return empty() ? 0 : inputs_.front().rows(); }

 private:
  friend class DenseNet;
  std::vector<Matrix> inputs_;  // input of each layer, batch x in
  std::vector<Matrix> pre_;     // pre-activation of each layer, batch x out
  std::vector<Eigen::MatrixXi> perm_;  // GroupSort: output j <- pre column perm(r, j)
};

/// Plain multilayer perceptron on row-major sample batches (one sample per
/// row). All arithmetic is double precision.
class DenseNet {
 public:
  DenseNet() = default;

  /// Throws ShapeError if consecutive layers do not chain or a GroupSort
  /// width is not a multiple of its group size, NumericError on a
  /// non-finite parameter.
  DenseNet(int input_dim, std::vector<Layer> layers);

  int input_dim() const { return input_dim_; }
  int output_dim() const;
  std::size_t depth() const { return layers_.size(); }
  std::size_t parameter_count() const;

  std::span<const Layer> layers() const { return layers_; }
  std::span<Layer> layers() { return layers_; }

  Vector forward(const Vector& x) const;
  Matrix forward(const Matrix& batch) const;

  /// Forward pass that records what backward() needs.
  Matrix forward(const Matrix& batch, ForwardTape& tape) const;

  /// Reverse pass for the objective sum_r upstream.row(r) . out.row(r).
  /// Throws StateError when the tape is empty or was not produced by a
  /// network of this shape.
  Gradients backward(const ForwardTape& tape, const Matrix& upstream) const;

  /// Throws NumericError naming the first layer holding a NaN/inf.
  void check_finite() const;

 private:
  int input_dim_ = 0;
  std::vector<Layer> layers_;
};

/// Layer-by-layer uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights and
/// zero biases. Bit-identical for a given (spec, seed).
DenseNet init_net(const NetSpec& spec, std::uint64_t seed);

/// Hidden ReLU layers of the given widths and a scalar identity output.
NetSpec regression_spec(int input_dim, std::span<const int> hidden);

struct LossValue {
  double value = 0.0;
  Vector gradient;  // d value / d predictions
};

/// Mean squared error (1/n) sum (p_i - t_i)^2 with its gradient
/// (2/n)(p - t). Throws DomainError on empty input, ShapeError on a
/// length mismatch.
LossValue mse_loss(const Vector& predictions, const Vector& targets);

}  // namespace war
