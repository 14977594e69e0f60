#include "war/adam.hpp"

#include <cmath>

#include "war/errors.hpp"

namespace war {

AdamState AdamState::for_net(const DenseNet& net, const AdamConfig& config) {
  AdamState s;
  s.config = config;
  for (const auto& layer : net.layers()) {
    s.weight_m.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    s.weight_v.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
    s.bias_m.push_back(Vector::Zero(layer.bias.size()));
    s.bias_v.push_back(Vector::Zero(layer.bias.size()));
  }
  return s;
}

void adam_step(DenseNet& net, const Gradients& grads, AdamState& state) {
  auto layers = net.layers();
  const std::size_t depth = layers.size();
  if (grads.weight.size() != depth || grads.bias.size() != depth ||
      state.weight_m.size() != depth || state.bias_m.size() != depth) {
    throw ShapeError("gradient or optimizer state depth does not match network");
  }
  for (std::size_t i = 0; i < depth; ++i) {
    const auto& w = layers[i].weight;
    if (grads.weight[i].rows() != w.rows() || grads.weight[i].cols() != w.cols() ||
        grads.bias[i].size() != layers[i].bias.size() ||
        state.weight_m[i].rows() != w.rows() || state.weight_m[i].cols() != w.cols() ||
        state.bias_m[i].size() != layers[i].bias.size()) {
      throw ShapeError("gradient shape mismatch");
    }
    if (!grads.weight[i].allFinite() || !grads.bias[i].allFinite()) {
      throw NumericError("non-finite gradient", static_cast<int>(i));
    }
  }

  const AdamConfig& c = state.config;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);

  auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
    m = c.beta1 * m + (1.0 - c.beta1) * grad;
    v = c.beta2 * v + (1.0 - c.beta2) * grad.cwiseProduct(grad);
    param.array() -= c.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + c.epsilon);
  };

  for (std::size_t i = 0; i < depth; ++i) {
    Layer& layer = layers[i];
    update(layer.weight, grads.weight[i], state.weight_m[i], state.weight_v[i]);
    update(layer.bias, grads.bias[i], state.bias_m[i], state.bias_v[i]);
    if (c.weight_decay > 0.0) {
      layer.weight *= 1.0 - c.learning_rate * c.weight_decay;
    }
  }
}

}  // namespace war
