#pragma once

#include <cstdint>
#include <vector>

#include "war/dense_net.hpp"

namespace war {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;  // decoupled, weights only
};

/// Moment estimates for every parameter of one network.
struct AdamState {
  AdamConfig config;
  std::vector<Matrix> weight_m, weight_v;
  std::vector<Vector> bias_m, bias_v;
  std::int64_t step_count = 0;

  static AdamState for_net(const DenseNet& net, const AdamConfig& config);
};

/// One bias-corrected Adam step, then w -= lr * weight_decay * w on weight
/// matrices. Throws NumericError (with layer index) on a non-finite gradient
/// and ShapeError when gradient or moment shapes disagree with `net`.
/// Nothing is modified when an error is thrown.
void adam_step(DenseNet& net, const Gradients& grads, AdamState& state);

}  // namespace war
