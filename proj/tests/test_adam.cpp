#include <doctest.h>

#include <cmath>

#include "war/adam.hpp"
#include "war/errors.hpp"

using namespace war;

namespace {

DenseNet scalar_net(double w, double b) {
  return DenseNet(1, {Layer{Matrix::Constant(1, 1, w), Vector::Constant(1, b), Activation::Identity, 2}});
}

Gradients grads_of(double gw, double gb) {
  return Gradients{{Matrix::Constant(1, 1, gw)}, {Vector::Constant(1, gb)}, Matrix()};
}

}  // namespace

TEST_CASE("first Adam step moves each parameter by -lr * sign(g)") {
  DenseNet net = scalar_net(0.0, 1.0);
  AdamState state = AdamState::for_net(net, AdamConfig{});
  adam_step(net, grads_of(3.7, -0.2), state);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(-0.001).epsilon(1e-7));
  CHECK(net.layers()[0].bias(0) == doctest::Approx(1.001).epsilon(1e-9));
  CHECK(state.step_count == 1);
}

TEST_CASE("scripted trace against a scalar Adam written out by hand") {
  AdamConfig cfg;
  cfg.learning_rate = 0.05;
  DenseNet net = scalar_net(0.5, 0.0);
  AdamState state = AdamState::for_net(net, cfg);

  double w = 0.5, m = 0.0, v = 0.0;
  const double gs[] = {1.0, -0.5, 0.25, 2.0, -3.0};
  for (int t = 1; t <= 5; ++t) {
    const double g = gs[t - 1];
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double mhat = m / (1.0 - std::pow(0.9, t));
    const double vhat = v / (1.0 - std::pow(0.999, t));
    w -= 0.05 * mhat / (std::sqrt(vhat) + 1e-8);
    adam_step(net, grads_of(g, 0.0), state);
    CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(w).epsilon(1e-12));
  }
}

TEST_CASE("decoupled weight decay shrinks weights but not biases") {
  AdamConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.weight_decay = 0.5;
  DenseNet net = scalar_net(2.0, 2.0);
  AdamState state = AdamState::for_net(net, cfg);
  adam_step(net, grads_of(0.0, 0.0), state);
  CHECK(net.layers()[0].weight(0, 0) == doctest::Approx(2.0 * (1.0 - 0.05)));
  CHECK(net.layers()[0].bias(0) == doctest::Approx(2.0));
}

TEST_CASE("bad gradients leave the network untouched") {
  DenseNet net = scalar_net(1.0, 1.0);
  AdamState state = AdamState::for_net(net, AdamConfig{});
  try {
    adam_step(net, grads_of(std::nan(""), 0.0), state);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(e.layer() == 0);
  }
  CHECK(net.layers()[0].weight(0, 0) == 1.0);
  CHECK(state.step_count == 0);

  Gradients wrong{{Matrix::Zero(2, 1)}, {Vector::Zero(1)}, Matrix()};
  CHECK_THROWS_AS(adam_step(net, wrong, state), ShapeError);
  CHECK(state.step_count == 0);
}
