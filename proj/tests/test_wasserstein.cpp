#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "war/errors.hpp"
#include "war/wasserstein.hpp"

using namespace war;

TEST_CASE("1D exact W1 on hand examples") {
  const std::vector<double> a{0.0, 1.0};
  const std::vector<double> b{0.5};
  CHECK(exact_w1_1d(a, b) == doctest::Approx(0.5));
  const std::vector<double> c{0.0, 0.0, 3.0};
  const std::vector<double> d{1.0};
  CHECK(exact_w1_1d(c, d) == doctest::Approx((1.0 + 1.0 + 2.0) / 3.0));
  CHECK(exact_w1_1d(a, a) == 0.0);
  CHECK_THROWS_AS(exact_w1_1d({}, b), DomainError);
}

TEST_CASE("1D exact W1 agrees with the CDF integral on random samples") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2.0, 5.0);
  std::uniform_int_distribution<int> size(1, 30);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> a(static_cast<std::size_t>(size(rng)));
    std::vector<double> b(static_cast<std::size_t>(size(rng)));
    for (double& v : a) v = u(rng);
    for (double& v : b) v = u(rng);
    CHECK(exact_w1_1d(a, b) == doctest::Approx(oracle::cdf_w1_1d(a, b)).epsilon(1e-10));
  }
}

TEST_CASE("small exact W1 matches brute-force assignment") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 30; ++t) {
    const long n = 1 + t % 7;
    const long d = 1 + t % 3;
    const Matrix p = oracle::uniform_points(n, d, rng);
    const Matrix q = oracle::uniform_points(n, d, rng);
    std::vector<oracle::Vec> pa, qa;
    for (Index i = 0; i < n; ++i) {
      pa.push_back(oracle::row(p, i));
      qa.push_back(oracle::row(q, i));
    }
    CHECK(exact_w1_small(p, q, GroundMetric::L2) ==
          doctest::Approx(oracle::brute_force_w1(pa, qa, false)).epsilon(1e-10));
    CHECK(exact_w1_small(p, q, GroundMetric::L1) ==
          doctest::Approx(oracle::brute_force_w1(pa, qa, true)).epsilon(1e-10));
  }
}

TEST_CASE("small exact W1 with unequal sizes reduces to 1D on a line") {
  std::mt19937_64 rng(29);
  for (int t = 0; t < 20; ++t) {
    const Matrix p = oracle::uniform_points(3 + t % 5, 1, rng);
    const Matrix q = oracle::uniform_points(2 + t % 7, 1, rng);
    const std::vector<double> a(p.data(), p.data() + p.size());
    const std::vector<double> b(q.data(), q.data() + q.size());
    CHECK(exact_w1_small(p, q, GroundMetric::L2) == doctest::Approx(exact_w1_1d(a, b)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(exact_w1_small(Matrix::Zero(17, 1), Matrix::Zero(2, 1), GroundMetric::L2), DomainError);
  CHECK_THROWS_AS(exact_w1_small(Matrix::Zero(2, 2), Matrix::Zero(2, 1), GroundMetric::L2), ShapeError);
}

TEST_CASE("dual objective is the absolute mean gap") {
  const CriticNet c = make_critic({1, {4, 4}, 2, 10.0}, 3);
  Matrix all(3, 1), lab(1, 1);
  all << 0.0, 0.5, 1.0;
  lab << 0.2;
  const auto v = dual_objective(c, all, lab);
  const double expected_all = (c(all.row(0)) + c(all.row(1)) + c(all.row(2))) / 3.0;
  CHECK(v.mean_all == doctest::Approx(expected_all));
  CHECK(v.mean_labeled == doctest::Approx(c(lab.row(0))));
  CHECK(v.value == doctest::Approx(std::abs(expected_all - c(lab.row(0)))));
  CHECK_THROWS_AS(dual_objective(c, Matrix(0, 1), lab), DomainError);
}

TEST_CASE("critic training increases the objective, stays feasible and orients") {
  std::mt19937_64 rng(31);
  const Matrix all = oracle::uniform_points(16, 2, rng);
  const Matrix labeled = all.topRows(6);
  CriticTrainer trainer(make_critic({2, {16, 16}, 2, 10.0}, 8), 0.01);
  const double before = dual_objective(trainer.critic(), all, labeled).value;
  std::vector<double> trace;
  const auto after = trainer.train(all, labeled, 300, &trace);
  CHECK(trace.size() == 300);
  CHECK(trainer.steps_taken() == 300);
  CHECK(trainer.oriented());
  CHECK(after.value > before);
  CHECK(after.mean_all >= after.mean_labeled);
  CHECK(after.value <= exact_w1_small(all, labeled, GroundMetric::L2) + 1e-9);

  CriticNet copy = trainer.critic();
  project_constraints(copy);
  for (std::size_t l = 0; l < copy.net().depth(); ++l) {
    CHECK(copy.net().layers()[l].weight == trainer.critic().net().layers()[l].weight);
  }
}
