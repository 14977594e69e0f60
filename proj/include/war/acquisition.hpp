#pragma once

#include <cstdint>
#include <vector>

#include "war/pool.hpp"
#include "war/wasserstein.hpp"

namespace war {

/// Everything that parameterizes one Wasserstein active regression run.
struct WarConfig {
  double alpha = 1.0;     // outlier penalization exponent
  double beta = 1.0;      // weight of the critic term
  int batch_size = 1;     // points queried per round
  int initial_size = 1;   // size of the K-means seeded pool
  int n_query = 0;        // number of rounds

  int committee_size = 5;
  std::vector<int> hidden{16, 32};
  double lr_estimator = 1e-3;
  double weight_decay = 1e-3;
  int epochs = 100;

  std::vector<int> critic_hidden{32, 32};
  int critic_group_size = 2;
  double critic_bias_bound = 10.0;
  double lr_critic = 1e-2;
  int critic_initial_steps = 300;
  int critic_steps_per_point = 30;
  bool critic_reset_per_point = false;

  /// Throws ConfigError on negative alpha/beta, non-positive sizes, etc.
  void validate() const;
};

/// Floor applied to a zero mean distance before exponentiation.
inline constexpr double kMinMeanDistance = 1e-12;

/// ((1/n) sum_i |X_i - x|_2)^alpha over the rows X_i of `all_points`.
double distance_penalty(const Vector& x, const Matrix& all_points, double alpha);

/// Mean Euclidean distance from every row of `queries` to the rows of
/// `all_points`.
Vector mean_distances(const Matrix& all_points, const Matrix& queries);

/// Population standard deviation, or 0 when the spread is at rounding level.
double population_std(const Vector& values);

/// Score of each candidate:
///   r(x) / s_r + beta * phi(x) / s_phi,   r(x) = s_h(x) / mean_dist(x)^alpha
/// where s_r and s_phi are population standard deviations over the
/// candidates. A term whose standard deviation is zero is dropped.
/// Throws StateError on an empty candidate set.
Vector acquisition_scores(const Vector& uncertainty, const Vector& mean_distance,
                          const Vector& critic_values, double alpha, double beta);

/// Same score for every row of pool.unlabeled, with the full sample taken as
/// K + U + B. Returned in pool.unlabeled order.
Vector acquisition_scores(const Committee& committee, const CriticNet& critic,
                          const PoolState& pool, const Matrix& features,
                          const WarConfig& config);

/// Position of the largest score; ties go to the smallest row index.
std::size_t argmax_lowest_row(const Vector& scores, std::span<const Index> rows);

/// Per-round quantities that do not change while a batch is assembled,
/// indexed by dataset row.
struct RoundContext {
  const Matrix& features;
  const Matrix& full_sample;    // rows of the full empirical measure
  const Vector& uncertainty;    // committee disagreement s_h per row
  const Vector& mean_distance;  // mean distance to the full sample per row
};

/// Optional diagnostics filled by select_batch.
struct SelectionTrace {
  std::vector<Vector> scores;         // per pick, in pool.unlabeled order at that time
  std::vector<std::vector<Index>> candidates;
  std::vector<double> dual_values;    // critic objective after each retraining
};

/// Builds the batch one point at a time: retrain the critic against K + B,
/// score every point of U, move the best one to B. The critic gets
/// critic_initial_steps before the first pick and critic_steps_per_point
/// before every later one (or is rebuilt from `critic_seed` before each
/// pick when critic_reset_per_point is set). With beta == 0 the critic is
/// neither trained nor read. The batch shrinks to |U| when U runs short.
/// Returns the picked rows; they are also left in pool.batch.
std::vector<Index> select_batch(PoolState& pool, CriticTrainer& critic,
                                const RoundContext& context, const WarConfig& config,
                                std::uint64_t critic_seed, SelectionTrace* trace = nullptr);

CriticSpec critic_spec(const WarConfig& config, int input_dim);

}  // namespace war
