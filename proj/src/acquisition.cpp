#include "war/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "war/errors.hpp"
#include "war/random.hpp"

namespace war {

void WarConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid config: " + what); };
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) fail("alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail("beta must be >= 0");
  if (batch_size < 1) fail("batch size must be >= 1");
  if (initial_size < 1) fail("initial pool size must be >= 1");
  if (n_query < 0) fail("number of rounds must be >= 0");
  if (committee_size < 2) fail("committee needs at least two members");
  if (epochs < 0) fail("epochs must be >= 0");
  if (!(lr_estimator > 0.0) || !(lr_critic > 0.0)) fail("learning rates must be positive");
  if (weight_decay < 0.0) fail("weight decay must be >= 0");
  if (critic_group_size < 2) fail("critic group size must be >= 2");
  if (!(critic_bias_bound > 0.0)) fail("critic bias bound must be positive");
  if (critic_initial_steps < 1 || critic_steps_per_point < 1) fail("critic steps must be >= 1");
  for (int w : hidden) {
    if (w < 1) fail("hidden widths must be positive");
  }
  for (int w : critic_hidden) {
    if (w < 1 || w % critic_group_size != 0) {
      fail("critic widths must be positive multiples of the group size");
    }
  }
}

CriticSpec critic_spec(const WarConfig& config, int input_dim) {
  CriticSpec spec;
  spec.input_dim = input_dim;
  spec.hidden = config.critic_hidden;
  spec.group_size = config.critic_group_size;
  spec.bias_bound = config.critic_bias_bound;
  return spec;
}

double distance_penalty(const Vector& x, const Matrix& all_points, double alpha) {
  if (all_points.rows() == 0) {
    throw DomainError("distance penalty needs at least one reference point");
  }
  if (x.size() != all_points.cols()) {
    throw ShapeError("point dimension does not match reference points");
  }
  const double mean = (all_points.rowwise() - x.transpose()).rowwise().norm().mean();
  return std::pow(std::max(mean, kMinMeanDistance), alpha);
}

Vector mean_distances(const Matrix& all_points, const Matrix& queries) {
  if (all_points.rows() == 0) {
    throw DomainError("mean distance needs at least one reference point");
  }
  Vector out(queries.rows());
  for (Index i = 0; i < queries.rows(); ++i) {
    out(i) = (all_points.rowwise() - queries.row(i)).rowwise().norm().mean();
  }
  return out;
}

double population_std(const Vector& values) {
  if (values.size() == 0) return 0.0;
  const double mean = values.mean();
  const double sd = std::sqrt((values.array() - mean).square().mean());
  const double scale = values.cwiseAbs().maxCoeff();
  return sd <= 1e-12 * scale ? 0.0 : sd;
}

Vector acquisition_scores(const Vector& uncertainty, const Vector& mean_distance,
                          const Vector& critic_values, double alpha, double beta) {
  const Index n = uncertainty.size();
  if (n == 0) {
    throw StateError("no unlabeled candidates to score");
  }
  if (mean_distance.size() != n || (beta != 0.0 && critic_values.size() != n)) {
    throw ShapeError("score components differ in length");
  }
  Vector r(n);
  for (Index i = 0; i < n; ++i) {
    r(i) = uncertainty(i) / std::pow(std::max(mean_distance(i), kMinMeanDistance), alpha);
  }
  Vector scores = Vector::Zero(n);
  const double spread_r = population_std(r);
  if (spread_r > 0.0) {
    scores += r / spread_r;
  }
  if (beta != 0.0) {
    const double spread_phi = population_std(critic_values);
    if (spread_phi > 0.0) {
      scores += (beta / spread_phi) * critic_values;
    }
  }
  return scores;
}

Vector acquisition_scores(const Committee& committee, const CriticNet& critic,
                          const PoolState& pool, const Matrix& features,
                          const WarConfig& config) {
  if (pool.unlabeled.empty()) {
    throw StateError("no unlabeled candidates to score");
  }
  std::vector<Index> sample = pool.labeled;
  sample.insert(sample.end(), pool.unlabeled.begin(), pool.unlabeled.end());
  sample.insert(sample.end(), pool.batch.begin(), pool.batch.end());
  const Matrix candidates = gather_rows(features, pool.unlabeled);
  const Vector phi = config.beta != 0.0 ? critic.evaluate(candidates) : Vector();
  return acquisition_scores(committee_uncertainty(committee, candidates),
                            mean_distances(gather_rows(features, sample), candidates), phi,
                            config.alpha, config.beta);
}

std::size_t argmax_lowest_row(const Vector& scores, std::span<const Index> rows) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double s = scores(static_cast<Index>(i));
    const double b = scores(static_cast<Index>(best));
    if (s > b || (s == b && rows[i] < rows[best])) {
      best = i;
    }
  }
  return best;
}

std::vector<Index> select_batch(PoolState& pool, CriticTrainer& critic,
                                const RoundContext& context, const WarConfig& config,
                                std::uint64_t critic_seed, SelectionTrace* trace) {
  const auto target = std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                             pool.unlabeled.size());
  std::vector<Index> picked;
  for (std::size_t t = 0; t < target; ++t) {
    Vector phi;
    if (config.beta != 0.0) {
      int steps = t == 0 ? config.critic_initial_steps : config.critic_steps_per_point;
      if (config.critic_reset_per_point && t > 0) {
        critic = CriticTrainer(
            make_critic(critic_spec(config, static_cast<int>(context.features.cols())),
                        mix64(critic_seed + t)),
            config.lr_critic);
        steps = config.critic_initial_steps;
      }
      std::vector<Index> known = pool.labeled;
      known.insert(known.end(), pool.batch.begin(), pool.batch.end());
      const auto dual = critic.train(context.full_sample, gather_rows(context.features, known),
                                     steps);
      if (trace != nullptr) trace->dual_values.push_back(dual.value);
      phi = critic.critic().evaluate(gather_rows(context.features, pool.unlabeled));
    }
    const Vector scores =
        acquisition_scores(gather(context.uncertainty, pool.unlabeled),
                           gather(context.mean_distance, pool.unlabeled), phi, config.alpha,
                           config.beta);
    const std::size_t best = argmax_lowest_row(scores, pool.unlabeled);
    if (trace != nullptr) {
      trace->scores.push_back(scores);
      trace->candidates.push_back(pool.unlabeled);
    }
    const Index row = pool.unlabeled[best];
    move_to_batch(pool, row);
    picked.push_back(row);
  }
  return picked;
}

}  // namespace war
