#pragma once

#include <cstdint>
#include <vector>

#include "war/acquisition.hpp"
#include "war/curve.hpp"
#include "war/data.hpp"

namespace war {

/// `model` drives the K-means seeding and committee initialization and is
/// meant to be shared between strategies compared on the same cell;
/// `strategy` drives strategy-specific randomness (random queries, critic
/// initialization).
struct RunSeeds {
  std::uint64_t model = 0;
  std::uint64_t strategy = 0;
};

struct RoundMetrics {
  int round = 0;
  int labeled_count = 0;
  double rmse = 0.0;
  std::vector<Index> batch;
};

/// Pool-based active regression loop shared by WAR and the baselines.
///
///   seed_pool():  K <- K-means seeding of the train split, reveal K,
///                 train the committee, record (|K|, test RMSE).
///   run_round():  pick a batch with the strategy, reveal and commit it,
///                 continue training the committee on K (weights and
///                 optimizer moments are never reset), record the point.
///
/// The reported predictor is the committee mean. Labels are read only
/// through a LabelOracle, and only for rows that have been committed.
class ActiveLearner {
 public:
  /// Throws ConfigError when the config is invalid or
  /// initial_size + n_query * batch_size exceeds the train split.
  ActiveLearner(const Dataset& data, StrategyKind strategy, WarConfig config, RunSeeds seeds);

  CurvePoint seed_pool();
  RoundMetrics run_round();

  /// seed_pool() followed by n_query rounds.
  LearningCurve run();

  const PoolState& pool() const { return pool_; }
  const Committee& committee() const { return committee_; }
  const LabelOracle& oracle() const { return oracle_; }
  const LearningCurve& curve() const { return curve_; }
  const WarConfig& config() const { return config_; }
  int rounds_done() const { return rounds_; }

  /// Diagnostics of the last WAR selection.
  const SelectionTrace& last_trace() const { return trace_; }
  void keep_traces(bool keep) { keep_traces_ = keep; }

 private:
  std::vector<Index> select();
  void train_on_labeled();
  double test_rmse() const;

  const Dataset& data_;
  StrategyKind strategy_;
  WarConfig config_;
  RunSeeds seeds_;

  PoolState pool_;
  LabelOracle oracle_;
  Committee committee_;
  LearningCurve curve_;
  Matrix full_sample_;
  Vector mean_distance_;  // per dataset row, filled on the train split
  bool seeded_ = false;
  int rounds_ = 0;
  bool keep_traces_ = false;
  SelectionTrace trace_;
};

LearningCurve run_strategy(const Dataset& data, StrategyKind strategy, const WarConfig& config,
                           RunSeeds seeds);

LearningCurve run_war(const Dataset& data, const WarConfig& config, RunSeeds seeds);

}  // namespace war
