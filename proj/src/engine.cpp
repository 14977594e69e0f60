#include "war/engine.hpp"

#include <cmath>
#include <string>

#include "war/errors.hpp"
#include "war/kmeans.hpp"
#include "war/random.hpp"

namespace war {

ActiveLearner::ActiveLearner(const Dataset& data, StrategyKind strategy, WarConfig config,
                             RunSeeds seeds)
    : data_(data),
      strategy_(strategy),
      config_(std::move(config)),
      seeds_(seeds),
      oracle_(data.targets) {
  config_.validate();
  const long long needed = static_cast<long long>(config_.initial_size) +
                           static_cast<long long>(config_.n_query) * config_.batch_size;
  if (needed > data_.train_size()) {
    throw ConfigError("config needs " + std::to_string(needed) +
                      " labeled points but the train split has " +
                      std::to_string(data_.train_size()));
  }
  if (data_.test.empty()) {
    throw ConfigError("dataset has an empty test split");
  }
  curve_.strategy = strategy_;
  curve_.dataset = data_.name;
  curve_.seed = seeds_.model;

  const NetSpec spec =
      regression_spec(static_cast<int>(data_.features.cols()), config_.hidden);
  AdamConfig adam;
  adam.learning_rate = config_.lr_estimator;
  adam.weight_decay = config_.weight_decay;
  committee_ = make_committee(spec, config_.committee_size, adam,
                              derive_seed(seeds_.model, {"committee"}));

  full_sample_ = gather_rows(data_.features, data_.train);
  if (strategy_ == StrategyKind::WAR) {
    mean_distance_ = Vector::Zero(data_.features.rows());
    const Vector md = mean_distances(full_sample_, full_sample_);
    for (std::size_t i = 0; i < data_.train.size(); ++i) {
      mean_distance_(data_.train[i]) = md(static_cast<Index>(i));
    }
  }
}

CurvePoint ActiveLearner::seed_pool() {
  if (seeded_) {
    throw StateError("pool already seeded");
  }
  const auto local = kmeans_seed(full_sample_, config_.initial_size,
                                 derive_seed(seeds_.model, {"kmeans"}));
  std::vector<Index> rows;
  for (Index i : local) rows.push_back(data_.train[static_cast<std::size_t>(i)]);
  pool_ = make_pool(data_.train, rows);
  for (Index row : pool_.labeled) oracle_.reveal(row);
  seeded_ = true;

  train_on_labeled();
  const CurvePoint point{static_cast<int>(pool_.labeled.size()), test_rmse()};
  curve_.points.push_back(point);
  return point;
}

RoundMetrics ActiveLearner::run_round() {
  if (!seeded_) {
    throw StateError("run_round before seed_pool");
  }
  if (pool_.unlabeled.empty()) {
    throw StateError("no unlabeled points left");
  }
  ++rounds_;
  std::vector<Index> batch = select();
  if (pool_.batch.empty()) {
    for (Index row : batch) move_to_batch(pool_, row);
  }
  for (Index row : pool_.batch) oracle_.reveal(row);
  commit_batch(pool_);

  train_on_labeled();
  RoundMetrics m;
  m.round = rounds_;
  m.labeled_count = static_cast<int>(pool_.labeled.size());
  m.rmse = test_rmse();
  m.batch = std::move(batch);
  curve_.points.push_back({m.labeled_count, m.rmse});
  return m;
}

LearningCurve ActiveLearner::run() {
  if (!seeded_) seed_pool();
  while (rounds_ < config_.n_query) run_round();
  curve_.validate();
  return curve_;
}

std::vector<Index> ActiveLearner::select() {
  const int n_b = config_.batch_size;
  const auto round_tag = std::to_string(rounds_);
  auto uncertainty_by_row = [&] {
    Vector s = Vector::Zero(data_.features.rows());
    const Vector u = committee_uncertainty(committee_, gather_rows(data_.features, pool_.unlabeled));
    for (std::size_t i = 0; i < pool_.unlabeled.size(); ++i) {
      s(pool_.unlabeled[i]) = u(static_cast<Index>(i));
    }
    return s;
  };

  switch (strategy_) {
    case StrategyKind::Random:
      return random_select(pool_, n_b, derive_seed(seeds_.strategy, {"random", round_tag}));
    case StrategyKind::Disagreement:
      return disagreement_select(pool_, uncertainty_by_row(), n_b);
    case StrategyKind::GSx:
      return gsx_select(pool_, data_.features, n_b);
    case StrategyKind::IGS:
      return igs_select(pool_, data_.features, committee_mean(committee_, data_.features),
                        oracle_, n_b);
    case StrategyKind::InfoDensityEuclidean:
      return info_density_select(pool_, uncertainty_by_row(), data_.features, n_b,
                                 Similarity::Euclidean);
    case StrategyKind::InfoDensityCosine:
      return info_density_select(pool_, uncertainty_by_row(), data_.features, n_b,
                                 Similarity::Cosine);
    case StrategyKind::WAR: {
      const Vector uncertainty = uncertainty_by_row();
      const std::uint64_t critic_seed = derive_seed(seeds_.strategy, {"critic", round_tag});
      // A fresh critic every round; it is warm-started between the picks
      // of the round.
      CriticTrainer critic(
          make_critic(critic_spec(config_, static_cast<int>(data_.features.cols())),
                      critic_seed),
          config_.lr_critic);
      const RoundContext context{data_.features, full_sample_, uncertainty, mean_distance_};
      trace_ = SelectionTrace{};
      return select_batch(pool_, critic, context, config_, critic_seed,
                          keep_traces_ ? &trace_ : nullptr);
    }
  }
  throw StateError("unknown strategy");
}

void ActiveLearner::train_on_labeled() {
  Vector y(static_cast<Index>(pool_.labeled.size()));
  for (std::size_t i = 0; i < pool_.labeled.size(); ++i) {
    y(static_cast<Index>(i)) = oracle_.label(pool_.labeled[i]);
  }
  train_committee(committee_, gather_rows(data_.features, pool_.labeled), y, config_.epochs);
}

double ActiveLearner::test_rmse() const {
  const Vector prediction = committee_mean(committee_, gather_rows(data_.features, data_.test));
  return std::sqrt(mse_loss(prediction, gather(data_.targets, data_.test)).value);
}

LearningCurve run_strategy(const Dataset& data, StrategyKind strategy, const WarConfig& config,
                           RunSeeds seeds) {
  ActiveLearner learner(data, strategy, config, seeds);
  return learner.run();
}

LearningCurve run_war(const Dataset& data, const WarConfig& config, RunSeeds seeds) {
  return run_strategy(data, StrategyKind::WAR, config, seeds);
}

}  // namespace war
