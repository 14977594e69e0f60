#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "war/adam.hpp"
#include "war/dense_net.hpp"

namespace war {

/// Labeled set K, unlabeled set U and the batch B being assembled, all as
/// row indices into the dataset feature matrix.
struct PoolState {
  std::vector<Index> labeled;
  std::vector<Index> unlabeled;
  std::vector<Index> batch;
};

/// Pool over `train` with the given rows labeled and everything else in U.
/// Throws StateError if an initial index is outside `train` or repeated.
PoolState make_pool(std::span<const Index> train, std::span<const Index> initial);

/// Throws StateError unless K, U and B are pairwise disjoint, free of
/// duplicates, and together equal `train` (as sets).
void check_partition(const PoolState& pool, std::span<const Index> train);

/// Moves `row` from U to B. Throws StateError if it is not in U.
void move_to_batch(PoolState& pool, Index row);

/// K <- K + B, B <- {}.
void commit_batch(PoolState& pool);

/// Gatekeeper for the target column: a row's label can only be read after
/// it has been revealed, which the query loop does when it commits a batch.
class LabelOracle {
 public:
  explicit LabelOracle(Vector targets);

  double reveal(Index row);
  /// Throws StateError when `row` was never revealed.
  double label(Index row) const;
  bool revealed(Index row) const;
  std::size_t reveal_count() const { return reveal_count_; }

 private:
  Vector targets_;
  std::vector<bool> revealed_;
  std::size_t reveal_count_ = 0;
};

/// k estimators of identical architecture that differ only in their
/// initialization seed. Parameters and optimizer moments persist between
/// training calls.
struct Committee {
  std::vector<DenseNet> members;
  std::vector<AdamState> optimizers;

  std::size_t size() const { return members.size(); }
};

Committee make_committee(const NetSpec& spec, int size, const AdamConfig& optimizer,
                         std::uint64_t seed);

/// `epochs` full-batch Adam steps on the MSE of every member.
void train_committee(Committee& committee, const Matrix& features, const Vector& targets,
                     int epochs);

/// Member predictions, one column per member.
Matrix committee_predictions(const Committee& committee, const Matrix& features);

/// Member-mean prediction per row.
Vector committee_mean(const Committee& committee, const Matrix& features);

/// Population standard deviation of member predictions (divisor k).
/// Throws ConfigError when the committee has fewer than two members.
double committee_uncertainty(const Committee& committee, const Vector& x);
Vector committee_uncertainty(const Committee& committee, const Matrix& features);

/// Population standard deviation of each row of a predictions matrix.
Vector row_population_std(const Matrix& predictions);

/// Rows of `source` listed in `rows`.
Matrix gather_rows(const Matrix& source, std::span<const Index> rows);
Vector gather(const Vector& source, std::span<const Index> rows);

}  // namespace war
