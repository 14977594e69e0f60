#include "war/pool.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "war/errors.hpp"
#include "war/random.hpp"

namespace war {

PoolState make_pool(std::span<const Index> train, std::span<const Index> initial) {
  std::unordered_set<Index> train_set(train.begin(), train.end());
  std::unordered_set<Index> chosen;
  PoolState pool;
  for (Index row : initial) {
    if (!train_set.contains(row)) {
      throw StateError("initial row " + std::to_string(row) + " is not in the train split");
    }
    if (!chosen.insert(row).second) {
      throw StateError("initial row " + std::to_string(row) + " listed twice");
    }
    pool.labeled.push_back(row);
  }
  for (Index row : train) {
    if (!chosen.contains(row)) {
      pool.unlabeled.push_back(row);
    }
  }
  return pool;
}

void check_partition(const PoolState& pool, std::span<const Index> train) {
  std::unordered_set<Index> seen;
  auto absorb = [&](const std::vector<Index>& part, const char* name) {
    for (Index row : part) {
      if (!seen.insert(row).second) {
        throw StateError(std::string("row ") + std::to_string(row) + " repeated (in " +
                         name + ")");
      }
    }
  };
  absorb(pool.labeled, "labeled");
  absorb(pool.unlabeled, "unlabeled");
  absorb(pool.batch, "batch");
  std::unordered_set<Index> train_set(train.begin(), train.end());
  if (train_set.size() != seen.size()) {
    throw StateError("pool covers " + std::to_string(seen.size()) + " rows, train split has " +
                     std::to_string(train_set.size()));
  }
  for (Index row : seen) {
    if (!train_set.contains(row)) {
      throw StateError("pool row " + std::to_string(row) + " is outside the train split");
    }
  }
}

void move_to_batch(PoolState& pool, Index row) {
  auto it = std::find(pool.unlabeled.begin(), pool.unlabeled.end(), row);
  if (it == pool.unlabeled.end()) {
    throw StateError("row " + std::to_string(row) + " is not unlabeled");
  }
  pool.unlabeled.erase(it);
  pool.batch.push_back(row);
}

void commit_batch(PoolState& pool) {
  pool.labeled.insert(pool.labeled.end(), pool.batch.begin(), pool.batch.end());
  pool.batch.clear();
}

LabelOracle::LabelOracle(Vector targets)
    : targets_(std::move(targets)), revealed_(static_cast<std::size_t>(targets_.size()), false) {}

double LabelOracle::reveal(Index row) {
  if (row < 0 || row >= targets_.size()) {
    throw StateError("label row " + std::to_string(row) + " out of range");
  }
  if (!revealed_[static_cast<std::size_t>(row)]) {
    revealed_[static_cast<std::size_t>(row)] = true;
    ++reveal_count_;
  }
  return targets_(row);
}

double LabelOracle::label(Index row) const {
  if (!revealed(row)) {
    throw StateError("label of row " + std::to_string(row) + " read before reveal");
  }
  return targets_(row);
}

bool LabelOracle::revealed(Index row) const {
  return row >= 0 && row < targets_.size() && revealed_[static_cast<std::size_t>(row)];
}

Committee make_committee(const NetSpec& spec, int size, const AdamConfig& optimizer,
                         std::uint64_t seed) {
  if (size < 1) {
    throw ConfigError("committee needs at least one member");
  }
  Committee c;
  for (int i = 0; i < size; ++i) {
    c.members.push_back(init_net(spec, mix64(seed + static_cast<std::uint64_t>(i))));
    c.optimizers.push_back(AdamState::for_net(c.members.back(), optimizer));
  }
  return c;
}

void train_committee(Committee& committee, const Matrix& features, const Vector& targets,
                     int epochs) {
  if (features.rows() != targets.size()) {
    throw ShapeError("features and targets differ in length");
  }
  ForwardTape tape;
  for (std::size_t k = 0; k < committee.size(); ++k) {
    DenseNet& net = committee.members[k];
    for (int e = 0; e < epochs; ++e) {
      const Matrix out = net.forward(features, tape);
      const LossValue loss = mse_loss(out.col(0), targets);
      adam_step(net, net.backward(tape, loss.gradient), committee.optimizers[k]);
    }
  }
}

Matrix committee_predictions(const Committee& committee, const Matrix& features) {
  Matrix out(features.rows(), static_cast<Index>(committee.size()));
  for (std::size_t k = 0; k < committee.size(); ++k) {
    out.col(static_cast<Index>(k)) = committee.members[k].forward(features).col(0);
  }
  return out;
}

Vector committee_mean(const Committee& committee, const Matrix& features) {
  return committee_predictions(committee, features).rowwise().mean();
}

Vector row_population_std(const Matrix& predictions) {
  const Vector mean = predictions.rowwise().mean();
  const double k = static_cast<double>(predictions.cols());
  return ((predictions.colwise() - mean).rowwise().squaredNorm() / k).cwiseSqrt();
}

double committee_uncertainty(const Committee& committee, const Vector& x) {
  return committee_uncertainty(committee, Matrix(x.transpose()))(0);
}

Vector committee_uncertainty(const Committee& committee, const Matrix& features) {
  if (committee.size() < 2) {
    throw ConfigError("committee uncertainty needs at least two members");
  }
  return row_population_std(committee_predictions(committee, features));
}

Matrix gather_rows(const Matrix& source, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), source.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = source.row(rows[i]);
  }
  return out;
}

Vector gather(const Vector& source, std::span<const Index> rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out(static_cast<Index>(i)) = source(rows[i]);
  }
  return out;
}

}  // namespace war
