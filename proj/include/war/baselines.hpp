#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "war/pool.hpp"

namespace war {

enum class StrategyKind {
  Random,
  Disagreement,
  GSx,
  IGS,
  InfoDensityEuclidean,
  InfoDensityCosine,
  WAR,
};

inline constexpr StrategyKind kAllStrategies[] = {
    StrategyKind::Random,        StrategyKind::Disagreement,
    StrategyKind::GSx,           StrategyKind::IGS,
    StrategyKind::InfoDensityEuclidean, StrategyKind::InfoDensityCosine,
    StrategyKind::WAR,
};

/// Short identifier used in config files, record names and tables.
std::string_view strategy_name(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view name);

/// Uniform draw of min(n_B, |U|) rows of U without replacement.
std::vector<Index> random_select(const PoolState& pool, int batch_size, std::uint64_t seed);

/// The rows of U with the largest committee disagreement, in decreasing
/// order; ties go to the smaller row index. `uncertainty` is indexed by
/// dataset row.
std::vector<Index> disagreement_select(const PoolState& pool, const Vector& uncertainty,
                                       int batch_size);
std::vector<Index> disagreement_select(const PoolState& pool, const Committee& committee,
                                       const Matrix& features, int batch_size);

/// Greedy sampling on the inputs (Wu, Lin and Huang, 2019): repeatedly take
/// the row of U farthest (Euclidean) from its nearest neighbour in K + B.
std::vector<Index> gsx_select(const PoolState& pool, const Matrix& features, int batch_size);

/// Improved greedy sampling (Wu, Lin and Huang, 2019): maximize
///   min_{z in K+B} |x - z|_2  *  min_{z in K+B} |f(x) - y_z|
/// where y_z is the revealed label for z in K and the surrogate f(z) for z
/// already placed in B. `predictions` is the estimator output per dataset
/// row; `labels` must have every row of K revealed.
std::vector<Index> igs_select(const PoolState& pool, const Matrix& features,
                              const Vector& predictions, const LabelOracle& labels,
                              int batch_size);

enum class Similarity { Euclidean, Cosine };

/// Information density weight (1/n) sum_i sim(x, X_i) over the full sample,
/// with sim = 1 / (1 + |x - X_i|_2) or the cosine similarity (0 when either
/// vector is zero).
Vector information_density(const Matrix& full_sample, const Matrix& candidates,
                           Similarity similarity);

/// Information density sampling (Settles and Craven, 2008) with exponent 1:
/// top n_B rows of U by s_h(x) * density(x). `uncertainty` is indexed by
/// dataset row; the full sample is K + U + B.
std::vector<Index> info_density_select(const PoolState& pool, const Vector& uncertainty,
                                       const Matrix& features, int batch_size,
                                       Similarity similarity);

}  // namespace war
