#pragma once

#include "ballistic/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ballistic {

/// Two-sample Ball Divergence of groups 0 and 1 of a pooled distance matrix.
///
/// Ball counts come from tie-inclusive row ranks: the within-group rank of
/// d(x_i, x_j) is n_1 P^{11}_{ij}, and its rank in the pooled row is
/// n_1 P^{11}_{ij} + n_2 P^{12}_{ij}. O(N^2 log N).
double bd_two_sample(const DistanceMatrix& dist, const GroupedSample& groups);

/// Univariate two-sample Ball Divergence with the two-pointer ball search.
/// Both inputs must be sorted ascending. O(N^2).
double bd_two_sample_univariate(std::span<const double> x1, std::span<const double> x2);

/// For a sorted sample and a center value taken from it, the closed ball
/// around the center through each position j is the position interval
/// bounds[j]. Tied radii share one interval. O(n).
std::vector<BoundPair> univariate_ball_bounds(std::span<const double> sorted, double center);

/// Ball sizes bounds[j].count() of `univariate_ball_bounds`.
std::vector<std::uint32_t> univariate_ball_counts(std::span<const double> sorted, double center);

/// Symmetric K-by-K table of two-sample BD values with zero diagonal.
class PairwiseBdTable {
  public:
    explicit PairwiseBdTable(std::size_t groups) : k_(groups), values_(groups * groups, 0.0) {}

    std::size_t groups() const noexcept { return k_; }
    double operator()(std::size_t s, std::size_t t) const noexcept { return values_[s * k_ + t]; }
    void set(std::size_t s, std::size_t t, double value) noexcept {
        values_[s * k_ + t] = value;
        values_[t * k_ + s] = value;
    }

  private:
    std::size_t k_;
    std::vector<double> values_;
};

/// Entry (s, t) is the two-sample BD of groups s and t alone.
PairwiseBdTable bd_pairwise(const DistanceMatrix& dist, const GroupedSample& groups);

/// Same table for univariate data, each pair through the O(N^2) fast path.
PairwiseBdTable bd_pairwise_univariate(std::span<const double> x, const GroupedSample& groups);

struct KSampleBd {
    double sum = 0.0;
    double summax = 0.0;
    double max = 0.0;

    double select(BdKind kind) const noexcept {
        switch (kind) {
            case BdKind::Sum: return sum;
            case BdKind::SumMax: return summax;
            case BdKind::Max: return max;
        }
        return sum;
    }
};

/// Sum of all pairs; largest per-group row sum; sum of the K-1 largest pairs.
KSampleBd bd_k_sample(const PairwiseBdTable& table);

/// Row-wise rank matrices of the shuffled groups s and t, and of their union
/// (group s members first, then group t), each member placed by its order of
/// appearance in the shuffled label vector.
struct ShuffledRanks {
    std::size_t n_s = 0;
    std::size_t n_t = 0;
    std::vector<std::uint32_t> within_s;
    std::vector<std::uint32_t> within_t;
    std::vector<std::uint32_t> pooled;

    std::uint32_t s_rank(std::size_t r, std::size_t c) const noexcept { return within_s[r * n_s + c]; }
    std::uint32_t t_rank(std::size_t r, std::size_t c) const noexcept { return within_t[r * n_t + c]; }
    std::uint32_t pooled_rank(std::size_t r, std::size_t c) const noexcept {
        return pooled[r * (n_s + n_t) + c];
    }
};

/// G_i = C_k + #{j < i : L*_j = k} for L*_i = k (zero-based positions).
std::vector<std::size_t> position_vector(std::span<const std::size_t> shuffled_labels, const GroupedSample& groups);

/// Rebuilds the rank matrices of the shuffled groups from the order matrix of
/// the unshuffled pooled sample, without re-sorting. O(N^2) per call.
ShuffledRanks reconstruct_shuffled_ranks(const RankStructures& pooled, std::span<const std::size_t> shuffled_labels,
                                         const GroupedSample& groups, std::size_t s, std::size_t t);

/// All pairwise BDs of the pooled sample relabelled by `labels`, accumulated in
/// one scan of the pooled order matrix. O(K N^2); the permutation engine's path.
PairwiseBdTable bd_pairwise_from_order(const RankStructures& pooled, std::span<const std::size_t> labels,
                                       const GroupedSample& groups);

}  // namespace ballistic
