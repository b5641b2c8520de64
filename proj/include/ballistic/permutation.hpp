#pragma once

#include "ballistic/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ballistic {

inline constexpr std::size_t kDefaultPermutations = 99;

enum class ShuffleMode { Labels, Margins };

/// Pregenerated permutations for a permutation test.
///
/// All permutations are drawn up front, in replicate order, from a single
/// stream seeded by `seed`, so results do not depend on how replicates are
/// later scheduled. In `Margins` mode each replicate holds one permutation for
/// every variable except the first, which stays fixed.
class PermutationPlan {
  public:
    static PermutationPlan shuffle_labels(std::size_t n, std::size_t replicates, std::uint64_t seed);
    static PermutationPlan shuffle_margins(std::size_t n, std::size_t variables, std::size_t replicates,
                                           std::uint64_t seed);

    ShuffleMode mode() const noexcept { return mode_; }
    std::size_t replicates() const noexcept { return replicates_; }
    std::size_t sample_size() const noexcept { return n_; }
    std::size_t variables() const noexcept { return variables_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Permutation of replicate m for shuffled slot `slot` (0 in Labels mode;
    /// variable slot + 1 in Margins mode).
    std::span<const std::uint32_t> permutation(std::size_t m, std::size_t slot = 0) const noexcept {
        return {perms_.data() + (m * slots() + slot) * n_, n_};
    }
    std::span<const std::uint32_t> inverse(std::size_t m, std::size_t slot = 0) const noexcept {
        return {inverses_.data() + (m * slots() + slot) * n_, n_};
    }

  private:
    std::size_t slots() const noexcept { return mode_ == ShuffleMode::Labels ? 1 : variables_ - 1; }

    ShuffleMode mode_ = ShuffleMode::Labels;
    std::size_t n_ = 0;
    std::size_t variables_ = 0;
    std::size_t replicates_ = 0;
    std::uint64_t seed_ = 0;
    std::vector<std::uint32_t> perms_;
    std::vector<std::uint32_t> inverses_;
};

/// (1 + #{m : null_m >= observed}) / (1 + M).
double p_value(double observed, std::span<const double> null_stats);

/// K-sample Ball Divergence permutation test. Every replicate relabels the
/// pooled sample and recomputes all pairwise BDs from the order matrix built
/// once up front. All three aggregations share the replicate stream.
TestResult bd_permutation_test(const DistanceMatrix& dist, const GroupedSample& groups, const PermutationPlan& plan,
                               BdKind kind, std::size_t threads = 0);

/// Univariate variant: the observed statistic takes the O(N^2) fast path.
TestResult bd_permutation_test_univariate(std::span<const double> x, const GroupedSample& groups,
                                          const PermutationPlan& plan, BdKind kind, std::size_t threads = 0);

/// Ball Covariance test of (mutual) independence. Every replicate permutes the
/// observations of variables 2..K independently.
TestResult bcov_permutation_test(std::span<const DistanceMatrix> dists, const PermutationPlan& plan,
                                 WeightKind weight, std::size_t threads = 0);

/// Null statistics of each replicate, in replicate order (for diagnostics and
/// distributional checks).
std::vector<double> bcov_null_statistics(std::span<const DistanceMatrix> dists, const PermutationPlan& plan,
                                         WeightKind weight, std::size_t threads = 0);

}  // namespace ballistic
