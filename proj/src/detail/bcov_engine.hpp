#pragma once

#include "ballistic/bcov.hpp"
#include "ballistic/counting.hpp"
#include "detail/accumulate.hpp"

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace ballistic::detail {

/// Sums BCov terms for all weights in a fixed (i, j) order.
class BcovAccumulator {
  public:
    BcovAccumulator(std::size_t n, std::size_t variables) : n_(static_cast<long double>(n)), k_(variables) {}

    /// joint = N P^mu_ij, marginal[k] = N P^{mu_k}_ij.
    void add(std::uint32_t joint, std::span<const std::uint32_t> marginal) noexcept;
    void add(std::uint32_t joint, std::uint32_t first, std::uint32_t second) noexcept {
        const std::uint32_t m[2] = {first, second};
        add(joint, m);
    }
    void merge(const BcovAccumulator& other) noexcept {
        constant_.add(other.constant_.value());
        probability_.add(other.probability_.value());
        chisquare_.add(other.chisquare_.value());
    }
    BcovTriple result() const noexcept;

  private:
    long double n_;
    std::size_t k_;
    CompensatedSum constant_, probability_, chisquare_;
};

/// Per-variable weighted marginal terms [P - P^K]^2 w^K summed over all balls.
BcovTriple marginal_variation(const RankStructures& ranks, std::size_t variables);

/// Sample permutation applied to one variable: observation i takes the values
/// of observation forward[i]. Empty means identity.
struct IndexPermutation {
    std::span<const std::uint32_t> forward;
    std::span<const std::uint32_t> inverse;

    std::size_t map(std::size_t i) const noexcept { return forward.empty() ? i : forward[i]; }
    std::size_t unmap(std::size_t u) const noexcept { return inverse.empty() ? u : inverse[u]; }
};

/// Joint counts of one row for two variables from their rank structures.
class JointRowCounter {
  public:
    void row(const RankStructures& first, const RankStructures& second, IndexPermutation second_perm,
             std::size_t i, std::span<std::uint32_t> joint);

  private:
    std::vector<std::pair<std::uint32_t, std::uint32_t>> entries_;
    std::vector<std::uint32_t> values_;
    std::vector<std::uint32_t> numbers_;
    LeqAfterSelfCounter<std::uint32_t> counter_;
};

/// Joint counts of one row for K variables by intersecting membership sets.
class MutualRowCounter {
  public:
    void row(std::span<const RankStructures* const> margins, std::span<const IndexPermutation> perms,
             std::size_t i, std::span<std::uint32_t> joint);

  private:
    std::vector<std::vector<std::uint64_t>> prefix_;
    std::vector<std::uint64_t> current_;
};

/// BCov of two variables from rank structures, second one permuted.
BcovTriple bcov_pair_ranked(const RankStructures& first, const RankStructures& second, IndexPermutation second_perm,
                            JointRowCounter& counter);

/// BCov of K variables from rank structures under per-variable permutations.
BcovTriple bcov_mutual_ranked(std::span<const RankStructures* const> margins, std::span<const IndexPermutation> perms,
                              std::size_t threads);

}  // namespace ballistic::detail
