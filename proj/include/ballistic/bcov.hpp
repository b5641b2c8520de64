#pragma once

#include "ballistic/types.hpp"

#include <span>
#include <vector>

namespace ballistic {

/// Ball Covariance (or Correlation) under the three weight choices.
struct BcovTriple {
    double constant = 0.0;
    double probability = 0.0;
    double chisquare = 0.0;

    double select(WeightKind kind) const noexcept {
        switch (kind) {
            case WeightKind::Constant: return constant;
            case WeightKind::Probability: return probability;
            case WeightKind::ChiSquare: return chisquare;
        }
        return constant;
    }
};

/// Marginal ball counts N P^{mu_k}_{ij}, i.e. tie-inclusive row ranks.
ProportionTable ball_proportions(const DistanceMatrix& dist);

/// Joint ball counts N P^{mu}_{ij} of two variables. Each row is sorted by the
/// first variable once; the counts then follow from the "no larger after self"
/// counts of the second variable's ranks. O(N^2 log N).
ProportionTable joint_proportions(const DistanceMatrix& first, const DistanceMatrix& second);

/// Joint ball counts of two univariate samples from the two-pointer bounds and
/// inclusion-exclusion on the rank-grid empirical CDF. O(N^2).
ProportionTable joint_proportions_univariate(std::span<const double> x, std::span<const double> y);

/// Two-variable Ball Covariance. O(N^2 log N).
///
/// Chi-square terms whose marginal proportion equals 1 contribute zero (the
/// weight is undefined there).
BcovTriple bcov_pair(const DistanceMatrix& first, const DistanceMatrix& second);

/// Two-variable Ball Covariance of univariate samples. O(N^2).
BcovTriple bcov_pair_univariate(std::span<const double> x, std::span<const double> y);

/// Ball Covariance of K >= 2 variables by direct evaluation of every joint
/// ball (word-parallel membership sets). O(K N^3 / 64). Rows are spread over
/// `threads` workers (0 = all cores); the result does not depend on it.
BcovTriple bcov_mutual(std::span<const DistanceMatrix> dists, std::size_t threads = 1);

/// Ball Correlation for all weights: BCov / sqrt(prod_k BCov(mu_k)), or 0 when
/// the product vanishes. This is the squared form of the correlation; take
/// std::sqrt of it for the root form.
BcovTriple bcor_all(std::span<const DistanceMatrix> dists);

/// One weight of `bcor_all`.
double bcor(std::span<const DistanceMatrix> dists, WeightKind weight);

}  // namespace ballistic
