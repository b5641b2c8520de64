#include "ballistic/bcov.hpp"

#include "ballistic/bd.hpp"
#include "ballistic/counting.hpp"
#include "detail/bcov_engine.hpp"
#include "detail/parallel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace ballistic {

namespace detail {

void BcovAccumulator::add(std::uint32_t joint, std::span<const std::uint32_t> marginal) noexcept {
    long double product = 1.0L;
    long double probability_weight = 1.0L;
    long double chisquare_weight = 1.0L;
    bool degenerate = false;
    for (std::uint32_t count : marginal) {
        const long double p = static_cast<long double>(count) / n_;
        product *= p;
        probability_weight /= p;
        if (count == static_cast<std::uint32_t>(n_)) {
            degenerate = true;
        } else {
            chisquare_weight /= p * (1.0L - p);
        }
    }
    const long double diff = static_cast<long double>(joint) / n_ - product;
    const long double squared = diff * diff;
    constant_.add(squared);
    probability_.add(squared * probability_weight);
    chisquare_.add(degenerate ? 0.0L : squared * chisquare_weight);
}

BcovTriple BcovAccumulator::result() const noexcept {
    const long double scale = n_ * n_;
    if (scale == 0.0L) return {};
    return {static_cast<double>(constant_.value() / scale), static_cast<double>(probability_.value() / scale),
            static_cast<double>(chisquare_.value() / scale)};
}

BcovTriple marginal_variation(const RankStructures& ranks, std::size_t variables) {
    const std::size_t n = ranks.n;
    const long double nn = static_cast<long double>(n);
    const int k = static_cast<int>(variables);
    CompensatedSum constant, probability, chisquare;
    for (std::uint32_t count : ranks.ranks) {
        const long double p = static_cast<long double>(count) / nn;
        const long double pk = std::pow(p, k);
        const long double diff = p - pk;
        const long double squared = diff * diff;
        constant.add(squared);
        probability.add(squared / pk);
        if (count != n) chisquare.add(squared / std::pow(p * (1.0L - p), k));
    }
    const long double scale = nn * nn;
    if (scale == 0.0L) return {};
    return {static_cast<double>(constant.value() / scale), static_cast<double>(probability.value() / scale),
            static_cast<double>(chisquare.value() / scale)};
}

void JointRowCounter::row(const RankStructures& first, const RankStructures& second, IndexPermutation second_perm,
                          std::size_t i, std::span<std::uint32_t> joint) {
    const std::size_t n = first.n;
    const auto order = first.order_row(i);
    const auto first_ranks = first.rank_row(i);
    const auto second_ranks = second.rank_row(second_perm.map(i));
    entries_.resize(n);
    values_.resize(n);
    numbers_.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        const std::uint32_t col = order[p];
        entries_[p] = {second_ranks[second_perm.map(col)], col};
    }
    // Within a tie block of the first variable, order by the second variable
    // descending (then column), so every later block member is no larger.
    std::size_t p = 0;
    while (p < n) {
        const std::size_t end = first_ranks[order[p]];
        if (end - p > 1) {
            std::sort(entries_.begin() + static_cast<std::ptrdiff_t>(p),
                      entries_.begin() + static_cast<std::ptrdiff_t>(end), [](const auto& a, const auto& b) {
                          return a.first > b.first || (a.first == b.first && a.second < b.second);
                      });
        }
        p = end;
    }
    for (std::size_t q = 0; q < n; ++q) values_[q] = entries_[q].first;
    counter_.run(values_, numbers_);
    p = 0;
    while (p < n) {
        const std::size_t end = first_ranks[order[p]];
        for (std::size_t q = p; q < end; ++q) {
            // #{t <= q : b_t <= b_q} plus the rest of the tie block.
            joint[entries_[q].second] =
                static_cast<std::uint32_t>(entries_[q].first - numbers_[q] + (end - 1 - q));
        }
        p = end;
    }
}

void MutualRowCounter::row(std::span<const RankStructures* const> margins, std::span<const IndexPermutation> perms,
                           std::size_t i, std::span<std::uint32_t> joint) {
    const std::size_t k = margins.size();
    const std::size_t n = margins.front()->n;
    const std::size_t words = (n + 63) / 64;
    prefix_.resize(k);
    current_.assign(words, 0);
    for (std::size_t m = 0; m < k; ++m) {
        const RankStructures& rs = *margins[m];
        const IndexPermutation& perm = perms[m];
        const std::size_t source = perm.map(i);
        const auto order = rs.order_row(source);
        const auto ranks = rs.rank_row(source);
        auto& prefix = prefix_[m];
        prefix.resize(n * words);
        std::fill(current_.begin(), current_.end(), 0);
        std::size_t p = 0;
        while (p < n) {
            const std::size_t end = ranks[order[p]];
            for (std::size_t q = p; q < end; ++q) {
                const std::size_t t = perm.unmap(order[q]);
                current_[t / 64] |= std::uint64_t{1} << (t % 64);
            }
            // Slot rank-1 holds the members of every ball with that rank.
            std::copy(current_.begin(), current_.end(), prefix.begin() + static_cast<std::ptrdiff_t>((end - 1) * words));
            p = end;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t* sets[16];
        std::vector<const std::uint64_t*> heap_sets;
        const std::uint64_t** set = sets;
        if (k > 16) {
            heap_sets.resize(k);
            set = heap_sets.data();
        }
        for (std::size_t m = 0; m < k; ++m) {
            const RankStructures& rs = *margins[m];
            const std::size_t rank = rs.rank(perms[m].map(i), perms[m].map(j));
            set[m] = prefix_[m].data() + (rank - 1) * words;
        }
        std::uint32_t count = 0;
        for (std::size_t w = 0; w < words; ++w) {
            std::uint64_t bits = set[0][w];
            for (std::size_t m = 1; m < k; ++m) bits &= set[m][w];
            count += static_cast<std::uint32_t>(std::popcount(bits));
        }
        joint[j] = count;
    }
}

BcovTriple bcov_pair_ranked(const RankStructures& first, const RankStructures& second, IndexPermutation second_perm,
                            JointRowCounter& counter) {
    const std::size_t n = first.n;
    std::vector<std::uint32_t> joint(n);
    BcovAccumulator acc(n, 2);
    for (std::size_t i = 0; i < n; ++i) {
        counter.row(first, second, second_perm, i, joint);
        const auto a = first.rank_row(i);
        const auto b = second.rank_row(second_perm.map(i));
        for (std::size_t j = 0; j < n; ++j) acc.add(joint[j], a[j], b[second_perm.map(j)]);
    }
    return acc.result();
}

BcovTriple bcov_mutual_ranked(std::span<const RankStructures* const> margins, std::span<const IndexPermutation> perms,
                              std::size_t threads) {
    const std::size_t k = margins.size();
    const std::size_t n = margins.front()->n;
    std::vector<BcovAccumulator> rows(n, BcovAccumulator(n, k));
    const std::size_t workers = std::min(resolve_threads(threads), std::max<std::size_t>(n, 1));
    std::vector<MutualRowCounter> counters(workers);
    std::vector<std::vector<std::uint32_t>> joints(workers, std::vector<std::uint32_t>(n));
    std::vector<std::vector<std::uint32_t>> marginals(workers, std::vector<std::uint32_t>(k));
    parallel_for(n, workers, [&](std::size_t i, std::size_t w) {
        auto& joint = joints[w];
        auto& marginal = marginals[w];
        counters[w].row(margins, perms, i, joint);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t m = 0; m < k; ++m) marginal[m] = margins[m]->rank(perms[m].map(i), perms[m].map(j));
            rows[i].add(joint[j], marginal);
        }
    });
    BcovAccumulator total(n, k);
    for (const auto& row : rows) total.merge(row);
    return total.result();
}

}  // namespace detail

namespace {

void require_same_size(const DistanceMatrix& a, const DistanceMatrix& b) {
    if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "variables have different sample sizes");
}

ProportionTable as_table(std::size_t n, std::vector<std::uint32_t> counts) {
    ProportionTable t;
    t.rows = n;
    t.cols = n;
    t.denominator = static_cast<std::uint32_t>(n);
    t.counts = std::move(counts);
    return t;
}

// Zero-based position of each observation in the stable ascending order.
std::vector<std::uint32_t> sorted_positions(std::span<const double> x, std::vector<double>& sorted) {
    const std::size_t n = x.size();
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });
    std::vector<std::uint32_t> pos(n);
    sorted.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
        pos[order[p]] = static_cast<std::uint32_t>(p);
        sorted[p] = x[order[p]];
    }
    return pos;
}

// Row-by-row joint counts of two univariate samples; visit(i, joint, a, b)
// receives original-order arrays.
template <class Visit>
void univariate_joint_rows(std::span<const double> x, std::span<const double> y, Visit&& visit) {
    if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "x and y have different lengths");
    const std::size_t n = x.size();
    std::vector<double> sx, sy;
    const std::vector<std::uint32_t> px = sorted_positions(x, sx);
    const std::vector<std::uint32_t> py = sorted_positions(y, sy);

    // ecdf[a * (n + 1) + b] = #{t : px[t] < a, py[t] < b}
    const std::size_t stride = n + 1;
    std::vector<std::uint32_t> ecdf(stride * stride, 0);
    for (std::size_t t = 0; t < n; ++t) ecdf[(px[t] + 1) * stride + (py[t] + 1)] = 1;
    for (std::size_t a = 1; a <= n; ++a) {
        std::uint32_t running = 0;
        for (std::size_t b = 1; b <= n; ++b) {
            running += ecdf[a * stride + b];
            ecdf[a * stride + b] = ecdf[(a - 1) * stride + b] + running;
        }
    }
    auto F = [&](std::size_t a, std::size_t b) { return ecdf[a * stride + b]; };

    std::vector<std::uint32_t> joint(n), a_counts(n), b_counts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<BoundPair> bx = univariate_ball_bounds(sx, x[i]);
        const std::vector<BoundPair> by = univariate_ball_bounds(sy, y[i]);
        for (std::size_t j = 0; j < n; ++j) {
            const BoundPair u = bx[px[j]];
            const BoundPair v = by[py[j]];
            joint[j] = F(u.r + 1, v.r + 1) - F(u.l, v.r + 1) - F(u.r + 1, v.l) + F(u.l, v.l);
            a_counts[j] = u.count();
            b_counts[j] = v.count();
        }
        visit(i, std::span<const std::uint32_t>(joint), std::span<const std::uint32_t>(a_counts),
              std::span<const std::uint32_t>(b_counts));
    }
}

}  // namespace

ProportionTable ball_proportions(const DistanceMatrix& dist) {
    RankStructures rs = rowwise_rank(dist);
    return as_table(dist.size(), std::move(rs.ranks));
}

ProportionTable joint_proportions(const DistanceMatrix& first, const DistanceMatrix& second) {
    require_same_size(first, second);
    const std::size_t n = first.size();
    const RankStructures r1 = rowwise_rank(first);
    const RankStructures r2 = rowwise_rank(second);
    std::vector<std::uint32_t> counts(n * n);
    detail::JointRowCounter counter;
    for (std::size_t i = 0; i < n; ++i) counter.row(r1, r2, {}, i, {counts.data() + i * n, n});
    return as_table(n, std::move(counts));
}

ProportionTable joint_proportions_univariate(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    std::vector<std::uint32_t> counts(n * n);
    univariate_joint_rows(x, y, [&](std::size_t i, auto joint, auto, auto) {
        std::copy(joint.begin(), joint.end(), counts.begin() + static_cast<std::ptrdiff_t>(i * n));
    });
    return as_table(n, std::move(counts));
}

BcovTriple bcov_pair(const DistanceMatrix& first, const DistanceMatrix& second) {
    require_same_size(first, second);
    const RankStructures r1 = rowwise_rank(first);
    const RankStructures r2 = rowwise_rank(second);
    detail::JointRowCounter counter;
    return detail::bcov_pair_ranked(r1, r2, {}, counter);
}

BcovTriple bcov_pair_univariate(std::span<const double> x, std::span<const double> y) {
    detail::BcovAccumulator acc(x.size(), 2);
    univariate_joint_rows(x, y, [&](std::size_t, auto joint, auto a, auto b) {
        for (std::size_t j = 0; j < joint.size(); ++j) acc.add(joint[j], a[j], b[j]);
    });
    return acc.result();
}

BcovTriple bcov_mutual(std::span<const DistanceMatrix> dists, std::size_t threads) {
    if (dists.size() < 2) throw Error(ErrorKind::TooFewVariables, "need at least two variables");
    for (const auto& d : dists) require_same_size(dists.front(), d);
    std::vector<RankStructures> ranks;
    ranks.reserve(dists.size());
    for (const auto& d : dists) ranks.push_back(rowwise_rank(d));
    std::vector<const RankStructures*> margins;
    for (const auto& r : ranks) margins.push_back(&r);
    const std::vector<detail::IndexPermutation> identity(dists.size());
    return detail::bcov_mutual_ranked(margins, identity, threads);
}

BcovTriple bcor_all(std::span<const DistanceMatrix> dists) {
    if (dists.size() < 2) throw Error(ErrorKind::TooFewVariables, "need at least two variables");
    const BcovTriple joint = dists.size() == 2 ? bcov_pair(dists[0], dists[1]) : bcov_mutual(dists);
    BcovTriple denominator{1.0, 1.0, 1.0};
    for (const auto& d : dists) {
        const BcovTriple v = detail::marginal_variation(rowwise_rank(d), dists.size());
        denominator.constant *= v.constant;
        denominator.probability *= v.probability;
        denominator.chisquare *= v.chisquare;
    }
    auto ratio = [](double num, double den) { return den > 0.0 ? num / std::sqrt(den) : 0.0; };
    return {ratio(joint.constant, denominator.constant), ratio(joint.probability, denominator.probability),
            ratio(joint.chisquare, denominator.chisquare)};
}

double bcor(std::span<const DistanceMatrix> dists, WeightKind weight) { return bcor_all(dists).select(weight); }

}  // namespace ballistic
