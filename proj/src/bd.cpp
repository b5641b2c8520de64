#include "ballistic/bd.hpp"

#include "ballistic/counting.hpp"
#include "detail/accumulate.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <iterator>

namespace ballistic {

namespace {

using detail::Wide;

void require_nonempty(std::size_t n, const char* what) {
    if (n == 0) throw Error(ErrorKind::EmptyGroup, std::string(what) + " is empty");
}

// BD of a pooled matrix whose first n1 observations form group 1.
double bd_contiguous(const DistanceMatrix& pooled, std::size_t n1) {
    const std::size_t n = pooled.size();
    const std::size_t n2 = n - n1;
    std::vector<std::size_t> first(n1), second(n2);
    for (std::size_t i = 0; i < n1; ++i) first[i] = i;
    for (std::size_t i = 0; i < n2; ++i) second[i] = n1 + i;

    const RankStructures pooled_ranks = rowwise_rank(pooled);
    const RankStructures first_ranks = rowwise_rank(pooled.submatrix(first));
    const RankStructures second_ranks = rowwise_rank(pooled.submatrix(second));

    Wide sum1 = 0;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
            const std::uint64_t own = first_ranks.rank(i, j);
            const std::uint64_t other = pooled_ranks.rank(i, j) - own;
            sum1 += detail::bd_term(own, other, n1, n2);
        }
    }
    Wide sum2 = 0;
    for (std::size_t k = 0; k < n2; ++k) {
        for (std::size_t l = 0; l < n2; ++l) {
            const std::uint64_t own = second_ranks.rank(k, l);
            const std::uint64_t other = pooled_ranks.rank(n1 + k, n1 + l) - own;
            sum2 += detail::bd_term(own, other, n2, n1);
        }
    }
    return detail::bd_from_sums(sum1, sum2, n1, n2);
}

void require_sorted(std::span<const double> x) {
    if (!std::is_sorted(x.begin(), x.end())) throw Error(ErrorKind::UnsortedInput, "input must be sorted ascending");
}

// Two-pointer ball search; writes bounds for every position of `sorted`.
void ball_bounds_into(std::span<const double> sorted, double center, std::span<BoundPair> bounds) {
    std::ptrdiff_t l = 0;
    std::ptrdiff_t r = static_cast<std::ptrdiff_t>(sorted.size()) - 1;
    bool has_previous = false;
    double previous_radius = 0.0;
    BoundPair previous{};
    while (l <= r) {
        const double right = sorted[r] - center;
        const double left = center - sorted[l];
        const bool take_right = right >= left;
        const double radius = take_right ? right : left;
        const std::ptrdiff_t at = take_right ? r : l;
        // Radii arrive in non-increasing order; an equal radius is the same ball.
        if (!has_previous || radius != previous_radius) {
            previous = {static_cast<std::uint32_t>(l), static_cast<std::uint32_t>(r)};
            previous_radius = radius;
            has_previous = true;
        }
        bounds[at] = previous;
        if (take_right) {
            --r;
        } else {
            ++l;
        }
    }
}

void ball_counts_into(std::span<const double> sorted, double center, std::vector<BoundPair>& scratch,
                      std::span<std::uint32_t> counts) {
    scratch.resize(sorted.size());
    ball_bounds_into(sorted, center, scratch);
    for (std::size_t j = 0; j < sorted.size(); ++j) counts[j] = scratch[j].count();
}

// Sum over balls centred in `own` of the integer-scaled squared discrepancy.
Wide univariate_group_sum(std::span<const double> own, std::span<const double> pooled,
                          std::span<const std::size_t> own_in_pooled, std::size_t n_other) {
    const std::size_t n_own = own.size();
    std::vector<BoundPair> scratch;
    std::vector<std::uint32_t> within(n_own), total(pooled.size());
    Wide sum = 0;
    for (std::size_t i = 0; i < n_own; ++i) {
        ball_counts_into(own, own[i], scratch, within);
        ball_counts_into(pooled, own[i], scratch, total);
        for (std::size_t j = 0; j < n_own; ++j) {
            const std::uint64_t a = within[j];
            const std::uint64_t b = total[own_in_pooled[j]] - a;
            sum += detail::bd_term(a, b, n_own, n_other);
        }
    }
    return sum;
}

}  // namespace

double bd_two_sample(const DistanceMatrix& dist, const GroupedSample& groups) {
    if (groups.groups() != 2) {
        throw Error(ErrorKind::InvalidArgument, "two-sample BD needs exactly two groups");
    }
    if (groups.total() != dist.size()) {
        throw Error(ErrorKind::DimensionMismatch, "group labels do not match the distance matrix");
    }
    std::vector<std::size_t> index = groups.members(0);
    const std::size_t n1 = index.size();
    const std::vector<std::size_t> second = groups.members(1);
    require_nonempty(n1, "group 1");
    require_nonempty(second.size(), "group 2");
    index.insert(index.end(), second.begin(), second.end());
    return bd_contiguous(dist.submatrix(index), n1);
}

std::vector<BoundPair> univariate_ball_bounds(std::span<const double> sorted, double center) {
    std::vector<BoundPair> bounds(sorted.size());
    ball_bounds_into(sorted, center, bounds);
    return bounds;
}

std::vector<std::uint32_t> univariate_ball_counts(std::span<const double> sorted, double center) {
    std::vector<BoundPair> scratch;
    std::vector<std::uint32_t> counts(sorted.size());
    ball_counts_into(sorted, center, scratch, counts);
    return counts;
}

double bd_two_sample_univariate(std::span<const double> x1, std::span<const double> x2) {
    require_nonempty(x1.size(), "group 1");
    require_nonempty(x2.size(), "group 2");
    require_sorted(x1);
    require_sorted(x2);
    std::vector<double> pooled;
    pooled.reserve(x1.size() + x2.size());
    std::merge(x1.begin(), x1.end(), x2.begin(), x2.end(), std::back_inserter(pooled));

    auto positions = [&](std::span<const double> x) {
        std::vector<std::size_t> pos(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            pos[j] = static_cast<std::size_t>(std::lower_bound(pooled.begin(), pooled.end(), x[j]) - pooled.begin());
        }
        return pos;
    };
    const Wide sum1 = univariate_group_sum(x1, pooled, positions(x1), x2.size());
    const Wide sum2 = univariate_group_sum(x2, pooled, positions(x2), x1.size());
    return detail::bd_from_sums(sum1, sum2, x1.size(), x2.size());
}

PairwiseBdTable bd_pairwise(const DistanceMatrix& dist, const GroupedSample& groups) {
    const std::size_t k = groups.groups();
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "need at least two groups");
    if (groups.total() != dist.size()) {
        throw Error(ErrorKind::DimensionMismatch, "group labels do not match the distance matrix");
    }
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t g = 0; g < k; ++g) members[g] = groups.members(g);
    PairwiseBdTable table(k);
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = s + 1; t < k; ++t) {
            std::vector<std::size_t> index = members[s];
            index.insert(index.end(), members[t].begin(), members[t].end());
            table.set(s, t, bd_contiguous(dist.submatrix(index), members[s].size()));
        }
    }
    return table;
}

PairwiseBdTable bd_pairwise_univariate(std::span<const double> x, const GroupedSample& groups) {
    const std::size_t k = groups.groups();
    if (k < 2) throw Error(ErrorKind::InvalidArgument, "need at least two groups");
    if (groups.total() != x.size()) throw Error(ErrorKind::LengthMismatch, "group labels do not match the data");
    std::vector<std::vector<double>> values(k);
    for (std::size_t i = 0; i < x.size(); ++i) values[groups.labels()[i]].push_back(x[i]);
    for (auto& v : values) std::sort(v.begin(), v.end());
    PairwiseBdTable table(k);
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = s + 1; t < k; ++t) table.set(s, t, bd_two_sample_univariate(values[s], values[t]));
    }
    return table;
}

KSampleBd bd_k_sample(const PairwiseBdTable& table) {
    const std::size_t k = table.groups();
    KSampleBd out;
    std::vector<double> entries;
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = s + 1; t < k; ++t) {
            out.sum += table(s, t);
            entries.push_back(table(s, t));
        }
    }
    for (std::size_t t = 0; t < k; ++t) {
        double row = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            if (s != t) row += table(s, t);
        }
        out.summax = std::max(out.summax, row);
    }
    const std::size_t keep = std::min(entries.size(), k - 1);
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(),
                      std::greater<>());
    for (std::size_t i = 0; i < keep; ++i) out.max += entries[i];
    return out;
}

namespace {

void check_label_counts(std::span<const std::size_t> labels, const GroupedSample& groups) {
    if (labels.size() != groups.total()) {
        throw Error(ErrorKind::LabelCountMismatch, "label vector length differs from the sample size");
    }
    std::vector<std::size_t> counts(groups.groups(), 0);
    for (std::size_t label : labels) {
        if (label >= counts.size()) throw Error(ErrorKind::LabelCountMismatch, "label out of range");
        ++counts[label];
    }
    for (std::size_t g = 0; g < counts.size(); ++g) {
        if (counts[g] != groups.size(g)) {
            throw Error(ErrorKind::LabelCountMismatch, "shuffled labels change the group sizes");
        }
    }
}

}  // namespace

std::vector<std::size_t> position_vector(std::span<const std::size_t> shuffled_labels, const GroupedSample& groups) {
    check_label_counts(shuffled_labels, groups);
    std::vector<std::size_t> seen(groups.groups(), 0);
    std::vector<std::size_t> g(shuffled_labels.size());
    for (std::size_t i = 0; i < shuffled_labels.size(); ++i) {
        const std::size_t k = shuffled_labels[i];
        g[i] = groups.offsets()[k] + seen[k]++;
    }
    return g;
}

ShuffledRanks reconstruct_shuffled_ranks(const RankStructures& pooled, std::span<const std::size_t> shuffled_labels,
                                         const GroupedSample& groups, std::size_t s, std::size_t t) {
    if (pooled.n != groups.total()) {
        throw Error(ErrorKind::DimensionMismatch, "order matrix does not match the sample");
    }
    if (s == t || s >= groups.groups() || t >= groups.groups()) {
        throw Error(ErrorKind::InvalidArgument, "invalid group pair");
    }
    const std::vector<std::size_t> g = position_vector(shuffled_labels, groups);
    const std::size_t n = pooled.n;
    const std::size_t cs = groups.offsets()[s];
    const std::size_t ct = groups.offsets()[t];
    ShuffledRanks out;
    out.n_s = groups.size(s);
    out.n_t = groups.size(t);
    const std::size_t nst = out.n_s + out.n_t;
    out.within_s.assign(out.n_s * out.n_s, 0);
    out.within_t.assign(out.n_t * out.n_t, 0);
    out.pooled.assign(nst * nst, 0);

    // Row/column of an observation inside the (s, t) union matrix.
    auto union_index = [&](std::size_t obs) {
        return shuffled_labels[obs] == s ? g[obs] - cs : g[obs] - ct + out.n_s;
    };

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t gi = shuffled_labels[i];
        if (gi != s && gi != t) continue;
        const auto order = pooled.order_row(i);
        const auto ranks = pooled.rank_row(i);
        std::uint32_t rank_s = 0, rank_t = 0, rank_st = 0;
        const std::size_t r_union = union_index(i);
        std::size_t p = 0;
        while (p < n) {
            // Tied entries occupy sorted positions [p, rank - 1].
            const std::size_t end = ranks[order[p]];
            for (std::size_t q = p; q < end; ++q) {
                const std::size_t label = shuffled_labels[order[q]];
                if (label == s) {
                    ++rank_s;
                    ++rank_st;
                } else if (label == t) {
                    ++rank_t;
                    ++rank_st;
                }
            }
            for (std::size_t q = p; q < end; ++q) {
                const std::size_t o = order[q];
                const std::size_t go = shuffled_labels[o];
                if (go != s && go != t) continue;
                out.pooled[r_union * nst + union_index(o)] = rank_st;
                if (go == gi) {
                    if (gi == s) {
                        out.within_s[(g[i] - cs) * out.n_s + (g[o] - cs)] = rank_s;
                    } else {
                        out.within_t[(g[i] - ct) * out.n_t + (g[o] - ct)] = rank_t;
                    }
                }
            }
            p = end;
        }
    }
    return out;
}

PairwiseBdTable bd_pairwise_from_order(const RankStructures& pooled, std::span<const std::size_t> labels,
                                       const GroupedSample& groups) {
    check_label_counts(labels, groups);
    if (pooled.n != groups.total()) {
        throw Error(ErrorKind::DimensionMismatch, "order matrix does not match the sample");
    }
    const std::size_t n = pooled.n;
    const std::size_t k = groups.groups();
    std::vector<Wide> sums(k * k, 0);  // sums[g * k + h]: balls centred in g, compared with h
    std::vector<std::uint64_t> counts(k);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t g = labels[i];
        const std::uint64_t n_g = groups.size(g);
        const auto order = pooled.order_row(i);
        const auto ranks = pooled.rank_row(i);
        std::fill(counts.begin(), counts.end(), 0);
        Wide* row_sums = sums.data() + g * k;
        std::size_t p = 0;
        while (p < n) {
            const std::size_t end = ranks[order[p]];
            std::uint64_t own_members = 0;
            for (std::size_t q = p; q < end; ++q) {
                const std::size_t label = labels[order[q]];
                ++counts[label];
                own_members += label == g;
            }
            if (own_members != 0) {
                for (std::size_t h = 0; h < k; ++h) {
                    if (h == g) continue;
                    row_sums[h] += static_cast<Wide>(own_members) *
                                   detail::bd_term(counts[g], counts[h], n_g, groups.size(h));
                }
            }
            p = end;
        }
    }
    PairwiseBdTable table(k);
    for (std::size_t s = 0; s < k; ++s) {
        for (std::size_t t = s + 1; t < k; ++t) {
            table.set(s, t, detail::bd_from_sums(sums[s * k + t], sums[t * k + s], groups.size(s), groups.size(t)));
        }
    }
    return table;
}

}  // namespace ballistic
