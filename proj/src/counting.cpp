#include "ballistic/counting.hpp"

#include <algorithm>
#include <numeric>

namespace ballistic {

CountResult count_leq_after_self(std::span<const double> values) {
    CountResult out;
    out.values.assign(values.begin(), values.end());
    out.numbers.assign(values.size(), 0);
    LeqAfterSelfCounter<double> counter;
    counter.run(out.values, out.numbers);
    return out;
}

void rank_row(std::span<const double> row, std::span<std::uint32_t> ranks, std::span<std::uint32_t> order) {
    const std::size_t n = row.size();
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return row[a] < row[b] || (row[a] == row[b] && a < b);
    });
    std::size_t p = 0;
    while (p < n) {
        std::size_t q = p + 1;
        while (q < n && row[order[q]] == row[order[p]]) ++q;
        for (std::size_t t = p; t < q; ++t) ranks[order[t]] = static_cast<std::uint32_t>(q);
        p = q;
    }
}

RankStructures rowwise_rank(const DistanceMatrix& dist) {
    RankStructures rs;
    rs.n = dist.size();
    rs.ranks.resize(rs.n * rs.n);
    rs.orders.resize(rs.n * rs.n);
    for (std::size_t i = 0; i < rs.n; ++i) {
        rank_row(dist.row(i), {rs.ranks.data() + i * rs.n, rs.n}, {rs.orders.data() + i * rs.n, rs.n});
    }
    return rs;
}

}  // namespace ballistic
