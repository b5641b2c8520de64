#include "ballistic/permutation.hpp"

#include "ballistic/bcov.hpp"
#include "ballistic/bd.hpp"
#include "ballistic/counting.hpp"
#include "ballistic/metrics.hpp"
#include "detail/bcov_engine.hpp"
#include "detail/parallel.hpp"

#include <array>
#include <limits>
#include <numeric>
#include <random>

namespace ballistic {

namespace {

// Uniform integer in [0, bound) by rejection; avoids the implementation-defined
// std::uniform_int_distribution so streams match across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % bound;
}

void fisher_yates(std::mt19937_64& rng, std::span<std::uint32_t> perm, std::span<std::uint32_t> inverse) {
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = perm.size(); i > 1; --i) {
        const std::size_t j = uniform_below(rng, i);
        std::swap(perm[i - 1], perm[j]);
    }
    for (std::size_t i = 0; i < perm.size(); ++i) inverse[perm[i]] = static_cast<std::uint32_t>(i);
}

void fill_plan(std::vector<std::uint32_t>& perms, std::vector<std::uint32_t>& inverses, std::size_t count,
               std::size_t n, std::uint64_t seed) {
    perms.resize(count * n);
    inverses.resize(count * n);
    std::mt19937_64 rng(seed);
    for (std::size_t c = 0; c < count; ++c) {
        fisher_yates(rng, {perms.data() + c * n, n}, {inverses.data() + c * n, n});
    }
}

constexpr std::array<BdKind, 3> kBdKinds{BdKind::Sum, BdKind::SumMax, BdKind::Max};
constexpr std::array<WeightKind, 3> kWeightKinds{WeightKind::Constant, WeightKind::Probability, WeightKind::ChiSquare};

template <class Stats, class Kind, std::size_t N>
TestResult assemble(Family family, const std::string& prefix, const std::array<Kind, N>& kinds, Kind chosen,
                    const Stats& observed, const std::vector<Stats>& nulls, std::vector<std::size_t> sizes) {
    TestResult result;
    result.family = family;
    result.variant = std::string(to_string(chosen));
    result.replicates = nulls.size();
    result.sizes = std::move(sizes);
    std::vector<double> column(nulls.size());
    for (Kind kind : kinds) {
        VariantResult v;
        v.name = prefix + "." + std::string(to_string(kind));
        v.statistic = observed.select(kind);
        if (!nulls.empty()) {
            for (std::size_t m = 0; m < nulls.size(); ++m) column[m] = nulls[m].select(kind);
            v.p_value = p_value(v.statistic, column);
        }
        if (kind == chosen) {
            result.statistic = v.statistic;
            result.p_value = v.p_value;
        }
        result.complete_info.push_back(std::move(v));
    }
    return result;
}

void require_plan(const PermutationPlan& plan, ShuffleMode mode, std::size_t n) {
    if (plan.mode() != mode) throw Error(ErrorKind::InvalidArgument, "permutation plan has the wrong mode");
    if (plan.replicates() > 0 && plan.sample_size() != n) {
        throw Error(ErrorKind::DimensionMismatch, "permutation plan was built for another sample size");
    }
}

std::vector<KSampleBd> bd_nulls(const RankStructures& pooled, const GroupedSample& groups,
                                const PermutationPlan& plan, std::size_t threads) {
    const std::size_t n = groups.total();
    const std::size_t workers = detail::resolve_threads(threads);
    std::vector<std::vector<std::size_t>> labels(workers, std::vector<std::size_t>(n));
    std::vector<KSampleBd> nulls(plan.replicates());
    detail::parallel_for(plan.replicates(), workers, [&](std::size_t m, std::size_t w) {
        const auto perm = plan.permutation(m);
        auto& shuffled = labels[w];
        for (std::size_t i = 0; i < n; ++i) shuffled[i] = groups.labels()[perm[i]];
        nulls[m] = bd_k_sample(bd_pairwise_from_order(pooled, shuffled, groups));
    });
    return nulls;
}

std::vector<std::size_t> as_vector(std::span<const std::size_t> s) { return {s.begin(), s.end()}; }

}  // namespace

PermutationPlan PermutationPlan::shuffle_labels(std::size_t n, std::size_t replicates, std::uint64_t seed) {
    PermutationPlan plan;
    plan.mode_ = ShuffleMode::Labels;
    plan.n_ = n;
    plan.variables_ = 1;
    plan.replicates_ = replicates;
    plan.seed_ = seed;
    fill_plan(plan.perms_, plan.inverses_, replicates, n, seed);
    return plan;
}

PermutationPlan PermutationPlan::shuffle_margins(std::size_t n, std::size_t variables, std::size_t replicates,
                                                 std::uint64_t seed) {
    if (variables < 2) throw Error(ErrorKind::TooFewVariables, "need at least two variables");
    PermutationPlan plan;
    plan.mode_ = ShuffleMode::Margins;
    plan.n_ = n;
    plan.variables_ = variables;
    plan.replicates_ = replicates;
    plan.seed_ = seed;
    fill_plan(plan.perms_, plan.inverses_, replicates * (variables - 1), n, seed);
    return plan;
}

double p_value(double observed, std::span<const double> null_stats) {
    if (null_stats.empty()) throw Error(ErrorKind::EmptyNullSample, "no null statistics");
    std::size_t exceed = 0;
    for (double b : null_stats) exceed += b >= observed;
    return static_cast<double>(1 + exceed) / static_cast<double>(1 + null_stats.size());
}

TestResult bd_permutation_test(const DistanceMatrix& dist, const GroupedSample& groups, const PermutationPlan& plan,
                               BdKind kind, std::size_t threads) {
    require_plan(plan, ShuffleMode::Labels, dist.size());
    const KSampleBd observed = bd_k_sample(bd_pairwise(dist, groups));
    std::vector<KSampleBd> nulls;
    if (plan.replicates() > 0) nulls = bd_nulls(rowwise_rank(dist), groups, plan, threads);
    return assemble(Family::BallDivergence, "bd", kBdKinds, kind, observed, nulls, as_vector(groups.sizes()));
}

TestResult bd_permutation_test_univariate(std::span<const double> x, const GroupedSample& groups,
                                          const PermutationPlan& plan, BdKind kind, std::size_t threads) {
    require_plan(plan, ShuffleMode::Labels, x.size());
    const KSampleBd observed = bd_k_sample(bd_pairwise_univariate(x, groups));
    std::vector<KSampleBd> nulls;
    if (plan.replicates() > 0) {
        nulls = bd_nulls(rowwise_rank(euclidean_distances(PointSet::column(x))), groups, plan, threads);
    }
    return assemble(Family::BallDivergence, "bd", kBdKinds, kind, observed, nulls, as_vector(groups.sizes()));
}

namespace {

struct BcovRun {
    BcovTriple observed;
    std::vector<BcovTriple> nulls;
};

BcovRun run_bcov(std::span<const DistanceMatrix> dists, const PermutationPlan& plan, std::size_t threads) {
    const std::size_t k = dists.size();
    if (k < 2) throw Error(ErrorKind::TooFewVariables, "need at least two variables");
    const std::size_t n = dists.front().size();
    for (const auto& d : dists) {
        if (d.size() != n) throw Error(ErrorKind::DimensionMismatch, "variables have different sample sizes");
    }
    require_plan(plan, ShuffleMode::Margins, n);
    if (plan.replicates() > 0 && plan.variables() != k) {
        throw Error(ErrorKind::DimensionMismatch, "permutation plan was built for another variable count");
    }
    std::vector<RankStructures> ranks;
    for (const auto& d : dists) ranks.push_back(rowwise_rank(d));
    const std::size_t workers = detail::resolve_threads(threads);

    BcovRun run;
    run.nulls.resize(plan.replicates());
    if (k == 2) {
        detail::JointRowCounter counter;
        run.observed = detail::bcov_pair_ranked(ranks[0], ranks[1], {}, counter);
        std::vector<detail::JointRowCounter> counters(workers);
        detail::parallel_for(plan.replicates(), workers, [&](std::size_t m, std::size_t w) {
            const detail::IndexPermutation perm{plan.permutation(m), plan.inverse(m)};
            run.nulls[m] = detail::bcov_pair_ranked(ranks[0], ranks[1], perm, counters[w]);
        });
    } else {
        std::vector<const RankStructures*> margins;
        for (const auto& r : ranks) margins.push_back(&r);
        const std::vector<detail::IndexPermutation> identity(k);
        run.observed = detail::bcov_mutual_ranked(margins, identity, workers);
        detail::parallel_for(plan.replicates(), workers, [&](std::size_t m, std::size_t) {
            std::vector<detail::IndexPermutation> perms(k);
            for (std::size_t v = 1; v < k; ++v) perms[v] = {plan.permutation(m, v - 1), plan.inverse(m, v - 1)};
            run.nulls[m] = detail::bcov_mutual_ranked(margins, perms, 1);
        });
    }
    return run;
}

}  // namespace

TestResult bcov_permutation_test(std::span<const DistanceMatrix> dists, const PermutationPlan& plan,
                                 WeightKind weight, std::size_t threads) {
    const BcovRun run = run_bcov(dists, plan, threads);
    return assemble(Family::BallCovariance, "bcov", kWeightKinds, weight, run.observed, run.nulls,
                    {dists.front().size()});
}

std::vector<double> bcov_null_statistics(std::span<const DistanceMatrix> dists, const PermutationPlan& plan,
                                         WeightKind weight, std::size_t threads) {
    const BcovRun run = run_bcov(dists, plan, threads);
    std::vector<double> out;
    out.reserve(run.nulls.size());
    for (const auto& t : run.nulls) out.push_back(t.select(weight));
    return out;
}

}  // namespace ballistic
