#include "ballistic/simulate.hpp"

#include "ballistic/bd.hpp"
#include "ballistic/metrics.hpp"
#include "ballistic/permutation.hpp"
#include "ballistic/types.hpp"
#include "detail/parallel.hpp"

#include <array>
#include <map>
#include <random>

namespace ballistic {

namespace {

constexpr std::array<std::pair<std::string_view, Scenario>, 5> kScenarios{{
    {"null-univariate", Scenario::NullUnivariate},
    {"shift-univariate", Scenario::ShiftUnivariate},
    {"null-pair", Scenario::NullPair},
    {"xor-mutual", Scenario::XorMutual},
    {"circle-mixture", Scenario::CircleMixture},
}};

std::vector<double> normals(std::mt19937_64& rng, std::size_t n, double mean) {
    std::normal_distribution<double> dist(mean, 1.0);
    std::vector<double> out(n);
    for (auto& v : out) v = dist(rng);
    return out;
}

std::vector<double> coin_flips(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = static_cast<double>(rng() >> 63);
    return out;
}

// Rows of 2-D unit vectors: one of two antipodal points with equal probability.
void two_point_circle(std::mt19937_64& rng, std::size_t n, bool vertical, std::size_t& offset,
                      std::vector<double>& flat) {
    for (std::size_t i = 0; i < n; ++i) {
        const double sign = (rng() >> 63) ? 1.0 : -1.0;
        flat[offset++] = vertical ? 0.0 : sign;
        flat[offset++] = vertical ? sign : 0.0;
    }
}

using Outcome = std::vector<std::pair<std::string, bool>>;

Outcome run_one(const SimulationConfig& config, std::uint64_t data_seed, std::uint64_t plan_seed) {
    const std::size_t n = config.n;
    const std::size_t m = config.permutations;
    Outcome out;
    auto reject = [&](const TestResult& r, const std::string& prefix) {
        for (const auto& v : r.complete_info) out.emplace_back(prefix + v.name, v.p_value && *v.p_value <= config.level);
    };
    const auto sample = scenario_sample(config.scenario, n, data_seed, config.shift);
    switch (config.scenario) {
        case Scenario::NullUnivariate:
        case Scenario::ShiftUnivariate:
        case Scenario::CircleMixture: {
            const GroupedSample groups = GroupedSample::from_sizes({n, n});
            const PermutationPlan plan = PermutationPlan::shuffle_labels(2 * n, m, plan_seed);
            TestResult r;
            if (config.scenario == Scenario::CircleMixture) {
                const DistanceMatrix d = great_circle_distances(PointSet(sample[0], 2 * n, 2));
                r = bd_permutation_test(d, groups, plan, BdKind::Sum, 1);
            } else {
                std::vector<double> pooled = sample[0];
                pooled.insert(pooled.end(), sample[1].begin(), sample[1].end());
                r = bd_permutation_test_univariate(pooled, groups, plan, BdKind::Sum, 1);
            }
            // With two groups the three aggregations coincide.
            out.emplace_back("bd", r.p_value && *r.p_value <= config.level);
            break;
        }
        case Scenario::NullPair: {
            std::vector<DistanceMatrix> d;
            for (const auto& v : sample) d.push_back(euclidean_distances(PointSet::column(v)));
            reject(bcov_permutation_test(d, PermutationPlan::shuffle_margins(n, 2, m, plan_seed),
                                         WeightKind::Constant, 1),
                   "");
            break;
        }
        case Scenario::XorMutual: {
            std::vector<DistanceMatrix> d;
            for (const auto& v : sample) d.push_back(euclidean_distances(PointSet::column(v)));
            reject(bcov_permutation_test(d, PermutationPlan::shuffle_margins(n, 3, m, plan_seed),
                                         WeightKind::Constant, 1),
                   "");
            constexpr std::array<std::pair<std::size_t, std::size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
            for (const auto& [a, b] : pairs) {
                const std::array<DistanceMatrix, 2> pd{d[a], d[b]};
                const TestResult r = bcov_permutation_test(
                    pd, PermutationPlan::shuffle_margins(n, 2, m, plan_seed + 1 + a + b), WeightKind::Constant, 1);
                const std::string name = "pair" + std::to_string(a + 1) + std::to_string(b + 1) + ".bcov.constant";
                out.emplace_back(name, r.p_value && *r.p_value <= config.level);
            }
            break;
        }
    }
    return out;
}

}  // namespace

Scenario parse_scenario(std::string_view name) {
    for (const auto& [key, value] : kScenarios) {
        if (key == name) return value;
    }
    throw Error(ErrorKind::UnknownScenario, "unknown scenario '" + std::string(name) + "'");
}

std::string_view to_string(Scenario scenario) noexcept {
    for (const auto& [key, value] : kScenarios) {
        if (value == scenario) return key;
    }
    return "unknown";
}

std::vector<std::vector<double>> scenario_sample(Scenario scenario, std::size_t n, std::uint64_t seed, double shift) {
    std::mt19937_64 rng(seed);
    switch (scenario) {
        case Scenario::NullUnivariate: return {normals(rng, n, 0.0), normals(rng, n, 0.0)};
        case Scenario::ShiftUnivariate: return {normals(rng, n, 0.0), normals(rng, n, shift)};
        case Scenario::NullPair: return {normals(rng, n, 0.0), normals(rng, n, 0.0)};
        case Scenario::XorMutual: {
            auto z1 = coin_flips(rng, n);
            auto z2 = coin_flips(rng, n);
            std::vector<double> z3(n);
            for (std::size_t i = 0; i < n; ++i) z3[i] = z1[i] == z2[i] ? 1.0 : 0.0;
            return {std::move(z1), std::move(z2), std::move(z3)};
        }
        case Scenario::CircleMixture: {
            // One flat row-major table of 2n points: first group vertical, second horizontal.
            std::vector<double> flat(4 * n);
            std::size_t offset = 0;
            two_point_circle(rng, n, true, offset, flat);
            two_point_circle(rng, n, false, offset, flat);
            return {std::move(flat)};
        }
    }
    return {};
}

std::vector<RejectionRate> rejection_rates(const SimulationConfig& config) {
    std::mt19937_64 master(config.seed);
    std::vector<std::pair<std::uint64_t, std::uint64_t>> seeds(config.replications);
    for (auto& s : seeds) {
        s.first = master();
        s.second = master();
    }
    std::vector<Outcome> outcomes(config.replications);
    detail::parallel_for(config.replications, config.threads, [&](std::size_t r, std::size_t) {
        outcomes[r] = run_one(config, seeds[r].first, seeds[r].second);
    });
    std::vector<RejectionRate> rates;
    std::map<std::string, std::size_t> slot;
    for (const auto& outcome : outcomes) {
        for (const auto& [name, rejected] : outcome) {
            auto [it, inserted] = slot.try_emplace(name, rates.size());
            if (inserted) rates.push_back({name, 0, 0});
            RejectionRate& rate = rates[it->second];
            ++rate.replications;
            rate.rejections += rejected;
        }
    }
    return rates;
}

}  // namespace ballistic
