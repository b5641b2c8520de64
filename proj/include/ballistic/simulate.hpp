#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ballistic {

/// Built-in desk-scale data generators.
///   null-univariate   two N(0,1) samples of size n, BD test
///   shift-univariate  N(0,1) vs N(shift,1), BD test
///   null-pair         independent N(0,1) pair of size n, BCov test
///   xor-mutual        Z1, Z2 ~ Bernoulli(1/2), Z3 = I(Z1 == Z2); mutual and
///                     pairwise BCov tests
///   circle-mixture    {(0,1),(0,-1)} vs {(1,0),(-1,0)}, equal probabilities,
///                     great-circle BD test
enum class Scenario { NullUnivariate, ShiftUnivariate, NullPair, XorMutual, CircleMixture };

Scenario parse_scenario(std::string_view name);
std::string_view to_string(Scenario scenario) noexcept;

struct SimulationConfig {
    Scenario scenario = Scenario::NullUnivariate;
    std::size_t n = 30;
    std::size_t replications = 500;
    std::size_t permutations = 199;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    double level = 0.05;
    double shift = 1.0;
};

struct RejectionRate {
    std::string statistic;
    std::size_t rejections = 0;
    std::size_t replications = 0;

    double rate() const noexcept {
        return replications == 0 ? 0.0 : static_cast<double>(rejections) / static_cast<double>(replications);
    }
};

/// Fraction of replications with p-value <= level, per reported statistic.
/// Deterministic given the config (independent of `threads`).
std::vector<RejectionRate> rejection_rates(const SimulationConfig& config);

/// Data of one replication, exposed for tests: column-major variables (one
/// vector per variable or per group, depending on the scenario).
std::vector<std::vector<double>> scenario_sample(Scenario scenario, std::size_t n, std::uint64_t seed,
                                                 double shift = 1.0);

}  // namespace ballistic
