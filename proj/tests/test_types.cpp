#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballistic/types.hpp"
#include "support/random_data.hpp"

#include <limits>
#include <random>

using namespace ballistic;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("validate accepts the minimal symmetric matrix") {
    const auto d = DistanceMatrix::validate({{0, 1}, {1, 0}});
    CHECK(d.size() == 2);
    CHECK(d(0, 1) == 1.0);
}

TEST_CASE("validate rejects malformed tables") {
    CHECK(kind_of([] { DistanceMatrix::validate({{0, 1}, {2, 0}}); }) == ErrorKind::AsymmetricBeyondTolerance);
    CHECK(kind_of([] { DistanceMatrix::validate({{0, -1}, {-1, 0}}); }) == ErrorKind::NegativeEntry);
    CHECK(kind_of([] { DistanceMatrix::validate({{0, 1, 2}, {1, 0}}); }) == ErrorKind::NonSquare);
    CHECK(kind_of([] { DistanceMatrix::validate({{0.5, 1}, {1, 0}}); }) == ErrorKind::NonzeroDiagonal);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(kind_of([&] { DistanceMatrix::validate({{0, inf}, {inf, 0}}); }) == ErrorKind::NonFiniteEntry);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK(kind_of([&] { DistanceMatrix::validate({{0, nan}, {nan, 0}}); }) == ErrorKind::NonFiniteEntry);
}

TEST_CASE("small asymmetry and diagonal noise are repaired") {
    const auto d = DistanceMatrix::validate({{1e-12, 1.0}, {1.0 + 4e-10, 0.0}});
    CHECK(d(0, 0) == 0.0);
    CHECK(d(0, 1) == d(1, 0));
    CHECK(d(0, 1) == doctest::Approx(1.0 + 2e-10).epsilon(1e-15));
}

TEST_CASE("validation is idempotent") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 1 + rng() % 12;
        std::uniform_real_distribution<double> u(0.0, 3.0), noise(-1e-10, 1e-10);
        std::vector<double> raw(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                raw[i * n + j] = u(rng);
                raw[j * n + i] = raw[i * n + j] + noise(rng);
            }
        }
        const auto once = DistanceMatrix::validate(raw, n);
        const auto twice = DistanceMatrix::validate(once.data(), n);
        CHECK(once == twice);
    }
}

TEST_CASE("grouped sample from sizes") {
    const auto g = GroupedSample::from_sizes({2, 3, 1});
    CHECK(g.total() == 6);
    CHECK(g.groups() == 3);
    CHECK(std::vector(g.offsets().begin(), g.offsets().end()) == std::vector<std::size_t>{0, 2, 5});
    CHECK(std::vector(g.labels().begin(), g.labels().end()) == std::vector<std::size_t>{0, 0, 1, 1, 1, 2});
    CHECK(kind_of([] { GroupedSample::from_sizes({2, 0}); }) == ErrorKind::EmptyGroup);
    CHECK(kind_of([] { GroupedSample::from_labels({0, 2}); }) == ErrorKind::EmptyGroup);
}

TEST_CASE("grouped sample sizes do not depend on label order") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t k = 2 + rng() % 4;
        const auto g = testing::random_groups(rng, k + rng() % 20, k);
        std::vector<std::size_t> shuffled(g.labels().begin(), g.labels().end());
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const auto h = GroupedSample::from_labels(shuffled);
        CHECK(std::equal(g.sizes().begin(), g.sizes().end(), h.sizes().begin(), h.sizes().end()));
        CHECK(std::equal(g.offsets().begin(), g.offsets().end(), h.offsets().begin(), h.offsets().end()));
        std::size_t sum = 0;
        for (std::size_t s : g.sizes()) sum += s;
        CHECK(sum == g.total());
    }
}

TEST_CASE("variant names accept unambiguous prefixes") {
    CHECK(parse_bd_kind("sum") == BdKind::Sum);
    CHECK(parse_bd_kind("summ") == BdKind::SumMax);
    CHECK(parse_bd_kind("m") == BdKind::Max);
    CHECK(kind_of([] { parse_bd_kind("su"); }) == ErrorKind::InvalidArgument);
    CHECK(parse_weight_kind("co") == WeightKind::Constant);
    CHECK(kind_of([] { parse_weight_kind("c"); }) == ErrorKind::InvalidArgument);
    CHECK(parse_weight_kind("prob") == WeightKind::Probability);
    CHECK(parse_weight_kind("chi") == WeightKind::ChiSquare);
    CHECK(kind_of([] { parse_weight_kind("x"); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { parse_weight_kind(""); }) == ErrorKind::InvalidArgument);
}
