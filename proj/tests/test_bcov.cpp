#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ballistic/bcov.hpp"
#include "ballistic/metrics.hpp"
#include "support/oracle.hpp"
#include "support/random_data.hpp"

#include <algorithm>
#include <numeric>
#include <random>

using namespace ballistic;

namespace {

constexpr WeightKind kWeights[] = {WeightKind::Constant, WeightKind::Probability, WeightKind::ChiSquare};

DistanceMatrix line(const std::vector<double>& x) { return euclidean_distances(PointSet::column(x)); }

void check_close(double got, double want) { CHECK(std::abs(got - want) <= 1e-12); }

void check_against_oracle(const BcovTriple& got, std::span<const DistanceMatrix> dists) {
    for (WeightKind w : kWeights) check_close(got.select(w), oracle::naive_bcov(dists, w));
}

}  // namespace

TEST_CASE("BCov hand values") {
    const std::vector<DistanceMatrix> two{line({0, 1}), line({0, 1})};
    CHECK(bcov_pair(two[0], two[1]).constant == 0.03125);
    CHECK(oracle::naive_bcov(two, WeightKind::Constant) == 0.03125);
    CHECK(bcov_pair_univariate(std::vector<double>{0, 1}, std::vector<double>{0, 1}).constant == 0.03125);

    const auto flat = line({2, 2, 2, 2});
    const auto zero = bcov_pair(flat, flat);
    CHECK(zero.constant == 0.0);
    CHECK(zero.probability == 0.0);
    CHECK(zero.chisquare == 0.0);

    const auto single = line({5});
    CHECK(bcov_pair(single, single).constant == 0.0);

    const std::vector<DistanceMatrix> three{flat, flat, flat};
    CHECK(bcov_mutual(three).constant == 0.0);
    CHECK(oracle::naive_bcov(three, WeightKind::Constant) == 0.0);
}

TEST_CASE("BCov input checks") {
    CHECK_THROWS_AS(bcov_pair(line({0, 1}), line({0, 1, 2})), Error);
    const std::vector<DistanceMatrix> one{line({0, 1})};
    CHECK_THROWS_AS(bcov_mutual(one), Error);
}

TEST_CASE("marginal proportions are tie-inclusive row ranks") {
    const auto p = ball_proportions(line({0, 2, 1}));
    CHECK(p.denominator == 3);
    CHECK(p.count(0, 1) == 3);
    CHECK(p.count(0, 2) == 2);
    CHECK(p.proportion(0, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("joint counts equal the oracle, including heavy ties") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 1 + rng() % 25;
        const auto a = rep % 3 == 0 ? testing::random_integer_matrix(rng, n, 3)
                                    : euclidean_distances(testing::random_points(rng, n, 2, rep % 2 == 0));
        const auto b = rep % 4 == 0 ? testing::random_integer_matrix(rng, n, 2)
                                    : euclidean_distances(testing::random_points(rng, n, 1, true));
        CHECK(joint_proportions(a, b).counts == oracle::naive_joint_counts(a, b));
    }
}

TEST_CASE("univariate joint counts equal the oracle") {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t n = 1 + rng() % 30;
        const auto x = testing::random_column(rng, n, rep % 2 == 0);
        const auto y = testing::random_column(rng, n, rep % 3 == 0);
        CHECK(joint_proportions_univariate(x, y).counts == oracle::naive_joint_counts(line(x), line(y)));
    }
}

TEST_CASE("N = 25 with ties: every path and weight matches the oracle") {
    std::mt19937_64 rng(25);
    for (int rep = 0; rep < 10; ++rep) {
        const auto x = testing::random_column(rng, 25, true);
        const auto y = testing::random_column(rng, 25, true);
        const std::vector<DistanceMatrix> dists{line(x), line(y)};
        check_against_oracle(bcov_pair(dists[0], dists[1]), dists);
        check_against_oracle(bcov_pair_univariate(x, y), dists);
        check_against_oracle(bcov_mutual(dists), dists);
    }
}

TEST_CASE("x = y matches the duplicated-matrix path") {
    std::mt19937_64 rng(3);
    const auto x = testing::random_column(rng, 30, false);
    const auto d = line(x);
    const auto a = bcov_pair_univariate(x, x);
    const auto b = bcov_pair(d, d);
    check_close(a.constant, b.constant);
    check_close(a.probability, b.probability);
    check_close(a.chisquare, b.chisquare);
}

TEST_CASE("a constant margin gives zero") {
    std::mt19937_64 rng(4);
    const auto y = testing::random_column(rng, 12, false);
    const std::vector<double> x(12, 1.5);
    CHECK(bcov_pair_univariate(x, y).constant == 0.0);
    CHECK(bcov_pair(line(x), line(y)).chisquare == 0.0);
}

TEST_CASE("three variables: mutual path equals the oracle") {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<DistanceMatrix> dists;
        for (int v = 0; v < 3; ++v) dists.push_back(euclidean_distances(testing::random_points(rng, 15, 2, rep % 2)));
        check_against_oracle(bcov_mutual(dists), dists);
    }
}

TEST_CASE("mutual path agrees with the pair path at K = 2 and across thread counts") {
    std::mt19937_64 rng(6);
    const auto a = euclidean_distances(testing::random_points(rng, 40, 2, true));
    const auto b = euclidean_distances(testing::random_points(rng, 40, 3, false));
    const std::vector<DistanceMatrix> dists{a, b};
    const auto pair = bcov_pair(a, b);
    const auto mutual = bcov_mutual(dists);
    check_close(mutual.constant, pair.constant);
    check_close(mutual.probability, pair.probability);
    check_close(mutual.chisquare, pair.chisquare);

    const std::vector<DistanceMatrix> three{a, b, a};
    const auto one = bcov_mutual(three, 1);
    const auto four = bcov_mutual(three, 4);
    CHECK(one.constant == four.constant);
    CHECK(one.probability == four.probability);
    CHECK(one.chisquare == four.chisquare);
}

TEST_CASE("BCov ignores a common relabelling of the observations") {
    std::mt19937_64 rng(7);
    const std::size_t n = 18;
    const auto pa = testing::random_points(rng, n, 2, true);
    const auto pb = testing::random_points(rng, n, 1, true);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto a = euclidean_distances(pa), b = euclidean_distances(pb);
    const auto base = bcov_pair(a, b);
    const auto moved = bcov_pair(a.submatrix(perm), b.submatrix(perm));
    check_close(moved.constant, base.constant);
    check_close(moved.probability, base.probability);
    check_close(moved.chisquare, base.chisquare);
}

TEST_CASE("BCor: identical margins give 1, degenerate margins give 0, otherwise in [0, 1]") {
    std::mt19937_64 rng(8);
    const auto d = euclidean_distances(testing::random_points(rng, 20, 2, false));
    const std::vector<DistanceMatrix> same{d, d};
    check_close(bcor(same, WeightKind::Constant), 1.0);

    const std::vector<DistanceMatrix> flat{d, line(std::vector<double>(20, 0.0))};
    CHECK(bcor(flat, WeightKind::Constant) == 0.0);
    CHECK(bcor(flat, WeightKind::ChiSquare) == 0.0);

    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 2 + rng() % 20;
        const std::vector<DistanceMatrix> dists{line(testing::random_column(rng, n, rep % 2)),
                                                line(testing::random_column(rng, n, rep % 3 == 0))};
        const double r = bcor(dists, WeightKind::Constant);
        CHECK(r >= 0.0);
        CHECK(r <= 1.0 + 1e-12);
        check_close(r, oracle::naive_bcor(dists, WeightKind::Constant));
    }
}
