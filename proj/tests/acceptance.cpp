// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "ballistic/bcov.hpp"
#include "ballistic/bd.hpp"
#include "ballistic/counting.hpp"
#include "ballistic/metrics.hpp"
#include "ballistic/permutation.hpp"
#include "ballistic/simulate.hpp"
#include "cli.hpp"
#include "support/oracle.hpp"
#include "support/random_data.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

using namespace ballistic;

namespace {

constexpr double kExactTolerance = 1e-12;
constexpr WeightKind kWeights[] = {WeightKind::Constant, WeightKind::Probability, WeightKind::ChiSquare};

struct Verdict {
    bool pass;
    std::string detail;
};

bool report(int id, const char* title, const Verdict& v) {
    std::printf("[%s] %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, title, v.detail.c_str());
    std::fflush(stdout);
    return v.pass;
}

template <class... Args>
std::string format(const char* fmt, Args... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

double seconds(const std::function<void()>& fn, int runs = 1) {
    double best = 1e300;
    for (int r = 0; r < runs; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

DistanceMatrix line(std::span<const double> x) { return euclidean_distances(PointSet::column(x)); }

Verdict oracle_equivalence() {
    std::mt19937_64 rng(101);
    std::size_t instances = 0, tied = 0, mismatches = 0;
    double worst = 0.0;
    auto compare = [&](double got, double want) {
        const double diff = std::abs(got - want);
        worst = std::max(worst, diff);
        mismatches += !(diff <= kExactTolerance);
    };
    for (int rep = 0; rep < 600; ++rep, ++instances) {
        const bool ties = rep % 5 == 0;
        tied += ties;
        const std::size_t k = 2 + rng() % 3;
        const std::size_t n = k + rng() % (31 - k);
        const auto groups = testing::random_groups(rng, n, k);

        // BD: general rank path (multivariate) and univariate path.
        const auto pts = testing::random_points(rng, n, 1 + rng() % 3, ties);
        const auto d = euclidean_distances(pts);
        const auto want = oracle::naive_bd_k_sample(d, groups);
        const auto got = bd_k_sample(bd_pairwise(d, groups));
        compare(got.sum, want.sum);
        compare(got.summax, want.summax);
        compare(got.max, want.max);

        const auto x = testing::random_column(rng, n, ties);
        const auto dx = line(x);
        const auto want_x = oracle::naive_bd_k_sample(dx, groups);
        const auto got_x = bd_k_sample(bd_pairwise_univariate(x, groups));
        compare(got_x.sum, want_x.sum);
        compare(got_x.summax, want_x.summax);
        compare(got_x.max, want_x.max);

        // BCov: pair rank path, univariate path, mutual path.
        const auto y = testing::random_column(rng, n, ties);
        const std::vector<DistanceMatrix> pair{d, line(y)};
        const auto rank_path = bcov_pair(pair[0], pair[1]);
        const std::vector<DistanceMatrix> uni{dx, line(y)};
        const auto uni_path = bcov_pair_univariate(x, y);
        const std::vector<DistanceMatrix> triple{d, dx, pair[1]};
        const auto mutual = bcov_mutual(triple);
        for (WeightKind w : kWeights) {
            compare(rank_path.select(w), oracle::naive_bcov(pair, w));
            compare(uni_path.select(w), oracle::naive_bcov(uni, w));
            compare(mutual.select(w), oracle::naive_bcov(triple, w));
        }
    }
    return {mismatches == 0 && instances >= 500,
            format("%zu instances (%zu with ties), %zu mismatches, max |diff| %.3g", instances, tied, mismatches,
                   worst)};
}

Verdict rank_reconstruction() {
    std::mt19937_64 rng(202);
    std::size_t shuffles = 0, mismatches = 0;
    for (int rep = 0; rep < 500; ++rep, ++shuffles) {
        const std::size_t k = 2 + rng() % 4;
        const std::size_t n = k + rng() % (41 - k);
        const auto groups = testing::random_groups(rng, n, k);
        const auto d = rep % 4 == 0 ? testing::random_integer_matrix(rng, n, 5)
                                    : euclidean_distances(testing::random_points(rng, n, 2, rep % 3 == 0));
        const auto pooled = rowwise_rank(d);
        std::vector<std::size_t> labels(groups.labels().begin(), groups.labels().end());
        std::shuffle(labels.begin(), labels.end(), rng);
        for (std::size_t s = 0; s < k; ++s) {
            for (std::size_t t = s + 1; t < k; ++t) {
                const auto got = reconstruct_shuffled_ranks(pooled, labels, groups, s, t);
                const auto want = oracle::materialize_and_rank(d, labels, s, t);
                mismatches += got.within_s != want.within_s || got.within_t != want.within_t ||
                              got.pooled != want.pooled;
            }
        }
    }
    return {mismatches == 0, format("%zu shuffles, %zu mismatching group pairs", shuffles, mismatches)};
}

Verdict merge_counter() {
    std::mt19937_64 rng(303);
    std::size_t mismatches = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t n = rng() % 301;
        const int levels = 1 + static_cast<int>(rng() % 50);
        std::vector<double> v(n);
        for (auto& x : v) x = static_cast<double>(rng() % levels);
        mismatches += count_leq_after_self(v).numbers != oracle::naive_count_leq_after_self(v);
    }
    return {mismatches == 0, format("1000 inputs, %zu mismatches", mismatches)};
}

Verdict complexity_scaling() {
    std::mt19937_64 rng(404);
    auto sorted_column = [&](std::size_t n, double mean) {
        std::normal_distribution<double> normal(mean, 1.0);
        std::vector<double> v(n);
        for (auto& x : v) x = normal(rng);
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto a2 = sorted_column(1000, 0), b2 = sorted_column(1000, 0.5);
    const auto a4 = sorted_column(2000, 0), b4 = sorted_column(2000, 0.5);
    volatile double sink = 0;
    const double t2000 = seconds([&] { sink = bd_two_sample_univariate(a2, b2); }, 7);
    const double t4000 = seconds([&] { sink = bd_two_sample_univariate(a4, b4); }, 7);
    const double growth = t4000 / t2000;

    const auto d = euclidean_distances(testing::random_points(rng, 2000, 3, false));
    const auto groups = GroupedSample::from_sizes({1000, 1000});
    const double general = seconds([&] { sink = bd_two_sample(d, groups); });

    RankStructures pooled;
    const double fresh = seconds([&] { pooled = rowwise_rank(d); }, 3);
    std::vector<std::size_t> labels(groups.labels().begin(), groups.labels().end());
    std::shuffle(labels.begin(), labels.end(), rng);
    const double replicate = seconds([&] { sink = bd_pairwise_from_order(pooled, labels, groups)(0, 1); }, 3);
    const double ratio = replicate / fresh;
    (void)sink;

    return {growth <= 5.0 && general <= 30.0 && ratio < 0.8,
            format("univariate N=4000/N=2000 time ratio %.2f (<= 5); general BD N=2000 %.2fs (<= 30s); "
                   "replicate/fresh ranking %.3f (< 0.8)",
                   growth, general, ratio)};
}

const RejectionRate* find(const std::vector<RejectionRate>& rates, const std::string& name) {
    for (const auto& r : rates) {
        if (r.statistic == name) return &r;
    }
    return nullptr;
}

Verdict type_one_control() {
    SimulationConfig config;
    config.n = 30;
    config.replications = 500;
    config.permutations = 199;
    config.seed = 505;
    config.scenario = Scenario::NullUnivariate;
    const auto bd = rejection_rates(config);
    config.scenario = Scenario::NullPair;
    const auto bcov = rejection_rates(config);
    bool pass = true;
    std::string detail;
    auto check = [&](const std::vector<RejectionRate>& rates, const std::string& name) {
        const auto* r = find(rates, name);
        const double rate = r ? r->rate() : -1.0;
        pass = pass && r && rate >= 0.02 && rate <= 0.08;
        detail += format("%s %.3f; ", name.c_str(), rate);
    };
    check(bd, "bd");
    check(bcov, "bcov.constant");
    check(bcov, "bcov.probability");
    check(bcov, "bcov.chisquare");
    return {pass, detail + "each within [0.02, 0.08] over 500 replications"};
}

Verdict shift_power() {
    SimulationConfig config;
    config.scenario = Scenario::ShiftUnivariate;
    config.n = 50;
    config.replications = 100;
    config.permutations = 99;
    config.seed = 606;
    const auto rates = rejection_rates(config);
    const auto* r = find(rates, "bd");
    const std::size_t hits = r ? r->rejections : 0;
    return {hits >= 90, format("%zu of 100 repetitions with p <= 0.05 (need >= 90)", hits)};
}

Verdict mutual_dependence() {
    SimulationConfig config;
    config.scenario = Scenario::XorMutual;
    config.n = 100;
    config.replications = 100;
    config.permutations = 199;
    config.seed = 707;
    const auto rates = rejection_rates(config);
    bool pass = true;
    std::string detail;
    const auto* mutual = find(rates, "bcov.constant");
    pass = mutual && mutual->rate() >= 0.8;
    detail += format("mutual %.2f (>= 0.80)", mutual ? mutual->rate() : -1.0);
    for (const char* name : {"pair12.bcov.constant", "pair13.bcov.constant", "pair23.bcov.constant"}) {
        const auto* r = find(rates, name);
        const double rate = r ? r->rate() : -1.0;
        pass = pass && r && rate >= 0.02 && rate <= 0.10;
        detail += format("; %s %.2f", name, rate);
    }
    return {pass, detail + " (pairs within [0.02, 0.10])"};
}

Verdict circle_geometry() {
    bool positive = true;
    std::string detail = "BD at n =";
    for (std::size_t n : {10u, 20u, 40u}) {
        const auto sample = scenario_sample(Scenario::CircleMixture, n, 808 + n);
        const auto d = great_circle_distances(PointSet(sample[0], 2 * n, 2));
        const double bd = bd_two_sample(d, GroupedSample::from_sizes({n, n}));
        positive = positive && bd > 0.0;
        detail += format(" %zu: %.4f", n, bd);
    }
    SimulationConfig config;
    config.scenario = Scenario::CircleMixture;
    config.n = 40;
    config.replications = 100;
    config.permutations = 199;
    config.seed = 809;
    const auto* r = find(rejection_rates(config), "bd");
    const double rate = r ? r->rate() : -1.0;
    return {positive && rate >= 0.9, detail + format("; rejection rate at n = 40: %.2f (>= 0.90)", rate)};
}

Verdict thread_determinism() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ballistic_acceptance";
    fs::create_directories(dir);
    std::mt19937_64 rng(909);
    std::normal_distribution<double> normal;
    const auto pooled = (dir / "pooled.csv").string();
    const auto second = (dir / "second.csv").string();
    {
        std::ofstream p(pooled), s(second);
        p.precision(17);
        s.precision(17);
        for (int i = 0; i < 90; ++i) p << normal(rng) << "," << normal(rng) + (i >= 60 ? 0.5 : 0.0) << "\n";
        for (int i = 0; i < 90; ++i) s << normal(rng) << "\n";
    }
    const std::vector<std::vector<std::string>> commands{
        {"bd", "--input", pooled, "--sizes", "30,30,30", "--permutations", "199", "--seed", "7", "--json"},
        {"bd", "--input", pooled, "--sizes", "30,30,30", "--kbd-type", "max", "--metric", "euclidean",
         "--permutations", "199", "--seed", "7", "--json"},
        {"bcov", "--input", pooled, "--input", second, "--permutations", "199", "--seed", "7", "--json"},
        {"bcov", "--input", pooled, "--input", second, "--input", pooled, "--weight", "chisquare",
         "--permutations", "99", "--seed", "7", "--json", "--bcor"}};
    std::size_t differing = 0, failed = 0;
    for (const auto& base : commands) {
        std::string first;
        for (const char* threads : {"1", "2", "8"}) {
            auto args = base;
            args.insert(args.end(), {"--threads", threads});
            std::ostringstream out, err;
            failed += cli::run(args, out, err) != 0;
            if (first.empty()) {
                first = out.str();
            } else {
                differing += out.str() != first;
            }
        }
    }
    fs::remove_all(dir);
    return {differing == 0 && failed == 0,
            format("%zu commands x threads {1, 2, 8}: %zu differing outputs, %zu failed runs", commands.size(),
                   differing, failed)};
}

}  // namespace

int main() {
    bool all = true;
    all &= report(1, "oracle equivalence", oracle_equivalence());
    all &= report(2, "rank reconstruction after shuffling", rank_reconstruction());
    all &= report(3, "merge-sort counter", merge_counter());
    all &= report(4, "complexity scaling", complexity_scaling());
    const bool type_one = report(5, "type-I control", type_one_control());
    const bool power = report(6, "shift power", shift_power());
    const bool mutual = report(7, "mutual dependence", mutual_dependence());
    const bool circle = report(8, "circle geometry", circle_geometry());
    all &= type_one && power && mutual && circle;
    all &= report(9, "thread determinism", thread_determinism());
    all &= report(10, "desk-scale substitutes for the power curves",
                  {type_one && power && mutual && circle, "criteria 5 to 8 all pass"});
    return all ? 0 : 1;
}
