#include "ballistic/bcov.hpp"
#include "ballistic/bd.hpp"
#include "ballistic/counting.hpp"
#include "ballistic/metrics.hpp"
#include "ballistic/permutation.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ballistic;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PointSet to_points(const Array& a) {
    if (a.ndim() == 1) return PointSet::column({a.data(), static_cast<std::size_t>(a.shape(0))});
    if (a.ndim() != 2) throw py::value_error("expected a 1-D or 2-D array");
    const auto rows = static_cast<std::size_t>(a.shape(0));
    const auto cols = static_cast<std::size_t>(a.shape(1));
    return PointSet(std::vector<double>(a.data(), a.data() + rows * cols), rows, cols);
}

DistanceMatrix to_distances(const Array& a) {
    if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
        throw Error(ErrorKind::NonSquare, "distance table is not square");
    }
    const auto n = static_cast<std::size_t>(a.shape(0));
    return DistanceMatrix::validate({a.data(), n * n}, n);
}

std::vector<DistanceMatrix> to_distance_list(const std::vector<Array>& arrays) {
    std::vector<DistanceMatrix> out;
    for (const auto& a : arrays) out.push_back(to_distances(a));
    return out;
}

Array to_array(const DistanceMatrix& d) {
    Array out({d.size(), d.size()});
    std::copy(d.data().begin(), d.data().end(), out.mutable_data());
    return out;
}

py::dict to_dict(const BcovTriple& t) {
    py::dict d;
    d["constant"] = t.constant;
    d["probability"] = t.probability;
    d["chisquare"] = t.chisquare;
    return d;
}

py::object optional_value(const std::optional<double>& v) {
    return v ? py::object(py::float_(*v)) : py::object(py::none());
}

py::dict to_dict(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = optional_value(r.p_value);
    d["replicates"] = r.replicates;
    d["sizes"] = r.sizes;
    d["method"] = r.family == Family::BallDivergence ? "Ball Divergence" : "Ball Covariance";
    d["variant"] = r.variant;
    py::list info;
    for (const auto& v : r.complete_info) {
        py::dict item;
        item["name"] = v.name;
        item["statistic"] = v.statistic;
        item["p_value"] = optional_value(v.p_value);
        info.append(item);
    }
    d["complete_info"] = info;
    return d;
}

}  // namespace

PYBIND11_MODULE(_ballistic, m) {
    m.doc() = "Ball Divergence and Ball Covariance tests";

    py::register_exception<Error>(m, "BallisticError", PyExc_ValueError);

    m.def("euclidean_distances", [](const Array& x) { return to_array(euclidean_distances(to_points(x))); },
          py::arg("x"));
    m.def("great_circle_distances", [](const Array& x) { return to_array(great_circle_distances(to_points(x))); },
          py::arg("x"));
    m.def("validate_distances", [](const Array& d) { return to_array(to_distances(d)); }, py::arg("d"));

    m.def(
        "count_leq_after_self",
        [](std::vector<double> values) {
            auto r = count_leq_after_self(values);
            return py::make_tuple(r.values, r.numbers);
        },
        py::arg("values"), "Sorted values and, per input position, the number of later values <= it.");

    m.def(
        "bd_statistic",
        [](const Array& d, std::vector<std::size_t> sizes) {
            const auto k = bd_k_sample(bd_pairwise(to_distances(d), GroupedSample::from_sizes(std::move(sizes))));
            py::dict out;
            out["sum"] = k.sum;
            out["summax"] = k.summax;
            out["max"] = k.max;
            return out;
        },
        py::arg("d"), py::arg("sizes"));

    m.def(
        "bd_test",
        [](const Array& d, std::vector<std::size_t> sizes, std::size_t permutations, const std::string& kbd_type,
           std::uint64_t seed, std::size_t threads) {
            const auto dist = to_distances(d);
            const auto groups = GroupedSample::from_sizes(std::move(sizes));
            const auto plan = PermutationPlan::shuffle_labels(dist.size(), permutations, seed);
            const BdKind kind = parse_bd_kind(kbd_type);
            TestResult result;
            {
                py::gil_scoped_release release;
                result = bd_permutation_test(dist, groups, plan, kind, threads);
            }
            return to_dict(result);
        },
        py::arg("d"), py::arg("sizes"), py::arg("permutations") = kDefaultPermutations,
        py::arg("kbd_type") = "sum", py::arg("seed") = 1, py::arg("threads") = 0);

    m.def(
        "bcov_statistic",
        [](const std::vector<Array>& ds) {
            const auto dists = to_distance_list(ds);
            return to_dict(dists.size() == 2 ? bcov_pair(dists[0], dists[1]) : bcov_mutual(dists));
        },
        py::arg("distances"));
    m.def(
        "bcor", [](const std::vector<Array>& ds) { return to_dict(bcor_all(to_distance_list(ds))); },
        py::arg("distances"));

    m.def(
        "bcov_test",
        [](const std::vector<Array>& ds, std::size_t permutations, const std::string& weight, std::uint64_t seed,
           std::size_t threads) {
            const auto dists = to_distance_list(ds);
            if (dists.size() < 2) throw Error(ErrorKind::TooFewVariables, "need at least two variables");
            const auto plan = PermutationPlan::shuffle_margins(dists.front().size(), dists.size(), permutations, seed);
            const WeightKind kind = parse_weight_kind(weight);
            TestResult result;
            {
                py::gil_scoped_release release;
                result = bcov_permutation_test(dists, plan, kind, threads);
            }
            return to_dict(result);
        },
        py::arg("distances"), py::arg("permutations") = kDefaultPermutations, py::arg("weight") = "constant",
        py::arg("seed") = 1, py::arg("threads") = 0);
}
