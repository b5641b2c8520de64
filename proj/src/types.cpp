#include "ballistic/types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace ballistic {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonSquare: return "NonSquare";
        case ErrorKind::NegativeEntry: return "NegativeEntry";
        case ErrorKind::AsymmetricBeyondTolerance: return "AsymmetricBeyondTolerance";
        case ErrorKind::NonFiniteEntry: return "NonFiniteEntry";
        case ErrorKind::NonzeroDiagonal: return "NonzeroDiagonal";
        case ErrorKind::ZeroNormRow: return "ZeroNormRow";
        case ErrorKind::EmptyGroup: return "EmptyGroup";
        case ErrorKind::UnsortedInput: return "UnsortedInput";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::TooFewVariables: return "TooFewVariables";
        case ErrorKind::LabelCountMismatch: return "LabelCountMismatch";
        case ErrorKind::EmptyNullSample: return "EmptyNullSample";
        case ErrorKind::UnknownScenario: return "UnknownScenario";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

std::string entry_location(std::size_t i, std::size_t j) {
    std::ostringstream os;
    os << "(" << i << ", " << j << ")";
    return os.str();
}

}  // namespace

DistanceMatrix DistanceMatrix::validate(std::span<const double> row_major, std::size_t n) {
    if (row_major.size() != n * n) {
        throw Error(ErrorKind::NonSquare, "distance table is not square");
    }
    std::vector<double> d(row_major.begin(), row_major.end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double v = d[i * n + j];
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteEntry, "non-finite distance at " + entry_location(i, j));
            }
            if (v < 0.0) {
                throw Error(ErrorKind::NegativeEntry, "negative distance at " + entry_location(i, j));
            }
        }
        if (std::abs(d[i * n + i]) > kSymmetryTolerance) {
            throw Error(ErrorKind::NonzeroDiagonal, "nonzero diagonal at " + entry_location(i, i));
        }
        d[i * n + i] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double& a = d[i * n + j];
            double& b = d[j * n + i];
            if (a == b) continue;
            if (std::abs(a - b) > kSymmetryTolerance) {
                throw Error(ErrorKind::AsymmetricBeyondTolerance,
                            "asymmetric entries at " + entry_location(i, j));
            }
            const double mean = 0.5 * (a + b);
            a = mean;
            b = mean;
        }
    }
    return DistanceMatrix(n, std::move(d));
}

DistanceMatrix DistanceMatrix::validate(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    std::vector<double> flat;
    flat.reserve(n * n);
    for (const auto& row : rows) {
        if (row.size() != n) {
            throw Error(ErrorKind::NonSquare, "distance table is not square");
        }
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return validate(flat, n);
}

DistanceMatrix DistanceMatrix::submatrix(std::span<const std::size_t> index) const {
    const std::size_t m = index.size();
    std::vector<double> d(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* src = d_.data() + index[i] * n_;
        double* dst = d.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) dst[j] = src[index[j]];
    }
    return DistanceMatrix(m, std::move(d));
}

GroupedSample GroupedSample::from_sizes(std::vector<std::size_t> sizes) {
    std::vector<std::size_t> labels;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] == 0) throw Error(ErrorKind::EmptyGroup, "group " + std::to_string(k) + " is empty");
        labels.insert(labels.end(), sizes[k], k);
    }
    return from_labels(std::move(labels));
}

GroupedSample GroupedSample::from_labels(std::vector<std::size_t> labels) {
    GroupedSample g;
    std::size_t groups = 0;
    for (std::size_t label : labels) groups = std::max(groups, label + 1);
    g.sizes_.assign(groups, 0);
    for (std::size_t label : labels) ++g.sizes_[label];
    for (std::size_t k = 0; k < groups; ++k) {
        if (g.sizes_[k] == 0) throw Error(ErrorKind::EmptyGroup, "group " + std::to_string(k) + " is empty");
    }
    g.offsets_.assign(groups, 0);
    for (std::size_t k = 1; k < groups; ++k) g.offsets_[k] = g.offsets_[k - 1] + g.sizes_[k - 1];
    g.labels_ = std::move(labels);
    return g;
}

std::vector<std::size_t> GroupedSample::members(std::size_t k) const {
    std::vector<std::size_t> out;
    out.reserve(sizes_.at(k));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == k) out.push_back(i);
    }
    return out;
}

namespace {

template <class Enum, std::size_t N>
Enum parse_prefix(std::string_view text, const std::array<std::pair<std::string_view, Enum>, N>& table,
                  std::string_view what) {
    for (const auto& [name, value] : table) {
        if (name == text) return value;
    }
    std::optional<Enum> found;
    int hits = 0;
    if (!text.empty()) {
        for (const auto& [name, value] : table) {
            if (name.substr(0, text.size()) == text) {
                found = value;
                ++hits;
            }
        }
    }
    if (hits != 1) {
        throw Error(ErrorKind::InvalidArgument,
                    std::string(hits == 0 ? "unknown " : "ambiguous ") + std::string(what) + " '" +
                        std::string(text) + "'");
    }
    return *found;
}

}  // namespace

BdKind parse_bd_kind(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, BdKind>, 3> table{{
        {"sum", BdKind::Sum}, {"summax", BdKind::SumMax}, {"max", BdKind::Max}}};
    return parse_prefix(text, table, "kbd type");
}

WeightKind parse_weight_kind(std::string_view text) {
    static constexpr std::array<std::pair<std::string_view, WeightKind>, 3> table{{
        {"constant", WeightKind::Constant},
        {"probability", WeightKind::Probability},
        {"chisquare", WeightKind::ChiSquare}}};
    return parse_prefix(text, table, "weight");
}

std::string_view to_string(BdKind kind) noexcept {
    switch (kind) {
        case BdKind::Sum: return "sum";
        case BdKind::SumMax: return "summax";
        case BdKind::Max: return "max";
    }
    return "sum";
}

std::string_view to_string(WeightKind kind) noexcept {
    switch (kind) {
        case WeightKind::Constant: return "constant";
        case WeightKind::Probability: return "probability";
        case WeightKind::ChiSquare: return "chisquare";
    }
    return "constant";
}

}  // namespace ballistic
