#include "ballistic/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ballistic {

namespace {

constexpr double kUnitNormTolerance = 1e-6;

}  // namespace

PointSet::PointSet(std::vector<double> values, std::size_t rows, std::size_t cols)
    : values_(std::move(values)), rows_(rows), cols_(cols) {
    if (cols_ == 0 || values_.size() != rows_ * cols_) {
        throw Error(ErrorKind::DimensionMismatch, "point table needs rows * cols values with cols >= 1");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error(ErrorKind::NonFiniteEntry, "non-finite coordinate");
    }
}

PointSet PointSet::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t cols = rows.empty() ? 1 : rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) throw Error(ErrorKind::DimensionMismatch, "ragged point table");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return PointSet(std::move(flat), rows.size(), cols);
}

PointSet PointSet::column(std::span<const double> values) {
    return PointSet(std::vector<double>(values.begin(), values.end()), values.size(), 1);
}

DistanceMatrix euclidean_distances(const PointSet& points) {
    const std::size_t n = points.rows();
    const std::size_t p = points.cols();
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto xi = points.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto xj = points.row(j);
            double v;
            if (p == 1) {
                v = std::abs(xi[0] - xj[0]);
            } else {
                double s = 0.0;
                for (std::size_t c = 0; c < p; ++c) {
                    const double diff = xi[c] - xj[c];
                    s += diff * diff;
                }
                v = std::sqrt(s);
            }
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    return DistanceMatrix::validate(d, n);
}

DistanceMatrix great_circle_distances(const PointSet& points) {
    const std::size_t n = points.rows();
    const std::size_t p = points.cols();
    std::vector<double> unit(points.values());
    for (std::size_t i = 0; i < n; ++i) {
        double* row = unit.data() + i * p;
        const double norm = std::sqrt(std::inner_product(row, row + p, row, 0.0));
        if (norm == 0.0) throw Error(ErrorKind::ZeroNormRow, "row " + std::to_string(i) + " has zero norm");
        if (std::abs(norm - 1.0) > kUnitNormTolerance) {
            throw Error(ErrorKind::InvalidArgument, "row " + std::to_string(i) + " is not on the unit sphere");
        }
        for (std::size_t c = 0; c < p; ++c) row[c] /= norm;
    }
    std::vector<double> d(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* a = unit.data() + i * p;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double* b = unit.data() + j * p;
            // Coincident points must be at distance exactly 0, like the diagonal.
            if (std::equal(a, a + p, b)) continue;
            const double dot = std::clamp(std::inner_product(a, a + p, b, 0.0), -1.0, 1.0);
            const double v = std::acos(dot);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    return DistanceMatrix::validate(d, n);
}

}  // namespace ballistic
