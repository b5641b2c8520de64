#pragma once

#include "ballistic/types.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ballistic {

/// Row-major table of N points in p coordinates.
class PointSet {
  public:
    PointSet(std::vector<double> values, std::size_t rows, std::size_t cols);
    static PointSet from_rows(const std::vector<std::vector<double>>& rows);
    static PointSet column(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
    const std::vector<double>& values() const noexcept { return values_; }

  private:
    std::vector<double> values_;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
};

/// Pairwise Euclidean distances. For one column the distance is |x_i - x_j|,
/// which is exactly what the univariate fast paths compare against.
DistanceMatrix euclidean_distances(const PointSet& points);

/// Arc length between rows on the unit sphere. Rows whose norm deviates from
/// one by at most 1e-6 are renormalized; larger deviations are rejected.
DistanceMatrix great_circle_distances(const PointSet& points);

}  // namespace ballistic
