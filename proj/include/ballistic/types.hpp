#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ballistic {

enum class ErrorKind {
    NonSquare,
    NegativeEntry,
    AsymmetricBeyondTolerance,
    NonFiniteEntry,
    NonzeroDiagonal,
    ZeroNormRow,
    EmptyGroup,
    UnsortedInput,
    LengthMismatch,
    DimensionMismatch,
    TooFewVariables,
    LabelCountMismatch,
    EmptyNullSample,
    UnknownScenario,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

/// Absolute tolerance used for symmetry and zero-diagonal checks.
inline constexpr double kSymmetryTolerance = 1e-9;

/// Symmetric, nonnegative, zero-diagonal table of pairwise distances.
///
/// Only distance comparisons are consumed downstream, so the triangle
/// inequality is not required. Instances are immutable once built.
class DistanceMatrix {
  public:
    DistanceMatrix() = default;

    /// Validates a row-major n-by-n table. Entries whose mirror differs by at
    /// most `kSymmetryTolerance` are replaced by the pair average.
    static DistanceMatrix validate(std::span<const double> row_major, std::size_t n);
    static DistanceMatrix validate(const std::vector<std::vector<double>>& rows);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return d_[i * n_ + j]; }
    std::span<const double> row(std::size_t i) const noexcept {
        return {d_.data() + i * n_, n_};
    }
    const std::vector<double>& data() const noexcept { return d_; }

    /// Matrix over the observations `index[0..m)`, in that order.
    DistanceMatrix submatrix(std::span<const std::size_t> index) const;

    /// Matrix with entry (i, j) = this(perm[i], perm[j]).
    DistanceMatrix permuted(std::span<const std::size_t> perm) const { return submatrix(perm); }

    friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

  private:
    DistanceMatrix(std::size_t n, std::vector<double> d) : n_(n), d_(std::move(d)) {}

    std::size_t n_ = 0;
    std::vector<double> d_;
};

/// Pooled sample partitioned into K groups.
///
/// Group indices are zero-based. `offsets()[k]` is the number of observations
/// in groups before k (the cumulative size vector C).
class GroupedSample {
  public:
    /// Contiguous layout: first sizes[0] observations in group 0, and so on.
    static GroupedSample from_sizes(std::vector<std::size_t> sizes);

    /// Labels must take every value in 0..K-1 at least once.
    static GroupedSample from_labels(std::vector<std::size_t> labels);

    std::size_t total() const noexcept { return labels_.size(); }
    std::size_t groups() const noexcept { return sizes_.size(); }
    std::span<const std::size_t> labels() const noexcept { return labels_; }
    std::span<const std::size_t> sizes() const noexcept { return sizes_; }
    std::span<const std::size_t> offsets() const noexcept { return offsets_; }
    std::size_t size(std::size_t k) const noexcept { return sizes_[k]; }

    /// Observation indices of group k in ascending order.
    std::vector<std::size_t> members(std::size_t k) const;

  private:
    std::vector<std::size_t> labels_;
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
};

/// Ball-membership counts over a common denominator (the counted sample size).
struct ProportionTable {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::uint32_t denominator = 0;
    std::vector<std::uint32_t> counts;

    std::uint32_t count(std::size_t i, std::size_t j) const noexcept { return counts[i * cols + j]; }
    double proportion(std::size_t i, std::size_t j) const noexcept {
        return static_cast<double>(count(i, j)) / static_cast<double>(denominator);
    }
};

/// Row-wise ranks of a distance matrix.
///
/// `rank(i, j)` is the tie-inclusive rank #{t : d(i,t) <= d(i,j)}, in 1..n.
/// `order(i, p)` is the zero-based column holding the p-th smallest entry of
/// row i; tied entries appear in ascending column order.
struct RankStructures {
    std::size_t n = 0;
    std::vector<std::uint32_t> ranks;
    std::vector<std::uint32_t> orders;

    std::uint32_t rank(std::size_t i, std::size_t j) const noexcept { return ranks[i * n + j]; }
    std::uint32_t order(std::size_t i, std::size_t p) const noexcept { return orders[i * n + p]; }
    std::span<const std::uint32_t> rank_row(std::size_t i) const noexcept {
        return {ranks.data() + i * n, n};
    }
    std::span<const std::uint32_t> order_row(std::size_t i) const noexcept {
        return {orders.data() + i * n, n};
    }
};

/// Inclusive zero-based position interval [l, r] in a sorted sample.
struct BoundPair {
    std::uint32_t l = 0;
    std::uint32_t r = 0;

    std::uint32_t count() const noexcept { return r - l + 1; }
    friend bool operator==(const BoundPair&, const BoundPair&) = default;
};

enum class BdKind { Sum, SumMax, Max };
enum class WeightKind { Constant, Probability, ChiSquare };

/// Accepts any unambiguous prefix of "sum", "summax", "max" (an exact match wins).
BdKind parse_bd_kind(std::string_view text);
/// Accepts any unambiguous prefix of "constant", "probability", "chisquare".
WeightKind parse_weight_kind(std::string_view text);

std::string_view to_string(BdKind kind) noexcept;
std::string_view to_string(WeightKind kind) noexcept;

enum class Family { BallDivergence, BallCovariance };

struct VariantResult {
    std::string name;
    double statistic = 0.0;
    std::optional<double> p_value;
};

struct TestResult {
    Family family = Family::BallDivergence;
    std::string variant;
    double statistic = 0.0;
    std::optional<double> p_value;
    std::size_t replicates = 0;
    std::vector<std::size_t> sizes;
    /// Always all three variants of the family, in canonical order.
    std::vector<VariantResult> complete_info;
};

}  // namespace ballistic
