#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

namespace ballistic::detail {

using Wide = __int128;

/// Squared discrepancy of one ball, scaled to an integer:
/// (own/n_own - other/n_other)^2 * (n_own * n_other)^2.
inline Wide bd_term(std::uint64_t own_count, std::uint64_t other_count, std::uint64_t n_own,
                    std::uint64_t n_other) noexcept {
    const Wide diff = static_cast<Wide>(own_count * n_other) - static_cast<Wide>(other_count * n_own);
    return diff * diff;
}

/// Two-sample BD from the exact integer sums of both groups' balls. Every
/// code path that reaches this with the same counts returns the same bits.
inline double bd_from_sums(Wide sum_first, Wide sum_second, std::uint64_t n1, std::uint64_t n2) noexcept {
    const long double a = static_cast<long double>(n1);
    const long double b = static_cast<long double>(n2);
    const long double first = static_cast<long double>(sum_first) / (a * a * a * a * b * b);
    const long double second = static_cast<long double>(sum_second) / (b * b * b * b * a * a);
    return static_cast<double>(first + second);
}

/// Neumaier compensated sum.
class CompensatedSum {
  public:
    void add(long double x) noexcept {
        const long double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    long double value() const noexcept { return sum_ + comp_; }

  private:
    long double sum_ = 0.0L;
    long double comp_ = 0.0L;
};

}  // namespace ballistic::detail
