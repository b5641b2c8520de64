#pragma once

#include "ballistic/types.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ballistic {

/// Output of `count_leq_after_self`.
struct CountResult {
    /// Input values, sorted ascending by the merge sort.
    std::vector<double> values;
    /// numbers[j] = #{t > j : input[t] <= input[j]}.
    std::vector<std::uint32_t> numbers;
};

/// For every position, counts the later elements that are no larger than it.
/// Merge sort, O(n log n).
CountResult count_leq_after_self(std::span<const double> values);

/// Reusable merge-sort counter for hot loops. Buffers grow on demand and are
/// kept between calls, so one instance per worker avoids reallocation.
template <class T>
class LeqAfterSelfCounter {
  public:
    /// Writes numbers[j] = #{t > j : values[t] <= values[j]}. `values` is
    /// left sorted ascending.
    void run(std::span<T> values, std::span<std::uint32_t> numbers) {
        const std::size_t n = values.size();
        index_.resize(n);
        left_.resize(n);
        right_.resize(n);
        left_index_.resize(n);
        right_index_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            index_[i] = static_cast<std::uint32_t>(i);
            numbers[i] = 0;
        }
        if (n > 1) sort(values, numbers, 0, n - 1);
    }

  private:
    void sort(std::span<T> value, std::span<std::uint32_t> number, std::size_t start, std::size_t end) {
        if (start >= end) return;
        const std::size_t mid = start + (end - start) / 2;
        sort(value, number, start, mid);
        sort(value, number, mid + 1, end);
        merge(value, number, start, mid, end);
    }

    void merge(std::span<T> value, std::span<std::uint32_t> number, std::size_t start, std::size_t mid,
               std::size_t end) {
        const std::size_t left_size = mid - start + 1;
        const std::size_t right_size = end - mid;
        for (std::size_t i = 0; i < left_size; ++i) {
            left_[i] = value[start + i];
            left_index_[i] = index_[start + i];
        }
        for (std::size_t i = 0; i < right_size; ++i) {
            right_[i] = value[mid + 1 + i];
            right_index_[i] = index_[mid + 1 + i];
        }
        std::size_t left_merged = 0;
        std::size_t right_merged = 0;
        std::size_t total = start;
        // Strict '<' sends equal right elements out first, so they are
        // counted for the left element (ties count as "no larger").
        while (left_merged < left_size && right_merged < right_size) {
            if (left_[left_merged] < right_[right_merged]) {
                number[left_index_[left_merged]] += static_cast<std::uint32_t>(right_merged);
                value[total] = left_[left_merged];
                index_[total] = left_index_[left_merged];
                ++left_merged;
            } else {
                value[total] = right_[right_merged];
                index_[total] = right_index_[right_merged];
                ++right_merged;
            }
            ++total;
        }
        while (left_merged < left_size) {
            number[left_index_[left_merged]] += static_cast<std::uint32_t>(right_merged);
            value[total] = left_[left_merged];
            index_[total] = left_index_[left_merged];
            ++left_merged;
            ++total;
        }
        while (right_merged < right_size) {
            value[total] = right_[right_merged];
            index_[total] = right_index_[right_merged];
            ++right_merged;
            ++total;
        }
    }

    std::vector<std::uint32_t> index_;
    std::vector<T> left_, right_;
    std::vector<std::uint32_t> left_index_, right_index_;
};

/// Tie-inclusive ranks and stable sort order of one row.
/// ranks[j] = #{t : row[t] <= row[j]}; order lists columns ascending by value,
/// ties by column index.
void rank_row(std::span<const double> row, std::span<std::uint32_t> ranks, std::span<std::uint32_t> order);

/// Ranks every row of `dist`. O(N^2 log N).
RankStructures rowwise_rank(const DistanceMatrix& dist);

}  // namespace ballistic
