#pragma once

#include <cstdint>
#include <vector>

namespace nefa {

// Sparse time-ordered binary feature matrix.  Row i lists the labels of the
// features object i possesses, sorted ascending.  Labels are dense integers
// 1..K assigned in order of first appearance, so first_object is
// non-decreasing and every label has at least one active row.
struct FeatureAllocation {
    std::size_t n_objects = 0;
    std::vector<std::vector<std::uint32_t>> rows;
    std::vector<std::uint32_t> first_object;  // [k-1] = first row (1-based) with label k

    std::size_t n_features() const { return first_object.size(); }

    // Per-label totals m_{n,k}.
    std::vector<std::uint32_t> sizes() const;

    // Throws std::logic_error if any structural invariant is violated.
    void validate() const;
};

// Relabels arbitrary nonnegative ids densely by first appearance.  When
// label_ids is given, it receives the original id for each dense label.
FeatureAllocation relabel_rows(const std::vector<std::vector<std::uint64_t>>& raw,
                               std::vector<std::uint64_t>* label_ids = nullptr);

// Restriction to the first n_objects rows; features first appearing later
// are dropped and the remaining labels stay dense by construction.
FeatureAllocation head(const FeatureAllocation& a, std::size_t n_objects);

}  // namespace nefa
