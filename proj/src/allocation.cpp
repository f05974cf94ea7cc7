#include "nefa/allocation.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

namespace nefa {

std::vector<std::uint32_t> FeatureAllocation::sizes() const {
    std::vector<std::uint32_t> m(n_features(), 0);
    for (const auto& row : rows)
        for (std::uint32_t k : row) ++m[k - 1];
    return m;
}

void FeatureAllocation::validate() const {
    if (rows.size() != n_objects) throw std::logic_error("allocation: row count mismatch");
    const std::uint32_t K = static_cast<std::uint32_t>(n_features());
    std::vector<std::uint32_t> seen_at(K, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::uint32_t prev = 0;
        for (std::uint32_t k : rows[i]) {
            if (k < 1 || k > K) throw std::logic_error("allocation: label out of range");
            if (k <= prev) throw std::logic_error("allocation: row not sorted/unique");
            prev = k;
            if (seen_at[k - 1] == 0) seen_at[k - 1] = static_cast<std::uint32_t>(i + 1);
        }
    }
    for (std::uint32_t k = 0; k < K; ++k) {
        if (seen_at[k] == 0) throw std::logic_error("allocation: empty feature column");
        if (seen_at[k] != first_object[k])
            throw std::logic_error("allocation: first_object mismatch");
        if (k > 0 && first_object[k] < first_object[k - 1])
            throw std::logic_error("allocation: labels not in first-appearance order");
    }
}

FeatureAllocation relabel_rows(const std::vector<std::vector<std::uint64_t>>& raw,
                               std::vector<std::uint64_t>* label_ids) {
    FeatureAllocation a;
    a.n_objects = raw.size();
    a.rows.resize(raw.size());
    std::unordered_map<std::uint64_t, std::uint32_t> dense;
    if (label_ids) label_ids->clear();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        auto& row = a.rows[i];
        row.reserve(raw[i].size());
        for (std::uint64_t id : raw[i]) {
            auto [it, inserted] =
                dense.emplace(id, static_cast<std::uint32_t>(dense.size() + 1));
            if (inserted) {
                a.first_object.push_back(static_cast<std::uint32_t>(i + 1));
                if (label_ids) label_ids->push_back(id);
            }
            row.push_back(it->second);
        }
        std::sort(row.begin(), row.end());
    }
    return a;
}

FeatureAllocation head(const FeatureAllocation& a, std::size_t n_objects) {
    if (n_objects > a.n_objects) throw std::out_of_range("head: beyond allocation size");
    FeatureAllocation h;
    h.n_objects = n_objects;
    h.rows.assign(a.rows.begin(), a.rows.begin() + n_objects);
    for (std::uint32_t f : a.first_object)
        if (f <= n_objects) h.first_object.push_back(f);
    return h;
}

}  // namespace nefa
