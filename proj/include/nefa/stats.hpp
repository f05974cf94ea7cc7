#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nefa/allocation.hpp"

namespace nefa {

struct AllocationStats {
    std::size_t n_objects = 0;
    std::size_t n_features = 0;
    std::uint64_t total_size = 0;
    std::vector<std::uint32_t> sizes;           // per label, label order
    std::vector<std::uint32_t> size_histogram;  // [r] = number of features of size r; [0] unused
    std::vector<std::uint32_t> new_per_object;  // features first seen at each object
    std::vector<std::uint32_t> degree;          // features per object
    double singleton_fraction = 0.0;            // size-1 features / all features
};

AllocationStats compute_stats(const FeatureAllocation& alloc);

// Running totals after each prefix of objects, sampled at checkpoints.
struct GrowthPoint {
    std::size_t n = 0;
    std::size_t features = 0;
    std::uint64_t total_size = 0;
    std::uint32_t max_size = 0;
};

std::vector<GrowthPoint> growth_trajectory(const FeatureAllocation& alloc,
                                           const std::vector<std::size_t>& checkpoints);

// Log-spaced prefix lengths in [2, n_max], deduplicated, always ending at n_max.
std::vector<std::size_t> default_checkpoints(std::size_t n_max, std::size_t count = 60);

// Least-squares slope of log y on log x over points with x > 0 and y > 0.
struct PowerFit {
    double slope = 0.0;
    double log_intercept = 0.0;
    std::size_t points = 0;
};

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

// Linear-interpolated order statistic of an ascending-sorted sample.
double quantile_sorted(const std::vector<double>& sorted, double q);

}  // namespace nefa
