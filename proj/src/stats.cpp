#include "nefa/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nefa {

AllocationStats compute_stats(const FeatureAllocation& alloc) {
    AllocationStats s;
    s.n_objects = alloc.n_objects;
    s.sizes = alloc.sizes();
    s.n_features = s.sizes.size();
    s.degree.reserve(alloc.rows.size());
    for (const auto& row : alloc.rows) {
        s.degree.push_back(static_cast<std::uint32_t>(row.size()));
        s.total_size += row.size();
    }
    std::uint32_t max_size = 0;
    for (std::uint32_t m : s.sizes) max_size = std::max(max_size, m);
    s.size_histogram.assign(max_size + 1, 0);
    for (std::uint32_t m : s.sizes) ++s.size_histogram[m];
    s.new_per_object.assign(alloc.n_objects, 0);
    for (std::uint32_t f : alloc.first_object) {
        if (f >= 1 && f <= alloc.n_objects) ++s.new_per_object[f - 1];
    }
    if (s.n_features > 0) {
        s.singleton_fraction =
            static_cast<double>(max_size >= 1 ? s.size_histogram[1] : 0) /
            static_cast<double>(s.n_features);
    }
    return s;
}

std::vector<GrowthPoint> growth_trajectory(const FeatureAllocation& alloc,
                                           const std::vector<std::size_t>& checkpoints) {
    std::vector<std::size_t> cps = checkpoints;
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    std::vector<GrowthPoint> out;
    out.reserve(cps.size());

    // Labels are dense and ordered by first appearance, so the feature count
    // after n objects is the number of first_object entries <= n.
    std::vector<std::uint32_t> count(alloc.first_object.size() + 1, 0);
    std::uint64_t total = 0;
    std::uint32_t max_size = 0;
    std::size_t next_label = 0;
    std::size_t ci = 0;
    for (std::size_t i = 1; i <= alloc.n_objects && ci < cps.size(); ++i) {
        for (std::uint32_t lab : alloc.rows[i - 1]) {
            ++count[lab];
            max_size = std::max(max_size, count[lab]);
        }
        total += alloc.rows[i - 1].size();
        while (next_label < alloc.first_object.size() &&
               alloc.first_object[next_label] <= i) {
            ++next_label;
        }
        if (i == cps[ci]) {
            out.push_back({i, next_label, total, max_size});
            ++ci;
        }
    }
    return out;
}

std::vector<std::size_t> default_checkpoints(std::size_t n_max, std::size_t count) {
    std::vector<std::size_t> cps;
    if (n_max == 0) return cps;
    if (n_max == 1 || count < 2) return {n_max};
    const double lo = std::log(2.0);
    const double hi = std::log(static_cast<double>(n_max));
    for (std::size_t k = 0; k < count; ++k) {
        const double t = lo + (hi - lo) * static_cast<double>(k) /
                                  static_cast<double>(count - 1);
        cps.push_back(static_cast<std::size_t>(std::lround(std::exp(t))));
    }
    cps.push_back(n_max);
    for (auto& c : cps) c = std::min(c, n_max);
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    return cps;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("empty sample");
    if (q <= 0.0) return sorted.front();
    if (q >= 1.0) return sorted.back();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("size mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++m;
    }
    PowerFit fit;
    fit.points = m;
    if (m < 2) return fit;
    const double dm = static_cast<double>(m);
    const double denom = sxx - sx * sx / dm;
    if (denom <= 0.0) return fit;
    fit.slope = (sxy - sx * sy / dm) / denom;
    fit.log_intercept = (sy - fit.slope * sx) / dm;
    return fit;
}

}  // namespace nefa
