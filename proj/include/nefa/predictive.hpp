#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nefa/allocation.hpp"
#include "nefa/gibbs.hpp"
#include "nefa/levy.hpp"
#include "nefa/time_grid.hpp"

namespace nefa {

// Sampled future activation paths for the features seen in training.
// paths[p][k] holds the sorted test offsets (1..n_test) at which feature k
// becomes active in path p; sizes are cumulative from base_sizes[k].
struct Forecast {
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    std::vector<std::uint32_t> base_sizes;
    std::vector<std::vector<std::vector<std::uint32_t>>> paths;
};

// One-step activation probability for each feature at object n+1:
// 1 - ((zeta + c_k + Delta_{n+1}) / (zeta + c_k))^{sigma - m_k}.
std::vector<double> predict_existing(const LatentState& state, const ModelParams& params,
                                     const TimeGrid& grid, std::size_t n);

// Poisson mean of brand-new features at object n+1.
double predict_new_count(const ModelParams& params, const TimeGrid& grid, std::size_t n);

// Forward-simulates the test range for every posterior draw: given a drawn
// weight, activations over (T_{n_train}, T_{n_train+n_test}] follow the
// feature's latent unit-rate event process.  `replicates` paths per draw.
// The grid must extend to n_train + n_test.
Forecast forecast_sizes_conditional(const GibbsTrace& trace, const TimeGrid& grid,
                                    std::size_t n_train, std::size_t n_test,
                                    std::size_t replicates, std::uint64_t seed);

// Normalized squared error of predicted size paths against the realized
// test-range sizes, features seen in training only:
// err_p = (1/n_test) sum_k sum_i (true m_{i,k} - predicted m_{i,k})^2.
struct ErrSummary {
    std::vector<double> per_path;
    double mean = 0.0;
    double q05 = 0.0;
    double q95 = 0.0;
};

ErrSummary l2_error(const Forecast& forecast, const FeatureAllocation& truth,
                    std::size_t n_train, std::size_t n_test);

struct ForecastSummaryRow {
    std::uint32_t label = 0;       // 1-based feature label
    std::uint32_t test_index = 0;  // offset within the test range
    double mean = 0.0;
    double q05 = 0.0;
    double q95 = 0.0;
};

// Size distribution per feature at selected test offsets, across paths.
std::vector<ForecastSummaryRow> summarize_forecast(const Forecast& forecast,
                                                   const std::vector<std::size_t>& offsets);

}  // namespace nefa
