#pragma once

#include <cstddef>
#include <cstdint>

#include "nefa/stats.hpp"

namespace nefa {

// Moment-style point estimates of the four hyperparameters, plus the raw
// inputs they were computed from.
struct HyperEstimate {
    double xi_hat = 0.0;
    double sigma_hat = 0.0;
    double eta_hat = 0.0;
    double zeta_hat = 0.0;
    // Diagnostics.
    std::size_t n = 0;
    std::size_t features = 0;          // K_n
    std::size_t singletons = 0;        // K_{n,1}
    std::uint64_t total_size = 0;      // m_n
    std::uint32_t max_size = 0;
    double xi_raw = 0.0;               // before clipping at 0
    bool sigma_small_branch = false;   // used the log-rate eta formula
    bool sigma_clamped = false;        // sigma pulled off the upper boundary for eta/zeta
    // Alternate printed-form estimates kept for comparison: eta with the
    // n^{(xi+sigma)/(1+sigma)} denominator, zeta with the 1/(sigma+1) root.
    double eta_alt = 0.0;
    double zeta_alt = 0.0;
};

// xi_hat = log n / log(max feature size) - 1, clipped at 0.
// Throws insufficient_data_error when the largest feature has size < 2.
double estimate_xi(const AllocationStats& stats, std::size_t n);

// sigma_hat = singleton features / all features.
// Throws insufficient_data_error when there are no features.
double estimate_sigma(const AllocationStats& stats);

// eta_hat = Gamma(s+x+1) / (Gamma(s) Gamma(x+1)) * K_n / n^{(x+s)/(x+1)};
// zeta_hat = ((x+1) m_n / (eta_hat n))^{1/(s-1)}.  Requires sigma_hat in
// (0,1); throws std::domain_error at the boundary (use estimate_all, which
// falls back to the sigma ~ 0 log-rate form).
void estimate_eta_zeta(const AllocationStats& stats, std::size_t n, double xi_hat,
                       double sigma_hat, double* eta_hat, double* zeta_hat);

HyperEstimate estimate_all(const AllocationStats& stats, std::size_t n);

}  // namespace nefa
