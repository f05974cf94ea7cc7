#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nefa/allocation.hpp"
#include "nefa/predictive.hpp"
#include "nefa/rng.hpp"

namespace nefa {

// Exchangeable three-parameter baseline: weights have density
// eta / Gamma(1-sigma) * pi^{-1-sigma} (1-pi)^{zeta-1} on (0,1).
struct IbpParams {
    double eta = 1.0;
    double sigma = 0.0;
    double zeta = 1.0;
    void validate() const;
};

// Sequential predictive for object n+1 given per-feature counts over n
// objects: existing feature k recurs with probability (m_k - sigma) /
// (n + zeta - sigma); new features are Poisson with mean
// eta Gamma(n + zeta) / Gamma(n + 1 + zeta - sigma).
double ibp_new_mean(const IbpParams& params, std::size_t n);
void ibp_step_probs(const std::vector<std::uint32_t>& counts, std::size_t n,
                    const IbpParams& params, std::vector<double>* existing,
                    double* new_mean);

FeatureAllocation ibp_simulate(const IbpParams& params, std::size_t n, RngStream rng);

// Exact log-likelihood via the sequential factorization; invariant to
// feature relabeling.
double ibp_loglik(const FeatureAllocation& alloc, const IbpParams& params);

struct IbpFit {
    IbpParams params;
    double loglik = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
};

// Coarse grid over (sigma, zeta) with the profile-optimal eta, refined by
// Nelder-Mead in (log eta, logit sigma, log zeta).
IbpFit ibp_mle(const FeatureAllocation& alloc);

// Forward-simulated size paths over the test range for training features
// only (new test-range features never affect their recurrence law).
Forecast ibp_forecast(const FeatureAllocation& train, const IbpParams& params,
                      std::size_t n_test, std::size_t paths, std::uint64_t seed);

}  // namespace nefa
