#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "nefa/allocation.hpp"
#include "nefa/levy.hpp"
#include "nefa/rng.hpp"
#include "nefa/time_grid.hpp"

namespace nefa {

// Augmented posterior state for an observed allocation: per active cell a
// slack variable u in (0,1) (u = 1 exactly on inactive exposed cells, held
// implicitly), per feature a weight, a location, and cached exposure sums.
struct LatentState {
    std::size_t n_objects = 0;
    std::vector<std::vector<std::uint32_t>> active;  // per feature, sorted object ids
    std::vector<std::vector<double>> u;              // aligned with active
    std::vector<double> omega;
    std::vector<double> theta;
    std::vector<double> y_star;                // min Y_i over active objects
    std::vector<std::uint32_t> first_active;   // earliest active object
    std::vector<double> defect;                // D_k = sum_active Delta_i (1 - u_ik)
    std::vector<double> c;                     // sum_exposed Delta_i u_ik = exposure - D_k

    std::size_t features() const { return omega.size(); }
    std::uint32_t size_of(std::size_t k) const {
        return static_cast<std::uint32_t>(active[k].size());
    }
    // Recomputed-from-scratch value of c[k]; the cached one must match.
    double recompute_c(const TimeGrid& grid, std::size_t k) const;
};

LatentState init_state(const FeatureAllocation& alloc, const ModelParams& params,
                       const TimeGrid& grid, RngStream rng);

// Exact conditional updates (no rejection at the move level).
void sweep_u(LatentState& state, const TimeGrid& grid, RngStream rng);
void sweep_omega(LatentState& state, const ModelParams& params, RngStream rng);
void sweep_theta(LatentState& state, const TimeGrid& grid, RngStream rng);

// Log of the augmented marginal density (weights integrated out):
// -sum_i (Y_i - Y_{i-1}) psi(T_n - T_{i-1}) + sum_active log Delta_i
// + sum_k log kappa(m_k, c_k).
double log_marginal_augmented(const LatentState& state, const LevyKernel& kernel,
                              const TimeGrid& grid);

struct GibbsDraw {
    std::size_t sweep = 0;
    std::vector<double> omega;
    std::vector<double> theta;
    std::vector<double> c;
};

struct GibbsTrace {
    std::vector<std::uint32_t> sizes;   // per feature, fixed by the data
    std::vector<double> log_marginal;   // one entry per sweep
    std::vector<GibbsDraw> draws;       // thinned, post-burn-in
    std::size_t sweeps = 0;
    std::size_t burn_in = 0;
    std::size_t thin = 1;
    std::uint64_t seed = 0;
};

// Sweep order u -> omega -> theta; draws recorded after burn_in at the given
// thinning stride.  Bit-for-bit reproducible from (inputs, seed).
GibbsTrace run_gibbs(const FeatureAllocation& alloc, const ModelParams& params,
                     const TimeGrid& grid, std::size_t sweeps, std::size_t burn_in,
                     std::size_t thin, std::uint64_t seed);

}  // namespace nefa
