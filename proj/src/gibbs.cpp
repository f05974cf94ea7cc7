#include "nefa/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nefa/errors.hpp"

namespace nefa {

namespace {

constexpr std::uint64_t kRoleInit = 11;
constexpr std::uint64_t kRoleU = 12;
constexpr std::uint64_t kRoleOmega = 13;
constexpr std::uint64_t kRoleTheta = 14;

// Compensated sum of Delta_i (1 - u_ik) over active cells.
double defect_sum(const LatentState& s, const TimeGrid& grid, std::size_t k) {
    double sum = 0.0, comp = 0.0;
    for (std::size_t a = 0; a < s.active[k].size(); ++a) {
        const double term = grid.delta(s.active[k][a]) * (1.0 - s.u[k][a]);
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

void refresh_c(LatentState& s, const TimeGrid& grid, std::size_t k) {
    s.defect[k] = defect_sum(s, grid, k);
    s.c[k] = grid.exposure(s.n_objects, s.theta[k]) - s.defect[k];
    if (!(s.c[k] > 0.0)) s.c[k] = 1e-300;  // u in (0,1) keeps this positive; guard rounding
}

}  // namespace

double LatentState::recompute_c(const TimeGrid& grid, std::size_t k) const {
    double sum = grid.exposure(n_objects, theta[k]);
    for (std::size_t a = 0; a < active[k].size(); ++a) {
        sum -= grid.delta(active[k][a]) * (1.0 - u[k][a]);
    }
    return sum;
}

LatentState init_state(const FeatureAllocation& alloc, const ModelParams& params,
                       const TimeGrid& grid, RngStream rng) {
    params.validate();
    if (params.family != LevyFamily::ggp) {
        throw std::invalid_argument("posterior sampling requires the ggp family");
    }
    alloc.validate();
    const std::size_t n = alloc.n_objects;
    const std::size_t K = alloc.first_object.size();
    LatentState s;
    s.n_objects = n;
    s.active.assign(K, {});
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::uint32_t lab : alloc.rows[i - 1]) {
            s.active[lab - 1].push_back(static_cast<std::uint32_t>(i));
        }
    }
    s.u.resize(K);
    s.omega.resize(K);
    s.theta.resize(K);
    s.y_star.resize(K);
    s.first_active.assign(alloc.first_object.begin(), alloc.first_object.end());
    s.defect.resize(K);
    s.c.resize(K);
    const double t_n = grid.T(n);
    for (std::size_t k = 0; k < K; ++k) {
        RngStream g = rng.derive(kRoleInit, k);
        s.u[k].assign(s.active[k].size(), 0.5);
        s.omega[k] = static_cast<double>(s.active[k].size()) / t_n;
        s.y_star[k] = grid.Y(s.first_active[k]);
        s.theta[k] = s.y_star[k] * uniform_open(g);
        refresh_c(s, grid, k);
    }
    return s;
}

void sweep_u(LatentState& s, const TimeGrid& grid, RngStream rng) {
    for (std::size_t k = 0; k < s.features(); ++k) {
        RngStream g = rng.derive(k);
        const double w = s.omega[k];
        for (std::size_t a = 0; a < s.active[k].size(); ++a) {
            s.u[k][a] = truncated_exponential_rv(g, grid.delta(s.active[k][a]) * w);
        }
        refresh_c(s, grid, k);
    }
}

void sweep_omega(LatentState& s, const ModelParams& params, RngStream rng) {
    for (std::size_t k = 0; k < s.features(); ++k) {
        RngStream g = rng.derive(k);
        const double shape = static_cast<double>(s.active[k].size()) - params.sigma;
        s.omega[k] = gamma_rv(g, shape, params.zeta + s.c[k]);
    }
}

void sweep_theta(LatentState& s, const TimeGrid& grid, RngStream rng) {
    // Conditional density of theta_k on (Y_{i-1}, Y_i], i <= i1 = first
    // active object: proportional to exp(-omega * suffix exposure).  All
    // active cells sit at or past i1, so their u-terms are a piece-constant
    // factor and the piece weight reduces to (Y_i - Y_{i-1}) e^{omega T_{i-1}}.
    std::vector<double> cum;      // scratch, reused across features
    std::vector<std::size_t> idx;
    for (std::size_t k = 0; k < s.features(); ++k) {
        RngStream g = rng.derive(k);
        const std::size_t i1 = s.first_active[k];
        // Last piece with positive width (Y can plateau); all mass of
        // (0, Y*) lies in pieces 1..i_top and Y_{i_top} = Y*.
        std::size_t i_top = i1;
        while (i_top > 1 && !(grid.Y(i_top) > grid.Y(i_top - 1))) --i_top;
        const double w = s.omega[k];
        const double t_ref = grid.T(i_top - 1);
        double theta = 0.0;
        if (i_top == 1 || w * t_ref <= 2.0) {
            // Mild tilt: uniform proposal, accept by the exposure gap to the
            // top piece (certain acceptance there).
            for (;;) {
                theta = s.y_star[k] * uniform_open(g);
                const std::size_t i = grid.first_exposed(theta);
                if (i >= i_top) break;
                if (std::log(uniform_open(g)) < w * (grid.T(i - 1) - t_ref)) break;
            }
        } else {
            // Heavy tilt toward late pieces: accumulate scaled weights
            // (Y_i - Y_{i-1}) e^{-w (t_ref - T_{i-1})} from the top down; the
            // remaining prefix is bounded by Y_{i-1} e^{-w (t_ref - T_{i-2})}
            // and is dropped once negligible.
            cum.clear();
            idx.clear();
            double total = 0.0;
            for (std::size_t i = i_top;;) {
                const double gap = grid.Y(i) - grid.Y(i - 1);
                if (gap > 0.0) {
                    total += gap * std::exp(-w * (t_ref - grid.T(i - 1)));
                    cum.push_back(total);
                    idx.push_back(i);
                }
                if (i == 1) break;
                const double bound = grid.Y(i - 1) * std::exp(-w * (t_ref - grid.T(i - 2)));
                if (bound <= 1e-15 * total) break;
                --i;
            }
            const double v = total * uniform_open(g);
            std::size_t pick = idx.back();
            for (std::size_t a = 0; a < cum.size(); ++a) {
                if (v <= cum[a]) {
                    pick = idx[a];
                    break;
                }
            }
            theta = grid.Y(pick - 1) + (grid.Y(pick) - grid.Y(pick - 1)) * uniform_open(g);
        }
        s.theta[k] = theta;
        s.c[k] = grid.exposure(s.n_objects, theta) - s.defect[k];
        if (!(s.c[k] > 0.0)) s.c[k] = 1e-300;
    }
}

double log_marginal_augmented(const LatentState& s, const LevyKernel& kernel,
                              const TimeGrid& grid) {
    const std::size_t n = s.n_objects;
    double lp = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double gap = grid.Y(i) - grid.Y(i - 1);
        if (gap > 0.0) lp -= gap * kernel.laplace_exponent(grid.T(n) - grid.T(i - 1));
    }
    for (std::size_t k = 0; k < s.features(); ++k) {
        for (std::uint32_t i : s.active[k]) lp += std::log(grid.delta(i));
        lp += kernel.log_tilted_moment(static_cast<int>(s.active[k].size()), s.c[k]);
    }
    return lp;
}

GibbsTrace run_gibbs(const FeatureAllocation& alloc, const ModelParams& params,
                     const TimeGrid& grid, std::size_t sweeps, std::size_t burn_in,
                     std::size_t thin, std::uint64_t seed) {
    if (burn_in > sweeps) throw std::invalid_argument("burn_in exceeds sweep count");
    if (thin == 0) throw std::invalid_argument("thin must be >= 1");
    LevyKernel kernel(params);
    RngStream root(seed);
    LatentState state = init_state(alloc, params, grid, root.derive(kRoleInit));
    GibbsTrace trace;
    trace.sizes.reserve(state.features());
    for (std::size_t k = 0; k < state.features(); ++k) trace.sizes.push_back(state.size_of(k));
    trace.sweeps = sweeps;
    trace.burn_in = burn_in;
    trace.thin = thin;
    trace.seed = seed;
    trace.log_marginal.reserve(sweeps);
    for (std::size_t sw = 1; sw <= sweeps; ++sw) {
        sweep_u(state, grid, root.derive(kRoleU, sw));
        sweep_omega(state, params, root.derive(kRoleOmega, sw));
        sweep_theta(state, grid, root.derive(kRoleTheta, sw));
        trace.log_marginal.push_back(log_marginal_augmented(state, kernel, grid));
        if (sw > burn_in && (sw - burn_in - 1) % thin == 0) {
            trace.draws.push_back({sw, state.omega, state.theta, state.c});
        }
    }
    return trace;
}

}  // namespace nefa
