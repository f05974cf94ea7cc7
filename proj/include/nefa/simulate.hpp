#pragma once

#include <cstdint>
#include <vector>

#include "nefa/allocation.hpp"
#include "nefa/levy.hpp"
#include "nefa/rng.hpp"
#include "nefa/time_grid.hpp"

namespace nefa {

// One point of the random measure: weight, location, stable id.
struct Atom {
    double omega = 0.0;
    double theta = 0.0;
    std::uint32_t label = 0;
};

struct SimResult {
    FeatureAllocation allocation;
    // Ground-truth atoms per label; filled by the conditional pipelines,
    // empty for the marginal sequential sampler (weights integrated out).
    std::vector<Atom> atoms;
    std::uint64_t seed = 0;
    ModelParams params;
    double eps = 0.0;  // weight truncation used, 0 for the exact sampler
};

enum class SamplerKind { sequential, truncated, latent };

// Largest eps whose expected number of missed *active* features,
// (sum_i Y_i Delta_i) * int_0^eps w rho(w) dw, stays below missed_tol.
double truncation_eps(const LevyKernel& kernel, const TimeGrid& grid, std::size_t n,
                      double missed_tol);

// Atoms of a Poisson process with intensity rho(w)1{w>eps} dw on
// theta in [0, y_max]: count ~ Poisson(y_max * tail_mass(eps)), locations
// uniform, weights from the normalized truncated density (exact rejection
// with analytic envelopes).  Throws budget_error when the expected count
// exceeds atom_budget.
std::vector<Atom> sample_crm_truncated(const LevyKernel& kernel, double y_max,
                                       double eps, RngStream rng,
                                       std::size_t atom_budget = 10000000);

// Independent cells z_{ij} ~ Bernoulli(1 - e^{-omega_j Delta_i}) for exposed
// objects (theta_j <= Y_i), zero otherwise.  source_atom, when given, maps
// each dense label to the index of its atom in `atoms`.
FeatureAllocation sample_allocation_conditional(const std::vector<Atom>& atoms,
                                                const TimeGrid& grid, std::size_t n,
                                                RngStream rng,
                                                std::vector<std::uint32_t>* source_atom = nullptr);

// Distributionally identical to the conditional sampler; realizes each
// feature's latent unit-rate event process restricted to the exposure
// window and marks objects whose interval contains an event.
FeatureAllocation sample_allocation_latent_poisson(const std::vector<Atom>& atoms,
                                                   const TimeGrid& grid, std::size_t n,
                                                   RngStream rng,
                                                   std::vector<std::uint32_t>* source_atom = nullptr);

// Exact marginal sampler (no truncation), GGP only.  Feature births follow
// a Poisson process whose (interval, birth-time) intensity integrates the
// weight out; each born feature then evolves by closed-form inverse-CDF
// jumps of its next active object, which reproduces the per-object
// kappa-ratio flip probabilities exactly.
SimResult sample_allocation_sequential(const LevyKernel& kernel, const TimeGrid& grid,
                                       std::size_t n, RngStream rng);

// Mean new-feature count at object n_next given the first n_next - 1:
// sum_{i<=n_next} (Y_i - Y_{i-1}) [psi(T_{n_next} - T_{i-1}) - psi(T_{n_next-1} - T_{i-1})].
double new_feature_mean(const LevyKernel& kernel, const TimeGrid& grid,
                        std::size_t n_next);

// Exact model expectations used as oracles and diagnostics.
double expected_features(const LevyKernel& kernel, const TimeGrid& grid, std::size_t n);
// Size counted in latent activation events; it matches the per-object count
// up to within-interval collisions, which vanish as the grid refines.
// Summed over r >= 1 this recovers expected_features exactly.
double expected_features_of_size(const LevyKernel& kernel, const TimeGrid& grid,
                                 std::size_t n, int r);
double expected_object_degree(const LevyKernel& kernel, const TimeGrid& grid,
                              std::size_t i);

// End-to-end convenience used by the CLI: builds kernel + grid, picks eps
// from missed_tol for the conditional pipelines, relabels atoms to match
// the allocation.
SimResult simulate_dataset(const ModelParams& params, std::size_t n, std::uint64_t seed,
                           SamplerKind kind, double missed_tol = 0.1,
                           std::size_t atom_budget = 10000000);

}  // namespace nefa
