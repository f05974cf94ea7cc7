#pragma once

#include <cmath>
#include <functional>

#include "nefa/params.hpp"

namespace nefa {

// Laplace exponent, tilted moments and density of the jump measure.
// GGP:  rho(w) = (eta/Gamma(1-sigma)) w^{-1-sigma} e^{-zeta w}
// TSB:  rho(w) = (eta/Gamma(1-sigma)) e^{-zeta w} (1-e^{-w})^{-1-sigma}
// GGP evaluates in closed form; TSB goes through adaptive quadrature after
// the substitution w = -log(1-pi), which maps the defining integrals to
// Beta-like integrands on (0,1).
class LevyKernel {
public:
    explicit LevyKernel(const ModelParams& params, double quad_rel_tol = 1e-10);

    const ModelParams& params() const { return params_; }
    double quad_rel_tol() const { return quad_rel_tol_; }

    // rho(omega); requires omega > 0.
    double rho(double omega) const;

    // psi(t) = int (1 - e^{-wt}) rho(w) dw; requires t >= 0.
    double laplace_exponent(double t) const;

    // kappa(m, u) = int w^m e^{-uw} rho(w) dw; requires m >= 1, u >= 0.
    double tilted_moment(int m, double u) const;

    // log kappa(m, u); stays finite for m up to feature sizes in the
    // hundreds of thousands where kappa itself overflows.
    double log_tilted_moment(int m, double u) const;

    // Tail mass int_eps^infty rho(w) dw; requires eps > 0.
    double tail_mass(double eps) const;

    // Low-weight mass int_0^eps w rho(w) dw; drives truncation tolerances.
    double weight_mass_below(double eps) const;

    // Inverse of the Laplace exponent (GGP only): psi(t) = v  ->  t.
    double psi_inverse(double v) const;

    bool sigma_is_zero() const { return sigma_zero_; }

private:
    double tsb_quad(const std::function<double(double, double)>& f, double lo,
                    double hi) const;
    double tsb_log_kappa(int m, double u) const;

    ModelParams params_;
    double quad_rel_tol_;
    bool sigma_zero_;     // |sigma| < 1e-8: use the analytic sigma -> 0 limits
    double log_norm_;     // log(eta / Gamma(1 - sigma))
};

// pi = 1 - e^{-omega} and its inverse; the change of variable linking the
// TSB measure to the stable-beta measure on (0,1).
inline double pi_from_omega(double omega) { return -std::expm1(-omega); }
inline double omega_from_pi(double pi) { return -std::log1p(-pi); }

}  // namespace nefa
