#include "nefa/levy.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "nefa/errors.hpp"

namespace nefa {

namespace {

constexpr double kSigmaZeroTol = 1e-8;

// Upper incomplete gamma int_x^infty t^{a-1} e^{-t} dt for any a > -1, x > 0.
// a <= 0 is reduced to a + 1 by the standard recurrence; the mild cancellation
// there grows with x, so large x switches to direct quadrature of the tail.
double upper_inc_gamma(double a, double x) {
    if (a > kSigmaZeroTol) return boost::math::tgamma(a, x);
    if (std::fabs(a) <= kSigmaZeroTol) return boost::math::expint(1, x);
    if (x <= 10.0) {
        double head = std::pow(x, a) * std::exp(-x);
        return (head - boost::math::tgamma(a + 1.0, x)) / (-a);
    }
    boost::math::quadrature::exp_sinh<double> integ;
    double val = integ.integrate(
        [a, x](double s) { return std::pow(x + s, a - 1.0) * std::exp(-s); });
    return val * std::exp(-x);
}

}  // namespace

LevyKernel::LevyKernel(const ModelParams& params, double quad_rel_tol)
    : params_(params),
      quad_rel_tol_(std::clamp(quad_rel_tol, 1e-15, 0.1)),
      sigma_zero_(std::fabs(params.sigma) < kSigmaZeroTol),
      log_norm_(std::log(params.eta) - std::lgamma(1.0 - params.sigma)) {
    params_.validate();
}

double LevyKernel::rho(double omega) const {
    if (!(omega > 0.0)) throw std::invalid_argument("rho: omega must be > 0");
    const double s = params_.sigma, z = params_.zeta;
    if (params_.family == LevyFamily::ggp) {
        return std::exp(log_norm_ - (1.0 + s) * std::log(omega) - z * omega);
    }
    double pi = -std::expm1(-omega);
    return std::exp(log_norm_ - z * omega - (1.0 + s) * std::log(pi));
}

double LevyKernel::laplace_exponent(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("laplace_exponent: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double s = params_.sigma, z = params_.zeta, e = params_.eta;
    if (params_.family == LevyFamily::ggp) {
        if (sigma_zero_) return e * std::log1p(t / z);
        return (e / s) * (std::pow(t + z, s) - std::pow(z, s));
    }
    // int_0^1 [(1-(1-pi)^t)/pi] pi^{-sigma} (1-pi)^{zeta-1} dpi
    auto f = [s, z, t](double pi, double om) {
        double lg = std::log(om);
        double bracket = pi < 1e-10 ? t * (1.0 - 0.5 * (t - 1.0) * pi)
                                    : -std::expm1(t * lg) / pi;
        return bracket * std::exp(-s * std::log(pi) + (z - 1.0) * lg);
    };
    return std::exp(log_norm_) * tsb_quad(f, 0.0, 1.0);
}

double LevyKernel::tilted_moment(int m, double u) const {
    return std::exp(log_tilted_moment(m, u));
}

double LevyKernel::log_tilted_moment(int m, double u) const {
    if (m < 1) {
        throw std::invalid_argument(
            "tilted_moment: m must be >= 1 (m = 0 diverges under infinite activity)");
    }
    if (!(u >= 0.0)) throw std::invalid_argument("tilted_moment: u must be >= 0");
    const double s = params_.sigma, z = params_.zeta;
    if (params_.family == LevyFamily::ggp) {
        return log_norm_ + std::lgamma(m - s) + (s - m) * std::log(u + z);
    }
    return tsb_log_kappa(m, u);
}

double LevyKernel::tail_mass(double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("tail_mass: eps must be > 0");
    const double s = params_.sigma, z = params_.zeta;
    if (params_.family == LevyFamily::ggp) {
        return std::exp(log_norm_ + s * std::log(z)) * upper_inc_gamma(-s, z * eps);
    }
    double lo = pi_from_omega(eps);
    if (lo >= 1.0) return 0.0;
    auto f = [s, z](double pi, double om) {
        return std::exp(-(1.0 + s) * std::log(pi) + (z - 1.0) * std::log(om));
    };
    return std::exp(log_norm_) * tsb_quad(f, lo, 1.0);
}

double LevyKernel::weight_mass_below(double eps) const {
    if (!(eps > 0.0)) throw std::invalid_argument("weight_mass_below: eps must be > 0");
    const double s = params_.sigma, z = params_.zeta;
    if (params_.family == LevyFamily::ggp) {
        return std::exp(log_norm_ + (s - 1.0) * std::log(z)) *
               boost::math::tgamma_lower(1.0 - s, z * eps);
    }
    double hi = std::min(1.0, pi_from_omega(eps));
    auto f = [s, z](double pi, double om) {
        double lg = std::log(om);
        double bracket = pi < 1e-10 ? 1.0 + 0.5 * pi : -lg / pi;
        return bracket * std::exp(-s * std::log(pi) + (z - 1.0) * lg);
    };
    return std::exp(log_norm_) * tsb_quad(f, 0.0, hi);
}

double LevyKernel::psi_inverse(double v) const {
    if (params_.family != LevyFamily::ggp)
        throw std::invalid_argument("psi_inverse: closed form requires the GGP family");
    if (!(v >= 0.0)) throw std::invalid_argument("psi_inverse: v must be >= 0");
    const double s = params_.sigma, z = params_.zeta, e = params_.eta;
    if (sigma_zero_) return z * std::expm1(v / e);
    double arg = (s / e) * v + std::pow(z, s);
    if (arg <= 0.0) return std::numeric_limits<double>::infinity();  // v >= sup psi
    return std::pow(arg, 1.0 / s) - z;
}

// Integrates f(pi, 1-pi) over (lo, hi) within (0,1).  The second argument is
// reconstructed from the integrator's signed endpoint offset (negative = left,
// positive = right) so 1-pi keeps full precision at nodes exponentially close
// to 1.
double LevyKernel::tsb_quad(const std::function<double(double, double)>& f, double lo,
                            double hi) const {
    boost::math::quadrature::tanh_sinh<double> integ(15);
    // Substitute pi = lo + span * v: the integrator's error estimate
    // degenerates on intervals shorter than ~1e-8, so it always sees (0,1).
    // The signed offset vc (negative = left of the midpoint, positive =
    // right) rebuilds 1 - pi exactly at nodes exponentially close to 1.
    const double span = hi - lo;
    const double hi_gap = 1.0 - hi;
    const double lo_gap = 1.0 - lo;
    auto wrapped = [&f, span, lo, hi_gap, lo_gap](double v, double vc) {
        double pi = lo + span * v;
        double om = vc > 0.0 ? hi_gap + span * vc : lo_gap - span * v;
        if (pi < 1e-300 || om < 1e-300) return 0.0;
        return f(pi, om);
    };
    double err = 0.0, l1 = 0.0;
    double val = span * integ.integrate(wrapped, 0.0, 1.0, quad_rel_tol_, &err, &l1);
    err *= span;
    if (!std::isfinite(val) || err > 1e-3 * std::fabs(val) + 1e-12) {
        throw numeric_error("tsb quadrature failed to converge");
    }
    return val;
}

double LevyKernel::tsb_log_kappa(int m, double u) const {
    const double s = params_.sigma, z = params_.zeta;
    const double md = static_cast<double>(m);
    // log integrand of kappa in pi coordinates:
    //   m log(-log(1-pi)) + (u+zeta-1) log(1-pi) - (1+sigma) log(pi)
    auto log_f = [md, s, z, u](double pi, double om) {
        double lg = std::log(om);
        double logl = std::log(-lg);
        return md * logl + (u + z - 1.0) * lg - (1.0 + s) * std::log(pi);
    };
    // Locate the integrand peak with a coarse scan, then integrate the
    // re-scaled integrand so the quadrature never overflows.
    double peak = -std::numeric_limits<double>::infinity();
    for (int i = 1; i < 400; ++i) {
        double pi = static_cast<double>(i) / 400.0;
        peak = std::max(peak, log_f(pi, 1.0 - pi));
    }
    for (int i = 1; i <= 60; ++i) {
        double pi = std::exp(-0.5 * i);
        peak = std::max(peak, log_f(pi, 1.0 - pi));
    }
    const double M = peak;
    auto f = [&log_f, M](double pi, double om) {
        double l = log_f(pi, om) - M;
        return l < -745.0 ? 0.0 : std::exp(l);
    };
    double integral = tsb_quad(f, 0.0, 1.0);
    return log_norm_ + M + std::log(integral);
}

}  // namespace nefa
