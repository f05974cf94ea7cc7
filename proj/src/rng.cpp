#include "nefa/rng.hpp"

#include <stdexcept>

namespace nefa {

namespace {

// Inversion by sequential search; exact for small means.
std::uint64_t poisson_small(RngStream& g, double mean) {
    double L = std::exp(-mean);
    double p = 1.0;
    std::uint64_t k = 0;
    do {
        ++k;
        p *= uniform01(g);
    } while (p > L);
    return k - 1;
}

// Hoermann's transformed rejection with squeeze (PTRS); exact for mean >= 10.
std::uint64_t poisson_ptrs(RngStream& g, double mean) {
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        double U = uniform01(g) - 0.5;
        double V = uniform01(g);
        double us = 0.5 - std::fabs(U);
        double kf = std::floor((2.0 * a / us + b) * U + mean + 0.43);
        if (us >= 0.07 && V <= v_r) return static_cast<std::uint64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && V > us)) continue;
        double k = kf;
        if (std::log(V * inv_alpha / (a / (us * us) + b)) <=
            k * log_mean - mean - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(kf);
        }
    }
}

}  // namespace

std::uint64_t poisson_rv(RngStream& g, double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean < 10.0) return poisson_small(g, mean);
    return poisson_ptrs(g, mean);
}

double gamma_rv(RngStream& g, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw std::invalid_argument("gamma shape and rate must be > 0");
    if (shape < 1.0) {
        double x = gamma_rv(g, shape + 1.0, rate);
        return x * std::pow(uniform_open(g), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal_rv(g);
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform_open(g);
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v / rate;
        if (std::log(u) < 0.5 * x2 + d - d * v + d * std::log(v)) return d * v / rate;
    }
}

}  // namespace nefa
