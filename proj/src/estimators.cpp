#include "nefa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nefa/errors.hpp"

namespace nefa {

namespace {

std::uint32_t max_size_of(const AllocationStats& stats) {
    std::uint32_t m = 0;
    for (std::uint32_t s : stats.sizes) m = std::max(m, s);
    return m;
}

}  // namespace

double estimate_xi(const AllocationStats& stats, std::size_t n) {
    const std::uint32_t mx = max_size_of(stats);
    if (mx < 2) throw insufficient_data_error("largest feature has size < 2; xi estimate undefined");
    const double raw =
        std::log(static_cast<double>(n)) / std::log(static_cast<double>(mx)) - 1.0;
    return std::max(0.0, raw);
}

double estimate_sigma(const AllocationStats& stats) {
    if (stats.n_features == 0) throw insufficient_data_error("no features observed");
    return stats.singleton_fraction;
}

void estimate_eta_zeta(const AllocationStats& stats, std::size_t n, double xi_hat,
                       double sigma_hat, double* eta_hat, double* zeta_hat) {
    if (!(sigma_hat > 0.0 && sigma_hat < 1.0)) {
        throw std::domain_error("sigma_hat outside (0,1); use the sigma = 0 branch");
    }
    if (xi_hat < 0.0) throw std::domain_error("xi_hat must be >= 0");
    const double nn = static_cast<double>(n);
    const double kn = static_cast<double>(stats.n_features);
    const double mn = static_cast<double>(stats.total_size);
    const double lconst = std::lgamma(sigma_hat + xi_hat + 1.0) - std::lgamma(sigma_hat) -
                          std::lgamma(xi_hat + 1.0);
    const double eta = std::exp(lconst + std::log(kn) -
                                (xi_hat + sigma_hat) / (xi_hat + 1.0) * std::log(nn));
    const double ratio = (xi_hat + 1.0) * mn / (eta * nn);
    const double zeta = std::pow(ratio, 1.0 / (sigma_hat - 1.0));
    if (eta_hat) *eta_hat = eta;
    if (zeta_hat) *zeta_hat = zeta;
}

HyperEstimate estimate_all(const AllocationStats& stats, std::size_t n) {
    HyperEstimate h;
    h.n = n;
    h.features = stats.n_features;
    h.singletons = (stats.size_histogram.size() > 1) ? stats.size_histogram[1] : 0;
    h.total_size = stats.total_size;
    h.max_size = max_size_of(stats);

    if (h.max_size < 2) throw insufficient_data_error("largest feature has size < 2");
    h.xi_raw = std::log(static_cast<double>(n)) /
                   std::log(static_cast<double>(h.max_size)) - 1.0;
    h.xi_hat = std::max(0.0, h.xi_raw);
    h.sigma_hat = estimate_sigma(stats);

    const double nn = static_cast<double>(n);
    const double kn = static_cast<double>(stats.n_features);
    const double mn = static_cast<double>(stats.total_size);

    double sig = h.sigma_hat;
    if (sig > 0.98) {
        sig = 0.98;  // keep the zeta root finite off the all-singletons boundary
        h.sigma_clamped = true;
    }
    if (h.sigma_hat < 0.02) {
        // Near sigma = 0 the gamma-ratio constant degenerates; the feature
        // count then grows like eta n^{xi/(xi+1)} log n.
        h.sigma_small_branch = true;
        h.eta_hat = kn / (std::pow(nn, h.xi_hat / (h.xi_hat + 1.0)) * std::log(nn));
        const double ratio = (h.xi_hat + 1.0) * mn / (h.eta_hat * nn);
        h.zeta_hat = std::pow(ratio, 1.0 / (sig - 1.0));
    } else {
        estimate_eta_zeta(stats, n, h.xi_hat, sig, &h.eta_hat, &h.zeta_hat);
    }

    // Printed-form alternates (different denominator exponent / root), kept
    // so either convention can be compared downstream.
    {
        const double sa = std::clamp(h.sigma_hat, 0.02, 0.98);
        const double lconst = std::lgamma(sa + h.xi_hat + 1.0) - std::lgamma(sa) -
                              std::lgamma(h.xi_hat + 1.0);
        h.eta_alt = std::exp(lconst + std::log(kn) -
                             (h.xi_hat + sa) / (1.0 + sa) * std::log(nn));
        const double ratio = (h.xi_hat + 1.0) * mn / (h.eta_alt * nn);
        h.zeta_alt = std::pow(ratio, 1.0 / (sa + 1.0));
    }
    return h;
}

}  // namespace nefa
