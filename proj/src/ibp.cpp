#include "nefa/ibp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace nefa {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double inv_logit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double log_lambda(const IbpParams& p, std::size_t next) {
    const double n = static_cast<double>(next - 1);
    return std::log(p.eta) + std::lgamma(n + p.zeta) - std::lgamma(n + 1.0 + p.zeta - p.sigma);
}

// Minimal Nelder-Mead on R^d; returns best vertex.
std::vector<double> nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                std::vector<double> x0, double step, std::size_t max_iter,
                                double ftol, double* fbest, bool* converged,
                                std::size_t* evals) {
    const std::size_t d = x0.size();
    std::vector<std::vector<double>> xs(d + 1, x0);
    std::vector<double> fs(d + 1);
    for (std::size_t i = 1; i <= d; ++i) xs[i][i - 1] += step;
    for (std::size_t i = 0; i <= d; ++i) fs[i] = f(xs[i]);
    std::size_t ev = d + 1;
    *converged = false;
    for (std::size_t it = 0; it < max_iter; ++it) {
        std::vector<std::size_t> ord(d + 1);
        for (std::size_t i = 0; i <= d; ++i) ord[i] = i;
        std::sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
        if (fs[ord[d]] - fs[ord[0]] < ftol) {
            *converged = true;
            break;
        }
        std::vector<double> centroid(d, 0.0);
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) centroid[j] += xs[ord[i]][j];
        }
        for (double& cj : centroid) cj /= static_cast<double>(d);
        auto blend = [&](double t) {
            std::vector<double> x(d);
            for (std::size_t j = 0; j < d; ++j) {
                x[j] = centroid[j] + t * (centroid[j] - xs[ord[d]][j]);
            }
            return x;
        };
        std::vector<double> xr = blend(1.0);
        double fr = f(xr);
        ++ev;
        if (fr < fs[ord[0]]) {
            std::vector<double> xe = blend(2.0);
            double fe = f(xe);
            ++ev;
            if (fe < fr) { xs[ord[d]] = xe; fs[ord[d]] = fe; }
            else { xs[ord[d]] = xr; fs[ord[d]] = fr; }
        } else if (fr < fs[ord[d - 1]]) {
            xs[ord[d]] = xr;
            fs[ord[d]] = fr;
        } else {
            std::vector<double> xc = blend(fr < fs[ord[d]] ? 0.5 : -0.5);
            double fc = f(xc);
            ++ev;
            if (fc < std::min(fr, fs[ord[d]])) {
                xs[ord[d]] = xc;
                fs[ord[d]] = fc;
            } else {
                for (std::size_t i = 1; i <= d; ++i) {
                    for (std::size_t j = 0; j < d; ++j) {
                        xs[ord[i]][j] = 0.5 * (xs[ord[i]][j] + xs[ord[0]][j]);
                    }
                    fs[ord[i]] = f(xs[ord[i]]);
                    ++ev;
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= d; ++i) {
        if (fs[i] < fs[best]) best = i;
    }
    *fbest = fs[best];
    *evals += ev;
    return xs[best];
}

}  // namespace

void IbpParams::validate() const {
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (!(sigma >= 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must lie in [0,1)");
    if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
}

double ibp_new_mean(const IbpParams& params, std::size_t n) {
    return std::exp(log_lambda(params, n + 1));
}

void ibp_step_probs(const std::vector<std::uint32_t>& counts, std::size_t n,
                    const IbpParams& params, std::vector<double>* existing,
                    double* new_mean) {
    if (existing) {
        existing->clear();
        existing->reserve(counts.size());
        const double denom = static_cast<double>(n) + params.zeta - params.sigma;
        for (std::uint32_t m : counts) {
            existing->push_back((static_cast<double>(m) - params.sigma) / denom);
        }
    }
    if (new_mean) *new_mean = ibp_new_mean(params, n);
}

FeatureAllocation ibp_simulate(const IbpParams& params, std::size_t n, RngStream rng) {
    params.validate();
    FeatureAllocation alloc;
    alloc.n_objects = n;
    alloc.rows.assign(n, {});
    std::vector<std::uint32_t> counts;
    for (std::size_t i = 1; i <= n; ++i) {
        RngStream g = rng.derive(i);
        const double denom = static_cast<double>(i - 1) + params.zeta - params.sigma;
        for (std::size_t k = 0; k < counts.size(); ++k) {
            const double p = (static_cast<double>(counts[k]) - params.sigma) / denom;
            if (uniform01(g) < p) {
                alloc.rows[i - 1].push_back(static_cast<std::uint32_t>(k + 1));
                ++counts[k];
            }
        }
        const std::uint64_t fresh = poisson_rv(g, std::exp(log_lambda(params, i)));
        for (std::uint64_t j = 0; j < fresh; ++j) {
            counts.push_back(1);
            alloc.rows[i - 1].push_back(static_cast<std::uint32_t>(counts.size()));
            alloc.first_object.push_back(static_cast<std::uint32_t>(i));
        }
    }
    return alloc;
}

double ibp_loglik(const FeatureAllocation& alloc, const IbpParams& params) {
    params.validate();
    const std::size_t n = alloc.n_objects;
    const double sigma = params.sigma;
    const double zeta = params.zeta;
    double ll = 0.0;
    // New-feature Poisson terms per object.
    std::vector<std::uint32_t> births(n, 0);
    for (std::uint32_t b : alloc.first_object) {
        if (b >= 1 && b <= n) ++births[b - 1];
    }
    for (std::size_t i = 1; i <= n; ++i) {
        const double loglam = log_lambda(params, i);
        ll += static_cast<double>(births[i - 1]) * loglam - std::exp(loglam) -
              std::lgamma(static_cast<double>(births[i - 1]) + 1.0);
    }
    // Per-feature recurrence terms after birth; the hit numerators, miss
    // numerators, and shared denominators all telescope into gamma ratios.
    const auto sizes = alloc.sizes();
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        const double m = static_cast<double>(sizes[k]);
        const double b = static_cast<double>(alloc.first_object[k]);
        const double nn = static_cast<double>(n);
        ll += std::lgamma(m - sigma) - std::lgamma(1.0 - sigma);
        ll += std::lgamma(nn - m + zeta) - std::lgamma(b - 1.0 + zeta);
        ll += std::lgamma(b + zeta - sigma) - std::lgamma(nn + zeta - sigma);
    }
    return ll;
}

IbpFit ibp_mle(const FeatureAllocation& alloc) {
    if (alloc.first_object.empty()) throw std::invalid_argument("empty allocation");
    const std::size_t n = alloc.n_objects;
    IbpFit fit;

    const auto neg_ll = [&](const std::vector<double>& x) {
        IbpParams p;
        p.eta = std::exp(std::clamp(x[0], -20.0, 20.0));
        p.sigma = std::clamp(inv_logit(x[1]), 1e-6, 1.0 - 1e-6);
        p.zeta = std::exp(std::clamp(x[2], -10.0, 10.0));
        return -ibp_loglik(alloc, p);
    };

    // Profile-optimal eta for fixed (sigma, zeta): the likelihood depends on
    // eta only through Poisson(K_n total; eta * sum g_i), maximized at
    // K_n / sum g_i.
    const double k_total = static_cast<double>(alloc.first_object.size());
    const auto eta_star = [&](double sigma, double zeta) {
        IbpParams p{1.0, sigma, zeta};
        double s = 0.0;
        for (std::size_t i = 1; i <= n; ++i) s += std::exp(log_lambda(p, i));
        return k_total / s;
    };

    const std::array<double, 5> sig_grid = {0.05, 0.25, 0.45, 0.65, 0.85};
    const std::array<double, 5> zeta_grid = {0.3, 1.0, 3.0, 10.0, 30.0};
    const std::array<double, 5> eta_mult = {0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> best_x;
    double best_f = HUGE_VAL;
    for (double sg : sig_grid) {
        for (double zg : zeta_grid) {
            const double es = eta_star(sg, zg);
            for (double mult : eta_mult) {
                std::vector<double> x = {std::log(es * mult), logit(sg), std::log(zg)};
                const double fv = neg_ll(x);
                ++fit.evaluations;
                if (fv < best_f) {
                    best_f = fv;
                    best_x = x;
                }
            }
        }
    }

    double fbest = best_f;
    bool converged = false;
    std::vector<double> xb =
        nelder_mead(neg_ll, best_x, 0.25, 600, 1e-6, &fbest, &converged, &fit.evaluations);
    fit.params.eta = std::exp(std::clamp(xb[0], -20.0, 20.0));
    fit.params.sigma = std::clamp(inv_logit(xb[1]), 1e-6, 1.0 - 1e-6);
    fit.params.zeta = std::exp(std::clamp(xb[2], -10.0, 10.0));
    fit.loglik = -fbest;
    fit.converged = converged;
    return fit;
}

Forecast ibp_forecast(const FeatureAllocation& train, const IbpParams& params,
                      std::size_t n_test, std::size_t paths, std::uint64_t seed) {
    params.validate();
    const std::size_t n = train.n_objects;
    const auto base = train.sizes();
    Forecast fc;
    fc.n_train = n;
    fc.n_test = n_test;
    fc.base_sizes = base;
    fc.paths.reserve(paths);
    RngStream root(seed);
    std::vector<double> counts(base.size());
    for (std::size_t p = 0; p < paths; ++p) {
        std::vector<std::vector<std::uint32_t>> path(base.size());
        for (std::size_t k = 0; k < base.size(); ++k) counts[k] = base[k];
        for (std::size_t off = 1; off <= n_test; ++off) {
            RngStream g = root.derive(p, off);
            const double denom =
                static_cast<double>(n + off - 1) + params.zeta - params.sigma;
            for (std::size_t k = 0; k < counts.size(); ++k) {
                if (uniform01(g) < (counts[k] - params.sigma) / denom) {
                    counts[k] += 1.0;
                    path[k].push_back(static_cast<std::uint32_t>(off));
                }
            }
        }
        fc.paths.push_back(std::move(path));
    }
    return fc;
}

}  // namespace nefa
