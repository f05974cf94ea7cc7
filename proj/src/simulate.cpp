#include "nefa/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "nefa/errors.hpp"

namespace nefa {

namespace {

// Stream roles; every derived stream is a pure function of (seed, role, ids),
// so results do not depend on evaluation order.
constexpr std::uint64_t kRoleCrmCount = 1;
constexpr std::uint64_t kRoleCrmAtom = 2;
constexpr std::uint64_t kRoleCond = 3;
constexpr std::uint64_t kRoleLatent = 4;
constexpr std::uint64_t kRoleSeqCount = 5;
constexpr std::uint64_t kRoleSeqFeature = 6;

constexpr std::size_t kMaxRejectIters = 1u << 22;

[[noreturn]] void reject_overflow() {
    throw numeric_error("weight rejection sampler failed to accept; parameters out of supported range");
}

// Power-law segment w^{-1-sigma} on (lo, hi): normalizing mass and inverse CDF.
double plaw_mass(double sigma, double lo, double hi) {
    if (std::fabs(sigma) < 1e-12) return std::log(hi / lo);
    return (std::pow(lo, -sigma) - std::pow(hi, -sigma)) / sigma;
}

double plaw_sample(double sigma, double lo, double hi, double v) {
    if (std::fabs(sigma) < 1e-12) return lo * std::pow(hi / lo, v);
    double a = std::pow(lo, -sigma);
    double b = std::pow(hi, -sigma);
    return std::pow(a - v * (a - b), -1.0 / sigma);
}

// Truncated GGP weight density ~ w^{-1-sigma} e^{-zeta w} on (eps, inf).
double sample_ggp_weight(const ModelParams& p, double eps, RngStream& g) {
    const double sigma = p.sigma;
    const double zeta = p.zeta;
    if (sigma < 0.0) {
        // Gamma(-sigma, zeta) conditioned on w > eps.
        if (boost::math::gamma_q(-sigma, zeta * eps) > 0.05) {
            for (std::size_t it = 0; it < kMaxRejectIters; ++it) {
                double w = gamma_rv(g, -sigma, zeta);
                if (w > eps) return w;
            }
            reject_overflow();
        }
        // Deep tail: shifted-exponential proposal at half rate; the ratio
        // w^{-sigma-1} e^{-zeta w / 2} peaks at what = max(eps, 2(-sigma-1)/zeta).
        const double am1 = -sigma - 1.0;
        const double what = std::max(eps, 2.0 * am1 / zeta);
        const double log_peak = am1 * std::log(what) - 0.5 * zeta * what;
        for (std::size_t it = 0; it < kMaxRejectIters; ++it) {
            double w = eps + exponential_rv(g, 0.5 * zeta);
            double log_acc = am1 * std::log(w) - 0.5 * zeta * w - log_peak;
            if (std::log(uniform_open(g)) < log_acc) return w;
        }
        reject_overflow();
    }
    // sigma in [0, 1).
    if (zeta * eps >= 1.0) {
        // Tail start already past the exponential scale: envelope eps^{-1-sigma} e^{-zeta w}.
        for (std::size_t it = 0; it < kMaxRejectIters; ++it) {
            double w = eps + exponential_rv(g, zeta);
            if (std::log(uniform_open(g)) < -(1.0 + sigma) * std::log(w / eps)) return w;
        }
        reject_overflow();
    }
    // Two-piece envelope: power law on (eps, A) damped by e^{-zeta(w-eps)},
    // exponential tail on (A, inf) damped by (w/A)^{-1-sigma}.
    const double A = 1.0 / zeta;
    const double w1 = std::exp(-zeta * eps) * plaw_mass(sigma, eps, A);
    const double w2 = std::pow(A, -1.0 - sigma) * std::exp(-zeta * A) / zeta;
    const double p1 = w1 / (w1 + w2);
    for (std::size_t it = 0; it < kMaxRejectIters; ++it) {
        if (uniform01(g) < p1) {
            double w = plaw_sample(sigma, eps, A, uniform01(g));
            if (std::log(uniform_open(g)) < -zeta * (w - eps)) return w;
        } else {
            double w = A + exponential_rv(g, zeta);
            if (std::log(uniform_open(g)) < -(1.0 + sigma) * std::log(w / A)) return w;
        }
    }
    reject_overflow();
}

// Truncated TSB weight in pi = 1 - e^{-w} coordinates:
// density ~ pi^{-1-sigma} (1-pi)^{zeta-1} on (pi_lo, 1).
double sample_tsb_weight(const ModelParams& p, double eps, RngStream& g) {
    const double sigma = p.sigma;
    const double zeta = p.zeta;
    const double pi_lo = pi_from_omega(eps);
    const double split = std::min(0.5, pi_lo + 1.0 / std::max(1.0, zeta));
    if (pi_lo < split) {
        // Left: power law bounded by (1-pi_lo)^{zeta-1} (zeta >= 1) or
        // (1-split)^{zeta-1} (zeta < 1); right: (1-pi)^{zeta-1} tail bounded
        // by split^{-1-sigma}.
        const double beta_bound = (zeta >= 1.0) ? std::pow(1.0 - pi_lo, zeta - 1.0)
                                                : std::pow(1.0 - split, zeta - 1.0);
        const double w1 = beta_bound * plaw_mass(sigma, pi_lo, split);
        const double w2 = std::pow(split, -1.0 - sigma) * std::pow(1.0 - split, zeta) / zeta;
        const double p1 = w1 / (w1 + w2);
        for (std::size_t it = 0; it < kMaxRejectIters; ++it) {
            if (uniform01(g) < p1) {
                double pi = plaw_sample(sigma, pi_lo, split, uniform01(g));
                double log_acc = (zeta - 1.0) * std::log1p(-pi) - std::log(beta_bound);
                if (std::log(uniform_open(g)) < log_acc) return omega_from_pi(pi);
            } else {
                double s = (1.0 - split) * std::pow(uniform_open(g), 1.0 / zeta);
                double pi = 1.0 - s;
                if (std::log(uniform_open(g)) < -(1.0 + sigma) * std::log(pi / split)) {
                    return -std::log(s);
                }
            }
        }
        reject_overflow();
    }
    // pi_lo >= 1/2: single right piece from pi_lo.
    for (std::size_t it = 0; it < kMaxRejectIters; ++it) {
        double s = (1.0 - pi_lo) * std::pow(uniform_open(g), 1.0 / zeta);
        double pi = 1.0 - s;
        if (std::log(uniform_open(g)) < -(1.0 + sigma) * std::log(pi / pi_lo)) {
            return -std::log(s);
        }
    }
    reject_overflow();
}

struct LabeledRows {
    std::vector<std::vector<std::uint64_t>> raw;  // per object, atom indices
};

FeatureAllocation finalize_rows(LabeledRows&& lab, std::size_t n,
                                std::vector<std::uint32_t>* source_atom) {
    std::vector<std::uint64_t> ids;
    FeatureAllocation alloc = relabel_rows(std::move(lab.raw), source_atom ? &ids : nullptr);
    alloc.n_objects = n;
    if (source_atom) {
        source_atom->assign(ids.begin(), ids.end());
    }
    return alloc;
}

}  // namespace

double truncation_eps(const LevyKernel& kernel, const TimeGrid& grid, std::size_t n,
                      double missed_tol) {
    if (missed_tol <= 0.0) throw std::invalid_argument("missed_tol must be positive");
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) s += grid.Y(i) * grid.delta(i);
    const double target = missed_tol / s;
    double lo = -90.0, hi = 5.0;  // log eps
    if (kernel.weight_mass_below(std::exp(lo)) > target) return std::exp(lo);
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (kernel.weight_mass_below(std::exp(mid)) <= target ? lo : hi) = mid;
    }
    return std::exp(lo);
}

std::vector<Atom> sample_crm_truncated(const LevyKernel& kernel, double y_max,
                                       double eps, RngStream rng,
                                       std::size_t atom_budget) {
    if (eps <= 0.0) throw std::invalid_argument("eps must be positive");
    const double mean = y_max * kernel.tail_mass(eps);
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw numeric_error("non-finite truncated atom count mean");
    }
    if (mean + 6.0 * std::sqrt(mean) > static_cast<double>(atom_budget)) {
        throw budget_error("expected atom count " + std::to_string(mean) +
                           " exceeds budget " + std::to_string(atom_budget) +
                           "; raise eps or the missed-feature tolerance");
    }
    RngStream count_stream = rng.derive(kRoleCrmCount);
    const std::uint64_t count = poisson_rv(count_stream, mean);
    const ModelParams& p = kernel.params();
    std::vector<Atom> atoms;
    atoms.reserve(count);
    for (std::uint64_t j = 0; j < count; ++j) {
        RngStream g = rng.derive(kRoleCrmAtom, j);
        Atom a;
        a.theta = y_max * uniform01(g);
        a.omega = (p.family == LevyFamily::ggp) ? sample_ggp_weight(p, eps, g)
                                                : sample_tsb_weight(p, eps, g);
        a.label = static_cast<std::uint32_t>(j + 1);
        atoms.push_back(a);
    }
    return atoms;
}

FeatureAllocation sample_allocation_conditional(const std::vector<Atom>& atoms,
                                                const TimeGrid& grid, std::size_t n,
                                                RngStream rng,
                                                std::vector<std::uint32_t>* source_atom) {
    LabeledRows lab;
    lab.raw.assign(n, {});
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const std::size_t first = grid.first_exposed(atoms[j].theta);
        if (first > n) continue;
        RngStream g = rng.derive(kRoleCond, j);
        const double w = atoms[j].omega;
        for (std::size_t i = first; i <= n; ++i) {
            const double u = uniform01(g);
            const double lam = w * grid.delta(i);
            // p = 1 - e^{-lam} <= lam, so u >= lam is a certain miss.
            if (u >= lam) continue;
            if (u < -std::expm1(-lam)) lab.raw[i - 1].push_back(j);
        }
    }
    return finalize_rows(std::move(lab), n, source_atom);
}

FeatureAllocation sample_allocation_latent_poisson(const std::vector<Atom>& atoms,
                                                   const TimeGrid& grid, std::size_t n,
                                                   RngStream rng,
                                                   std::vector<std::uint32_t>* source_atom) {
    LabeledRows lab;
    lab.raw.assign(n, {});
    std::vector<std::size_t> hit;
    for (std::size_t j = 0; j < atoms.size(); ++j) {
        const std::size_t first = grid.first_exposed(atoms[j].theta);
        if (first > n) continue;
        RngStream g = rng.derive(kRoleLatent, j);
        const double start = grid.T(first - 1);
        const double span = grid.T(n) - start;
        const std::uint64_t events = poisson_rv(g, atoms[j].omega * span);
        hit.clear();
        for (std::uint64_t e = 0; e < events; ++e) {
            const double t = start + span * uniform_open(g);
            // Object i owns latent times in (T_{i-1}, T_i].
            std::size_t i = 1;
            {
                std::size_t lo = first, hi = n;
                while (lo < hi) {
                    std::size_t mid = (lo + hi) / 2;
                    if (grid.T(mid) >= t) hi = mid; else lo = mid + 1;
                }
                i = lo;
            }
            hit.push_back(i);
        }
        std::sort(hit.begin(), hit.end());
        hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
        for (std::size_t i : hit) lab.raw[i - 1].push_back(j);
    }
    return finalize_rows(std::move(lab), n, source_atom);
}

SimResult sample_allocation_sequential(const LevyKernel& kernel, const TimeGrid& grid,
                                       std::size_t n, RngStream rng) {
    const ModelParams& p = kernel.params();
    if (p.family != LevyFamily::ggp) {
        throw std::invalid_argument("sequential sampler requires the ggp family");
    }
    // Birth mass per interval: (Y_i - Y_{i-1}) * psi(T_n - T_{i-1}).
    std::vector<double> cum(n + 1, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        const double gap = grid.Y(i) - grid.Y(i - 1);
        cum[i] = cum[i - 1] +
                 (gap > 0.0 ? gap * kernel.laplace_exponent(grid.T(n) - grid.T(i - 1)) : 0.0);
    }
    const double total = cum[n];
    RngStream count_stream = rng.derive(kRoleSeqCount);
    const std::uint64_t births = poisson_rv(count_stream, total);

    struct Hit {
        std::uint32_t object;
        std::uint32_t feature;
    };
    std::vector<Hit> hits;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> order;  // (birth object, draw index)
    order.reserve(births);

    const double sigma = p.sigma;
    const double zeta = p.zeta;
    for (std::uint64_t f = 0; f < births; ++f) {
        RngStream g = rng.derive(kRoleSeqFeature, f);
        // Interval of the feature's location.
        const double v = total * uniform_open(g);
        const std::size_t piece =
            static_cast<std::size_t>(std::upper_bound(cum.begin() + 1, cum.end(), v) -
                                     cum.begin());
        const std::size_t pi = std::min(piece, n);
        const double a_start = grid.T(pi - 1);
        // Birth time tau on (a_start, T_n): CDF psi(tau - a_start) / psi(T_n - a_start).
        const double tau =
            a_start + kernel.psi_inverse(uniform_open(g) *
                                         kernel.laplace_exponent(grid.T(n) - a_start));
        std::size_t b = pi;
        {
            std::size_t lo = pi, hi = n;
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (grid.T(mid) >= tau) hi = mid; else lo = mid + 1;
            }
            b = lo;
        }
        const std::uint32_t fid = static_cast<std::uint32_t>(f);
        order.emplace_back(static_cast<std::uint32_t>(b), fid);
        hits.push_back({static_cast<std::uint32_t>(b), fid});

        // Jump chain over later objects.  After a hit at object l with
        // accumulated exposure c, survival through object j is
        // ((zeta + c) / (zeta + c + T_j - T_l))^{m - sigma}, so the next hit
        // solves a closed-form threshold on T_j.
        double c = tau - a_start;
        double m = 1.0;
        std::size_t l = b;
        while (l < n) {
            const double a = m - sigma;
            const double u = uniform_open(g);
            const double thresh = (zeta + c) * std::exp(-std::log(u) / a) - (zeta + c - grid.T(l));
            if (!(thresh < grid.T(n))) break;
            std::size_t lo = l + 1, hi = n;
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (grid.T(mid) > thresh) hi = mid; else lo = mid + 1;
            }
            const std::size_t j = lo;
            const double c_pre = c + (grid.T(j - 1) - grid.T(l));
            const double dj = grid.delta(j);
            // Fractional exposure at the hit: density ~ (dj*x + c_pre + zeta)^{sigma - m - 1}.
            const double one_minus_r = -std::expm1(-a * std::log1p(dj / (zeta + c_pre)));
            const double x = (zeta + c_pre) *
                             std::expm1(-std::log1p(-uniform_open(g) * one_minus_r) / a) / dj;
            c = c_pre + dj * x;
            m += 1.0;
            l = j;
            hits.push_back({static_cast<std::uint32_t>(j), fid});
        }
    }

    // Dense labels in order of first activation (ties keep draw order).
    std::sort(order.begin(), order.end());
    std::vector<std::uint32_t> label_of(births, 0);
    for (std::size_t k = 0; k < order.size(); ++k) label_of[order[k].second] = static_cast<std::uint32_t>(k + 1);

    SimResult res;
    res.params = p;
    res.allocation.n_objects = n;
    res.allocation.rows.assign(n, {});
    for (const Hit& h : hits) res.allocation.rows[h.object - 1].push_back(label_of[h.feature]);
    for (auto& row : res.allocation.rows) std::sort(row.begin(), row.end());
    res.allocation.first_object.resize(births);
    for (std::size_t k = 0; k < order.size(); ++k) {
        res.allocation.first_object[k] = order[k].first;
    }
    return res;
}

double new_feature_mean(const LevyKernel& kernel, const TimeGrid& grid,
                        std::size_t n_next) {
    if (n_next == 0) return 0.0;
    double s = 0.0;
    const double tn = grid.T(n_next);
    const double tp = grid.T(n_next - 1);
    for (std::size_t i = 1; i <= n_next; ++i) {
        const double gap = grid.Y(i) - grid.Y(i - 1);
        if (gap <= 0.0) continue;
        const double t0 = grid.T(i - 1);
        const double inner = (i == n_next) ? 0.0 : kernel.laplace_exponent(tp - t0);
        s += gap * (kernel.laplace_exponent(tn - t0) - inner);
    }
    return s;
}

double expected_features(const LevyKernel& kernel, const TimeGrid& grid, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double gap = grid.Y(i) - grid.Y(i - 1);
        if (gap > 0.0) s += gap * kernel.laplace_exponent(grid.T(n) - grid.T(i - 1));
    }
    return s;
}

double expected_features_of_size(const LevyKernel& kernel, const TimeGrid& grid,
                                 std::size_t n, int r) {
    if (r < 1) throw std::invalid_argument("feature size must be >= 1");
    double s = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double gap = grid.Y(i) - grid.Y(i - 1);
        if (gap <= 0.0) continue;
        const double f = grid.T(n) - grid.T(i - 1);
        s += gap * std::exp(kernel.log_tilted_moment(r, f) + r * std::log(f) -
                            std::lgamma(static_cast<double>(r) + 1.0));
    }
    return s;
}

double expected_object_degree(const LevyKernel& kernel, const TimeGrid& grid,
                              std::size_t i) {
    return grid.Y(i) * kernel.laplace_exponent(grid.delta(i));
}

SimResult simulate_dataset(const ModelParams& params, std::size_t n, std::uint64_t seed,
                           SamplerKind kind, double missed_tol, std::size_t atom_budget) {
    params.validate();
    LevyKernel kernel(params);
    TimeGrid grid(params.xi, n);
    RngStream root(seed);
    SimResult res;
    if (kind == SamplerKind::sequential) {
        res = sample_allocation_sequential(kernel, grid, n, root);
    } else {
        const double eps = truncation_eps(kernel, grid, n, missed_tol);
        res.eps = eps;
        std::vector<Atom> atoms =
            sample_crm_truncated(kernel, grid.Y(n), eps, root, atom_budget);
        std::vector<std::uint32_t> source;
        res.allocation =
            (kind == SamplerKind::truncated)
                ? sample_allocation_conditional(atoms, grid, n, root, &source)
                : sample_allocation_latent_poisson(atoms, grid, n, root, &source);
        res.atoms.reserve(source.size());
        for (std::size_t k = 0; k < source.size(); ++k) {
            Atom a = atoms[source[k]];
            a.label = static_cast<std::uint32_t>(k + 1);
            res.atoms.push_back(a);
        }
    }
    res.seed = seed;
    res.params = params;
    return res;
}

}  // namespace nefa
