#include "nefa/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nefa/errors.hpp"
#include "nefa/rng.hpp"
#include "nefa/simulate.hpp"
#include "nefa/stats.hpp"

namespace nefa {

std::vector<double> predict_existing(const LatentState& state, const ModelParams& params,
                                     const TimeGrid& grid, std::size_t n) {
    const double delta_next = TimeGrid::delta_at(params.xi, n + 1);
    (void)grid;
    std::vector<double> p;
    p.reserve(state.features());
    for (std::size_t k = 0; k < state.features(); ++k) {
        const double m = static_cast<double>(state.size_of(k));
        const double rate = delta_next / (params.zeta + state.c[k]);
        p.push_back(-std::expm1((params.sigma - m) * std::log1p(rate)));
    }
    return p;
}

double predict_new_count(const ModelParams& params, const TimeGrid& grid, std::size_t n) {
    LevyKernel kernel(params);
    return new_feature_mean(kernel, grid, n + 1);
}

Forecast forecast_sizes_conditional(const GibbsTrace& trace, const TimeGrid& grid,
                                    std::size_t n_train, std::size_t n_test,
                                    std::size_t replicates, std::uint64_t seed) {
    if (trace.draws.empty()) throw insufficient_data_error("empty posterior trace");
    if (replicates == 0) throw std::invalid_argument("replicates must be >= 1");
    const std::size_t K = trace.sizes.size();
    Forecast fc;
    fc.n_train = n_train;
    fc.n_test = n_test;
    fc.base_sizes = trace.sizes;
    fc.paths.reserve(trace.draws.size() * replicates);
    RngStream root(seed);
    const double t0 = grid.T(n_train);
    const double span = grid.T(n_train + n_test) - t0;
    std::vector<std::uint32_t> offs;
    for (std::size_t d = 0; d < trace.draws.size(); ++d) {
        for (std::size_t r = 0; r < replicates; ++r) {
            std::vector<std::vector<std::uint32_t>> path(K);
            for (std::size_t k = 0; k < K; ++k) {
                RngStream g = root.derive(d, r, k);
                const std::uint64_t events = poisson_rv(g, trace.draws[d].omega[k] * span);
                offs.clear();
                for (std::uint64_t e = 0; e < events; ++e) {
                    const double t = t0 + span * uniform_open(g);
                    // Offset o owns latent times in (T_{n_train+o-1}, T_{n_train+o}].
                    std::size_t lo = n_train + 1, hi = n_train + n_test;
                    while (lo < hi) {
                        const std::size_t mid = (lo + hi) / 2;
                        if (grid.T(mid) >= t) hi = mid; else lo = mid + 1;
                    }
                    offs.push_back(static_cast<std::uint32_t>(lo - n_train));
                }
                std::sort(offs.begin(), offs.end());
                offs.erase(std::unique(offs.begin(), offs.end()), offs.end());
                path[k] = offs;
            }
            fc.paths.push_back(std::move(path));
        }
    }
    return fc;
}

namespace {

// Sum over i = 1..n_test of the squared step difference between two
// cumulative activation paths that share a base size.
double path_sq_error(const std::vector<std::uint32_t>& truth,
                     const std::vector<std::uint32_t>& pred, std::size_t n_test) {
    double sq = 0.0;
    double diff = 0.0;
    std::size_t prev = 1;
    std::size_t a = 0, b = 0;
    while (a < truth.size() || b < pred.size()) {
        const std::size_t o = std::min(a < truth.size() ? truth[a] : n_test + 1,
                                       b < pred.size() ? pred[b] : n_test + 1);
        if (o > n_test) break;
        sq += diff * diff * static_cast<double>(o - prev);
        while (a < truth.size() && truth[a] == o) { diff += 1.0; ++a; }
        while (b < pred.size() && pred[b] == o) { diff -= 1.0; ++b; }
        prev = o;
    }
    sq += diff * diff * static_cast<double>(n_test - prev + 1);
    return sq;
}

}  // namespace

ErrSummary l2_error(const Forecast& forecast, const FeatureAllocation& truth,
                    std::size_t n_train, std::size_t n_test) {
    if (truth.n_objects < n_train + n_test) {
        throw std::invalid_argument("truth allocation shorter than train + test range");
    }
    if (forecast.n_train != n_train || forecast.n_test != n_test) {
        throw std::invalid_argument("forecast range mismatch");
    }
    const std::size_t K = forecast.base_sizes.size();
    // Labels are ordered by first appearance, so training features are
    // exactly labels 1..K.
    std::vector<std::vector<std::uint32_t>> truth_offs(K);
    for (std::size_t i = n_train + 1; i <= n_train + n_test; ++i) {
        for (std::uint32_t lab : truth.rows[i - 1]) {
            if (lab <= K) truth_offs[lab - 1].push_back(static_cast<std::uint32_t>(i - n_train));
        }
    }
    ErrSummary es;
    es.per_path.reserve(forecast.paths.size());
    for (const auto& path : forecast.paths) {
        if (path.size() != K) throw std::invalid_argument("forecast path width mismatch");
        double sq = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            sq += path_sq_error(truth_offs[k], path[k], n_test);
        }
        es.per_path.push_back(sq / static_cast<double>(n_test));
    }
    std::vector<double> sorted = es.per_path;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (double v : sorted) sum += v;
    es.mean = sum / static_cast<double>(sorted.size());
    es.q05 = quantile_sorted(sorted, 0.05);
    es.q95 = quantile_sorted(sorted, 0.95);
    return es;
}

std::vector<ForecastSummaryRow> summarize_forecast(const Forecast& forecast,
                                                   const std::vector<std::size_t>& offsets) {
    std::vector<ForecastSummaryRow> out;
    const std::size_t P = forecast.paths.size();
    if (P == 0) return out;
    std::vector<double> sizes(P);
    for (std::size_t k = 0; k < forecast.base_sizes.size(); ++k) {
        for (std::size_t off : offsets) {
            if (off < 1 || off > forecast.n_test) continue;
            for (std::size_t p = 0; p < P; ++p) {
                const auto& v = forecast.paths[p][k];
                const auto hits = std::upper_bound(v.begin(), v.end(),
                                                   static_cast<std::uint32_t>(off)) -
                                  v.begin();
                sizes[p] = static_cast<double>(forecast.base_sizes[k]) +
                           static_cast<double>(hits);
            }
            std::sort(sizes.begin(), sizes.end());
            double sum = 0.0;
            for (double v : sizes) sum += v;
            out.push_back({static_cast<std::uint32_t>(k + 1),
                           static_cast<std::uint32_t>(off),
                           sum / static_cast<double>(P),
                           quantile_sorted(sizes, 0.05),
                           quantile_sorted(sizes, 0.95)});
        }
    }
    return out;
}

}  // namespace nefa
