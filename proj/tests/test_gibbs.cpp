#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "nefa/gibbs.hpp"
#include "nefa/levy.hpp"
#include "nefa/rng.hpp"
#include "nefa/simulate.hpp"
#include "nefa/time_grid.hpp"

namespace {

nefa::ModelParams ggp(double eta, double sigma, double zeta, double xi = 0.0) {
    nefa::ModelParams p;
    p.family = nefa::LevyFamily::ggp;
    p.eta = eta;
    p.sigma = sigma;
    p.zeta = zeta;
    p.xi = xi;
    return p;
}

template <class Cdf>
double ks_stat(std::vector<double> x, Cdf&& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    }
    return d;
}

// KS acceptance threshold at the 0.5% level.
double ks_crit(std::size_t n) { return 1.731 / std::sqrt(static_cast<double>(n)); }

// One observed feature on a single-object unit grid.
nefa::FeatureAllocation one_cell_alloc() {
    nefa::FeatureAllocation alloc;
    alloc.n_objects = 1;
    alloc.rows = {{1}};
    alloc.first_object = {1};
    return alloc;
}

nefa::LatentState one_feature_state(const nefa::TimeGrid& grid,
                                    std::vector<std::uint32_t> active, double omega,
                                    double theta) {
    nefa::LatentState s;
    s.n_objects = grid.n_max();
    s.active = {std::move(active)};
    s.u = {std::vector<double>(s.active[0].size(), 0.5)};
    s.omega = {omega};
    s.theta = {theta};
    s.first_active = {s.active[0].front()};
    s.y_star = {grid.Y(s.first_active[0])};
    s.defect = {0.0};
    s.c = {0.0};
    double defect = 0.0;
    for (std::size_t a = 0; a < s.active[0].size(); ++a) {
        defect += grid.delta(s.active[0][a]) * 0.5;
    }
    s.defect[0] = defect;
    s.c[0] = grid.exposure(s.n_objects, theta) - defect;
    return s;
}

}  // namespace

TEST_CASE("initial state mirrors the allocation") {
    const auto params = ggp(5.0, 0.4, 1.0, 1.0);
    const auto res = nefa::simulate_dataset(params, 60, 404, nefa::SamplerKind::sequential);
    const nefa::TimeGrid grid(1.0, 60);
    const auto s = nefa::init_state(res.allocation, params, grid, nefa::RngStream(1));

    REQUIRE(s.features() == res.allocation.n_features());
    const auto sizes = res.allocation.sizes();
    for (std::size_t k = 0; k < s.features(); ++k) {
        CHECK(s.size_of(k) == sizes[k]);
        CHECK(s.first_active[k] == res.allocation.first_object[k]);
        CHECK(std::is_sorted(s.active[k].begin(), s.active[k].end()));
        CHECK(s.active[k].front() == s.first_active[k]);
        CHECK(s.y_star[k] == grid.Y(s.first_active[k]));
        CHECK(s.theta[k] > 0.0);
        CHECK(s.theta[k] <= s.y_star[k]);
        CHECK(s.u[k].size() == s.active[k].size());
        for (double u : s.u[k]) CHECK(u == 0.5);
        CHECK(s.c[k] > 0.0);
        CHECK(s.c[k] == doctest::Approx(s.recompute_c(grid, k)).epsilon(1e-12));
    }

    nefa::ModelParams tsb = params;
    tsb.family = nefa::LevyFamily::tsb;
    CHECK_THROWS_AS(nefa::init_state(res.allocation, tsb, grid, nefa::RngStream(1)),
                    std::invalid_argument);
}

TEST_CASE("slack update draws a truncated exponential") {
    // On a unit grid with omega = 1 the conditional of u is exponential with
    // rate 1 restricted to (0,1): mean (1 - 2/e) / (1 - 1/e).
    const nefa::TimeGrid grid(0.0, 1);
    auto s = one_feature_state(grid, {1}, 1.0, 0.5);
    const nefa::RngStream root(21);
    const std::size_t reps = 100000;
    std::vector<double> u;
    u.reserve(reps);
    double sum = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        nefa::sweep_u(s, grid, root.derive(r));
        u.push_back(s.u[0][0]);
        sum += s.u[0][0];
        CHECK(s.c[0] == doctest::Approx(s.u[0][0]).epsilon(1e-12));  // c = u here
    }
    const double want = (1.0 - 2.0 * std::exp(-1.0)) / (1.0 - std::exp(-1.0));
    CHECK(sum / reps == doctest::Approx(want).epsilon(0.01));
    const double denom = 1.0 - std::exp(-1.0);
    CHECK(ks_stat(u, [&](double x) { return -std::expm1(-x) / denom; }) < ks_crit(reps));
}

TEST_CASE("weight update draws the tilted gamma conditional") {
    // m = 3 active cells, sigma = 1/2, zeta + c = 2: Gamma(5/2, 2).
    const nefa::TimeGrid grid(0.0, 3);
    auto s = one_feature_state(grid, {1, 2, 3}, 1.0, 0.5);
    s.c[0] = 1.0;
    const auto params = ggp(2.0, 0.5, 1.0);
    const nefa::RngStream root(22);
    const std::size_t reps = 100000;
    std::vector<double> w;
    w.reserve(reps);
    double sum = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        nefa::sweep_omega(s, params, root.derive(r));
        w.push_back(s.omega[0]);
        sum += s.omega[0];
        sq += s.omega[0] * s.omega[0];
    }
    const double mean = sum / reps;
    CHECK(mean == doctest::Approx(1.25).epsilon(0.01));
    CHECK(sq / reps - mean * mean == doctest::Approx(0.625).epsilon(0.03));
    CHECK(ks_stat(w, [](double x) { return boost::math::gamma_p(2.5, 2.0 * x); }) <
          ks_crit(reps));
}

TEST_CASE("location update lands in grid pieces by exposure weight") {
    // xi = 1, n = 3: theta for a feature first active at object 3 lives on
    // (0, sqrt 3]; piece i has probability proportional to
    // (Y_i - Y_{i-1}) exp(omega T_{i-1}), uniform within the piece.
    const nefa::TimeGrid grid(1.0, 3);
    const std::size_t reps = 30000;
    // omega = 0.5 stays on the uniform-rejection path, omega = 4 on the
    // top-down categorical path; the law is the same.
    for (const double omega : {0.5, 4.0}) {
        CAPTURE(omega);
        double p[3], total = 0.0;
        for (int i = 1; i <= 3; ++i) {
            p[i - 1] = (grid.Y(i) - grid.Y(i - 1)) * std::exp(omega * grid.T(i - 1));
            total += p[i - 1];
        }
        for (double& v : p) v /= total;

        auto s = one_feature_state(grid, {3}, omega, 0.5);
        const nefa::RngStream root(23);
        std::size_t counts[3] = {0, 0, 0};
        std::vector<double> within;
        within.reserve(reps);
        for (std::size_t r = 0; r < reps; ++r) {
            nefa::sweep_theta(s, grid, root.derive(r, omega < 1.0 ? 0 : 1));
            const double th = s.theta[0];
            CHECK(th > 0.0);
            CHECK(th <= s.y_star[0]);
            int piece = th <= grid.Y(1) ? 0 : (th <= grid.Y(2) ? 1 : 2);
            ++counts[piece];
            within.push_back((th - grid.Y(piece)) / (grid.Y(piece + 1) - grid.Y(piece)));
            CHECK(s.c[0] == doctest::Approx(s.recompute_c(grid, 0)).epsilon(1e-12));
        }
        double chi2 = 0.0;
        for (int i = 0; i < 3; ++i) {
            const double expect = p[i] * static_cast<double>(reps);
            chi2 += (counts[i] - expect) * (counts[i] - expect) / expect;
        }
        CHECK(chi2 < boost::math::quantile(boost::math::chi_squared(2), 0.9975));
        // Conditional on the piece, the location is uniform inside it.
        CHECK(ks_stat(within, [](double x) { return x; }) < ks_crit(reps));
    }
    // A plateau grid collapses the law to uniform on (0, Y*).
    const nefa::TimeGrid flat(0.0, 3);
    auto s = one_feature_state(flat, {3}, 6.0, 0.5);
    const nefa::RngStream root(24);
    std::vector<double> th;
    th.reserve(20000);
    for (std::size_t r = 0; r < 20000; ++r) {
        nefa::sweep_theta(s, flat, root.derive(r));
        th.push_back(s.theta[0]);
    }
    CHECK(ks_stat(th, [](double x) { return x; }) < ks_crit(20000));
}

TEST_CASE("gibbs pair is stationary for the exact augmented posterior") {
    // One active cell on a unit grid, sigma = 1/2, zeta = 1: integrating the
    // weight out of the augmented density leaves the slack marginal
    // proportional to (1 + u)^{-1/2} on (0,1), so
    //   F(u) = (sqrt(1+u) - 1) / (sqrt 2 - 1),  E[u] = sqrt(2)/3,
    // and the weight marginal has mean 1 / (2 sqrt 2).  The location is
    // independent and uniform.  Independent short chains from the
    // deterministic init must reproduce all three.
    const auto params = ggp(2.0, 0.5, 1.0);
    const nefa::TimeGrid grid(0.0, 1);
    const auto alloc = one_cell_alloc();
    const nefa::RngStream root(909);
    const std::size_t chains = 2000, sweeps = 25;
    std::vector<double> u, w, th;
    for (std::size_t ch = 0; ch < chains; ++ch) {
        auto s = nefa::init_state(alloc, params, grid, root.derive(ch, 0));
        for (std::size_t sw = 1; sw <= sweeps; ++sw) {
            nefa::sweep_u(s, grid, root.derive(ch, sw, 1));
            nefa::sweep_omega(s, params, root.derive(ch, sw, 2));
            nefa::sweep_theta(s, grid, root.derive(ch, sw, 3));
        }
        u.push_back(s.u[0][0]);
        w.push_back(s.omega[0]);
        th.push_back(s.theta[0]);
    }
    const double mean_u = std::accumulate(u.begin(), u.end(), 0.0) / chains;
    const double mean_w = std::accumulate(w.begin(), w.end(), 0.0) / chains;
    CHECK(mean_u == doctest::Approx(std::sqrt(2.0) / 3.0).epsilon(0.03));
    CHECK(mean_w == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(0.08));
    const double z = std::sqrt(2.0) - 1.0;
    CHECK(ks_stat(u, [&](double x) { return (std::sqrt(1.0 + x) - 1.0) / z; }) <
          ks_crit(chains));
    CHECK(ks_stat(th, [](double x) { return x; }) < ks_crit(chains));
}

TEST_CASE("augmented log marginal assembles exposure, grid, and moment terms") {
    const auto params = ggp(2.0, 0.5, 1.0);
    const nefa::LevyKernel kernel(params);

    // No features: minus the expected feature count.
    nefa::FeatureAllocation empty;
    empty.n_objects = 1;
    empty.rows.assign(1, {});
    const nefa::TimeGrid g1(0.0, 1);
    const auto s0 = nefa::init_state(empty, params, g1, nefa::RngStream(3));
    const double psi1 = 4.0 * (std::sqrt(2.0) - 1.0);
    CHECK(nefa::log_marginal_augmented(s0, kernel, g1) ==
          doctest::Approx(-psi1).epsilon(1e-12));

    // Plateau grid over two objects: the only positive gap spans psi(2);
    // unit deltas contribute nothing and the feature adds its size-2 moment.
    nefa::FeatureAllocation alloc;
    alloc.n_objects = 2;
    alloc.rows = {{1}, {1}};
    alloc.first_object = {1};
    const nefa::TimeGrid g2(0.0, 2);
    const auto s = nefa::init_state(alloc, params, g2, nefa::RngStream(4));
    const double want =
        -kernel.laplace_exponent(2.0) + kernel.log_tilted_moment(2, s.c[0]);
    CHECK(nefa::log_marginal_augmented(s, kernel, g2) ==
          doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("full runs are reproducible and cache exposures consistently") {
    const auto params = ggp(4.0, 0.3, 1.5, 1.0);
    const auto res = nefa::simulate_dataset(params, 40, 701, nefa::SamplerKind::sequential);
    const nefa::TimeGrid grid(1.0, 40);

    const auto t1 = nefa::run_gibbs(res.allocation, params, grid, 60, 40, 4, 99);
    const auto t2 = nefa::run_gibbs(res.allocation, params, grid, 60, 40, 4, 99);
    const auto t3 = nefa::run_gibbs(res.allocation, params, grid, 60, 40, 4, 100);
    CHECK(t1.log_marginal == t2.log_marginal);
    CHECK(t1.log_marginal != t3.log_marginal);
    REQUIRE(t1.draws.size() == 5);  // sweeps 41, 45, 49, 53, 57
    CHECK(t2.draws.size() == 5);
    for (std::size_t d = 0; d < t1.draws.size(); ++d) {
        CHECK(t1.draws[d].sweep == 41 + 4 * d);
        CHECK(t1.draws[d].omega == t2.draws[d].omega);
        CHECK(t1.draws[d].theta == t2.draws[d].theta);
        CHECK(t1.draws[d].c == t2.draws[d].c);
    }
    CHECK(t1.sizes == res.allocation.sizes());
    for (double lp : t1.log_marginal) CHECK(std::isfinite(lp));
    CHECK(nefa::run_gibbs(res.allocation, params, grid, 30, 30, 1, 5).draws.empty());
    CHECK_THROWS_AS(nefa::run_gibbs(res.allocation, params, grid, 10, 11, 1, 5),
                    std::invalid_argument);
    CHECK_THROWS_AS(nefa::run_gibbs(res.allocation, params, grid, 10, 0, 0, 5),
                    std::invalid_argument);

    // The cached exposure sums track the definition through full sweeps.
    const nefa::RngStream root(31);
    auto s = nefa::init_state(res.allocation, params, grid, root.derive(0));
    for (std::size_t sw = 1; sw <= 5; ++sw) {
        nefa::sweep_u(s, grid, root.derive(sw, 1));
        nefa::sweep_omega(s, params, root.derive(sw, 2));
        nefa::sweep_theta(s, grid, root.derive(sw, 3));
        for (std::size_t k = 0; k < s.features(); ++k) {
            CHECK(s.c[k] == doctest::Approx(s.recompute_c(grid, k)).epsilon(1e-9));
            CHECK(s.theta[k] > 0.0);
            CHECK(s.theta[k] <= s.y_star[k]);
            CHECK(s.omega[k] > 0.0);
            for (double uu : s.u[k]) {
                CHECK(uu > 0.0);
                CHECK(uu < 1.0);
            }
        }
    }
}
