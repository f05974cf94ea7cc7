#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "nefa/allocation.hpp"
#include "nefa/ibp.hpp"
#include "nefa/rng.hpp"

namespace {

double log_poisson_pmf(std::size_t k, double lambda) {
    return static_cast<double>(k) * std::log(lambda) - lambda -
           std::lgamma(static_cast<double>(k) + 1.0);
}

double ibp_lambda(const nefa::IbpParams& p, std::size_t i) {
    return nefa::ibp_new_mean(p, i - 1);
}

// Representative two-object allocation: a features in object 1 only, s
// shared, b in object 2 only.
nefa::FeatureAllocation two_object_alloc(int a, int s, int b) {
    nefa::FeatureAllocation alloc;
    alloc.n_objects = 2;
    alloc.rows.assign(2, {});
    for (int k = 0; k < a + s; ++k) {
        alloc.rows[0].push_back(static_cast<std::uint32_t>(k + 1));
        alloc.first_object.push_back(1);
    }
    for (int k = 0; k < s; ++k) alloc.rows[1].push_back(static_cast<std::uint32_t>(k + 1));
    for (int k = 0; k < b; ++k) {
        alloc.rows[1].push_back(static_cast<std::uint32_t>(a + s + k + 1));
        alloc.first_object.push_back(2);
    }
    return alloc;
}

// Sequential factorization computed the slow way: one Bernoulli factor per
// feature and object after birth, one Poisson factor per object.
double naive_loglik(const nefa::FeatureAllocation& a, const nefa::IbpParams& p) {
    const std::size_t n = a.n_objects;
    const std::size_t K = a.n_features();
    std::vector<std::uint32_t> counts(K, 0);
    std::vector<char> active(K, 0);
    double ll = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        std::fill(active.begin(), active.end(), 0);
        for (std::uint32_t lab : a.rows[i - 1]) active[lab - 1] = 1;
        const double denom = static_cast<double>(i - 1) + p.zeta - p.sigma;
        std::size_t births = 0;
        for (std::size_t k = 0; k < K; ++k) {
            if (a.first_object[k] == i) {
                ++births;
                ++counts[k];
                continue;
            }
            if (a.first_object[k] > i) continue;
            const double q = (static_cast<double>(counts[k]) - p.sigma) / denom;
            ll += active[k] ? std::log(q) : std::log1p(-q);
            counts[k] += active[k];
        }
        ll += log_poisson_pmf(births, ibp_lambda(p, i));
    }
    return ll;
}

double poisson_chi2(const std::vector<std::uint64_t>& hist, double lambda,
                    std::uint64_t reps, int& df) {
    const double n = static_cast<double>(reps);
    std::vector<double> expected;
    double pmf = std::exp(-lambda);
    double tail = 1.0;  // P(X >= r) before bin r is split off
    int r = 0;
    while ((tail - pmf) * n >= 5.0 && r < 10000) {
        expected.push_back(pmf * n);
        tail -= pmf;
        ++r;
        pmf *= lambda / r;
    }
    expected.push_back(tail * n);
    while (expected.size() > 1 && expected[expected.size() - 2] < 5.0) {
        expected[expected.size() - 2] += expected.back();
        expected.pop_back();
    }
    std::vector<double> observed(expected.size(), 0.0);
    for (std::size_t c = 0; c < hist.size(); ++c) {
        observed[std::min(c, expected.size() - 1)] += static_cast<double>(hist[c]);
    }
    double chi2 = 0.0;
    for (std::size_t b = 0; b < expected.size(); ++b) {
        const double diff = observed[b] - expected[b];
        chi2 += diff * diff / expected[b];
    }
    df = static_cast<int>(expected.size()) - 1;
    return chi2;
}

void check_poisson_gof(const std::vector<std::uint64_t>& hist, double lambda,
                       std::uint64_t reps) {
    int df = 0;
    const double chi2 = poisson_chi2(hist, lambda, reps, df);
    const double crit = boost::math::quantile(boost::math::chi_squared(df), 0.9975);
    INFO("lambda=", lambda, " chi2=", chi2, " df=", df, " crit=", crit);
    CHECK(chi2 < crit);
}

}  // namespace

TEST_CASE("baseline parameter validation and step probabilities") {
    CHECK_THROWS_AS((nefa::IbpParams{0.0, 0.5, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((nefa::IbpParams{1.0, -0.1, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((nefa::IbpParams{1.0, 1.0, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((nefa::IbpParams{1.0, 0.5, 0.0}.validate()), std::invalid_argument);
    nefa::IbpParams{1.0, 0.0, 1.0}.validate();

    // sigma = 0, zeta = 1 collapses the new-feature mean to eta / (n + 1).
    const nefa::IbpParams classic{2.5, 0.0, 1.0};
    for (std::size_t n : {0, 1, 5, 100}) {
        CHECK(nefa::ibp_new_mean(classic, n) ==
              doctest::Approx(2.5 / static_cast<double>(n + 1)).epsilon(1e-12));
    }
    const nefa::IbpParams p{1.0, 0.3, 1.0};
    CHECK(nefa::ibp_new_mean(p, 0) ==
          doctest::Approx(1.0 / std::tgamma(1.7)).epsilon(1e-12));
    CHECK(nefa::ibp_new_mean(p, 3) ==
          doctest::Approx(std::exp(std::lgamma(4.0) - std::lgamma(4.7))).epsilon(1e-12));

    const nefa::IbpParams q{1.0, 0.3, 2.0};
    std::vector<double> existing;
    double new_mean = 0.0;
    nefa::ibp_step_probs({3, 1}, 5, q, &existing, &new_mean);
    REQUIRE(existing.size() == 2);
    CHECK(existing[0] == doctest::Approx(2.7 / 6.7).epsilon(1e-14));
    CHECK(existing[1] == doctest::Approx(0.7 / 6.7).epsilon(1e-14));
    CHECK(new_mean == doctest::Approx(nefa::ibp_new_mean(q, 5)));
    nefa::ibp_step_probs({3, 1}, 5, q, nullptr, nullptr);  // sinks optional
}

TEST_CASE("two-object likelihood factorizes into the closed product law") {
    // For n = 2 the probability of a pattern with a singletons in object 1,
    // s shared features, and b singletons in object 2 is
    //   Poisson(a+s; lam1) * C(a+s,s) p^s (1-p)^a * Poisson(b; lam2),
    // p = (1-sigma)/(1+zeta-sigma).  Each of the C(a+s,s) label choices is a
    // distinct allocation with equal probability, so exp(loglik) of any
    // representative must equal the product without the binomial coefficient.
    for (const auto& p : {nefa::IbpParams{1.3, 0.3, 1.0}, nefa::IbpParams{0.7, 0.0, 2.5}}) {
        const double lam1 = ibp_lambda(p, 1);
        const double lam2 = ibp_lambda(p, 2);
        const double ps = (1.0 - p.sigma) / (1.0 + p.zeta - p.sigma);
        double total = 0.0;
        for (int a = 0; a <= 6; ++a) {
            for (int s = 0; s <= 6; ++s) {
                for (int b = 0; b <= 6; ++b) {
                    const auto alloc = two_object_alloc(a, s, b);
                    alloc.validate();
                    const double ll = nefa::ibp_loglik(alloc, p);
                    const double expect = log_poisson_pmf(a + s, lam1) +
                                          s * std::log(ps) + a * std::log1p(-ps) +
                                          log_poisson_pmf(b, lam2);
                    INFO("a=", a, " s=", s, " b=", b);
                    CHECK(ll == doctest::Approx(expect).epsilon(1e-12));
                    const double choose = std::exp(std::lgamma(a + s + 1.0) -
                                                   std::lgamma(s + 1.0) - std::lgamma(a + 1.0));
                    total += choose * std::exp(ll);
                }
            }
        }
        CHECK(total > 0.999);
        CHECK(total <= 1.0 + 1e-12);
    }
}

TEST_CASE("closed-form likelihood matches the naive sequential oracle") {
    const nefa::IbpParams truth{1.5, 0.25, 2.0};
    const auto alloc = nefa::ibp_simulate(truth, 40, nefa::RngStream(123));
    alloc.validate();
    REQUIRE(alloc.n_features() >= 8);
    // At the generating parameters and at misspecified ones.
    for (const auto& p : {truth, nefa::IbpParams{0.6, 0.55, 3.0},
                          nefa::IbpParams{2.0, 0.0, 1.0}}) {
        CHECK(nefa::ibp_loglik(alloc, p) ==
              doctest::Approx(naive_loglik(alloc, p)).epsilon(1e-9));
    }
}

TEST_CASE("likelihood is invariant to feature relabeling") {
    const nefa::IbpParams p{1.5, 0.25, 2.0};
    const auto alloc = nefa::ibp_simulate(p, 30, nefa::RngStream(8));
    const std::uint64_t top = alloc.n_features() + 1;
    std::vector<std::vector<std::uint64_t>> raw(alloc.rows.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (std::uint32_t lab : alloc.rows[i]) raw[i].push_back(top - lab);
    }
    const auto relabeled = nefa::relabel_rows(raw);
    relabeled.validate();
    CHECK(nefa::ibp_loglik(alloc, p) ==
          doctest::Approx(nefa::ibp_loglik(relabeled, p)).epsilon(1e-12));
}

TEST_CASE("simulation matches its own marginals") {
    SUBCASE("prefix property and determinism") {
        const nefa::IbpParams p{1.5, 0.4, 1.0};
        const auto a5 = nefa::ibp_simulate(p, 5, nefa::RngStream(42));
        const auto a3 = nefa::ibp_simulate(p, 3, nefa::RngStream(42));
        a5.validate();
        a3.validate();
        for (std::size_t i = 0; i < 3; ++i) CHECK(a5.rows[i] == a3.rows[i]);
        REQUIRE(a3.n_features() <= a5.n_features());
        for (std::size_t k = 0; k < a3.n_features(); ++k) {
            CHECK(a5.first_object[k] == a3.first_object[k]);
        }
        const auto b5 = nefa::ibp_simulate(p, 5, nefa::RngStream(43));
        CHECK(a5.rows != b5.rows);
        CHECK(nefa::ibp_simulate(p, 0, nefa::RngStream(1)).n_features() == 0);
    }
    SUBCASE("first-object feature count is Poisson") {
        const nefa::IbpParams p{1.2, 0.4, 0.7};
        const double lam1 = ibp_lambda(p, 1);
        CHECK(lam1 == doctest::Approx(std::exp(std::log(1.2) + std::lgamma(0.7) -
                                               std::lgamma(1.3))).epsilon(1e-12));
        const std::uint64_t reps = 20000;
        const nefa::RngStream root(501);
        std::vector<std::uint64_t> hist;
        for (std::uint64_t r = 0; r < reps; ++r) {
            const auto a = nefa::ibp_simulate(p, 1, root.derive(r));
            const std::size_t k = a.rows[0].size();
            if (k >= hist.size()) hist.resize(k + 1, 0);
            ++hist[k];
        }
        check_poisson_gof(hist, lam1, reps);
    }
    SUBCASE("expected totals accumulate the new-feature means") {
        // K_n is a sum of independent Poisson counts, so its mean and
        // variance both equal sum_i lambda_i; sigma = 0, zeta = 1 makes that
        // eta * H_n.
        const nefa::IbpParams p{2.0, 0.0, 1.0};
        double hn = 0.0;
        for (int i = 1; i <= 50; ++i) hn += 1.0 / i;
        const double want = 2.0 * hn;
        const std::uint64_t reps = 4000;
        const nefa::RngStream root(502);
        double sum = 0.0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            sum += static_cast<double>(nefa::ibp_simulate(p, 50, root.derive(r)).n_features());
        }
        const double mean = sum / static_cast<double>(reps);
        CHECK(std::fabs(mean - want) < 4.0 * std::sqrt(want / static_cast<double>(reps)));

        const nefa::IbpParams q{1.3, 0.6, 0.4};
        double lam_sum = 0.0;
        for (std::size_t i = 1; i <= 30; ++i) lam_sum += ibp_lambda(q, i);
        double sum_q = 0.0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            sum_q += static_cast<double>(nefa::ibp_simulate(q, 30, root.derive(1, r)).n_features());
        }
        const double mean_q = sum_q / static_cast<double>(reps);
        CHECK(std::fabs(mean_q - lam_sum) <
              4.0 * std::sqrt(lam_sum / static_cast<double>(reps)));
    }
    SUBCASE("two-object pattern frequencies match the product law") {
        const nefa::IbpParams p{1.0, 0.3, 1.0};
        const double lam1 = ibp_lambda(p, 1);
        const double lam2 = ibp_lambda(p, 2);
        const double ps = (1.0 - p.sigma) / (1.0 + p.zeta - p.sigma);
        const std::uint64_t reps = 200000;
        const nefa::RngStream root(503);
        std::array<std::uint64_t, 343> hist{};
        std::uint64_t other = 0;
        for (std::uint64_t r = 0; r < reps; ++r) {
            const auto alloc = nefa::ibp_simulate(p, 2, root.derive(r));
            int s = 0, b = 0;
            for (std::uint32_t lab : alloc.rows[1]) {
                (alloc.first_object[lab - 1] == 1 ? s : b) += 1;
            }
            const int a = static_cast<int>(alloc.rows[0].size()) - s;
            if (a > 6 || s > 6 || b > 6) {
                ++other;
            } else {
                ++hist[static_cast<std::size_t>((a * 7 + s) * 7 + b)];
            }
        }
        double tv = 0.0;
        double covered = 0.0;
        for (int a = 0; a <= 6; ++a) {
            for (int s = 0; s <= 6; ++s) {
                const double head = log_poisson_pmf(a + s, lam1) + s * std::log(ps) +
                                    a * std::log1p(-ps) +
                                    std::lgamma(a + s + 1.0) - std::lgamma(s + 1.0) -
                                    std::lgamma(a + 1.0);
                for (int b = 0; b <= 6; ++b) {
                    const double prob = std::exp(head + log_poisson_pmf(b, lam2));
                    covered += prob;
                    const double emp =
                        static_cast<double>(hist[static_cast<std::size_t>((a * 7 + s) * 7 + b)]) /
                        static_cast<double>(reps);
                    tv += std::fabs(emp - prob);
                }
            }
        }
        tv += std::fabs(static_cast<double>(other) / static_cast<double>(reps) -
                        (1.0 - covered));
        CHECK(0.5 * tv < 0.015);
    }
}

TEST_CASE("maximum likelihood fit recovers simulated parameters") {
    const nefa::IbpParams truth{3.0, 0.4, 1.5};
    for (std::uint64_t seed : {2024, 7}) {
        const auto alloc = nefa::ibp_simulate(truth, 400, nefa::RngStream(seed));
        const auto fit = nefa::ibp_mle(alloc);
        INFO("seed=", seed, " eta=", fit.params.eta, " sigma=", fit.params.sigma,
             " zeta=", fit.params.zeta);
        CHECK(fit.converged);
        CHECK(fit.loglik >= nefa::ibp_loglik(alloc, truth) - 1e-6);
        CHECK(fit.loglik == doctest::Approx(nefa::ibp_loglik(alloc, fit.params)));
        CHECK(fit.params.eta > 1.2);
        CHECK(fit.params.eta < 6.5);
        CHECK(fit.params.sigma > 0.22);
        CHECK(fit.params.sigma < 0.62);
        CHECK(fit.params.zeta > 0.25);
        CHECK(fit.params.zeta < 4.0);
    }
    // One-parameter classic regime: sigma pushes to its boundary.
    const nefa::IbpParams classic{2.0, 0.0, 1.0};
    const auto alloc = nefa::ibp_simulate(classic, 400, nefa::RngStream(5));
    const auto fit = nefa::ibp_mle(alloc);
    CHECK(fit.loglik >= nefa::ibp_loglik(alloc, classic) - 1e-6);
    CHECK(fit.params.sigma < 0.05);
    CHECK(fit.params.eta > 1.5);
    CHECK(fit.params.eta < 3.5);

    CHECK_THROWS_AS(nefa::ibp_mle(nefa::FeatureAllocation{}), std::invalid_argument);
}

TEST_CASE("forecast paths follow the recurrence law") {
    // Two training features of size 9 and 4 over 10 objects.
    nefa::FeatureAllocation train;
    train.n_objects = 10;
    train.rows.assign(10, {});
    for (std::size_t i = 0; i < 9; ++i) train.rows[i].push_back(1);
    for (std::size_t i = 0; i < 4; ++i) train.rows[i].push_back(2);
    train.first_object = {1, 1};
    train.validate();
    const nefa::IbpParams p{1.0, 0.3, 2.0};

    SUBCASE("one-step hit rates") {
        const std::size_t paths = 30000;
        const auto fc = nefa::ibp_forecast(train, p, 1, paths, 11);
        CHECK(fc.n_train == 10);
        CHECK(fc.n_test == 1);
        REQUIRE(fc.base_sizes == train.sizes());
        REQUIRE(fc.paths.size() == paths);
        double hits1 = 0.0, hits2 = 0.0;
        for (const auto& path : fc.paths) {
            REQUIRE(path.size() == 2);
            hits1 += !path[0].empty();
            hits2 += !path[1].empty();
        }
        const double d = 10.0 + p.zeta - p.sigma;
        CHECK(hits1 / paths == doctest::Approx((9.0 - 0.3) / d).epsilon(0.016));
        CHECK(hits2 / paths == doctest::Approx((4.0 - 0.3) / d).epsilon(0.04));
    }
    SUBCASE("two-step expected growth chains the one-step means") {
        const std::size_t paths = 30000;
        const auto fc = nefa::ibp_forecast(train, p, 2, paths, 12);
        double total = 0.0;
        for (const auto& path : fc.paths) {
            for (std::uint32_t off : path[0]) {
                CHECK(off >= 1);
                CHECK(off <= 2);
            }
            CHECK(std::is_sorted(path[0].begin(), path[0].end()));
            total += static_cast<double>(path[0].size());
        }
        const double e1 = (9.0 - 0.3) / (10.0 + 2.0 - 0.3);
        const double e2 = (9.0 + e1 - 0.3) / (11.0 + 2.0 - 0.3);
        CHECK(total / paths == doctest::Approx(e1 + e2).epsilon(0.015));
    }
    SUBCASE("determinism and edge cases") {
        const auto a = nefa::ibp_forecast(train, p, 3, 50, 77);
        const auto b = nefa::ibp_forecast(train, p, 3, 50, 77);
        const auto c = nefa::ibp_forecast(train, p, 3, 50, 78);
        CHECK(a.paths == b.paths);
        CHECK(a.paths != c.paths);
        const auto empty_range = nefa::ibp_forecast(train, p, 0, 10, 1);
        for (const auto& path : empty_range.paths) {
            for (const auto& feature : path) CHECK(feature.empty());
        }
        CHECK_THROWS_AS((nefa::ibp_forecast(train, nefa::IbpParams{1.0, 1.2, 1.0}, 1, 10, 1)),
                        std::invalid_argument);
    }
}
