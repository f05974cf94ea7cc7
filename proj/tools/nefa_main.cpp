#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "nefa/allocation.hpp"
#include "nefa/errors.hpp"
#include "nefa/estimators.hpp"
#include "nefa/gibbs.hpp"
#include "nefa/ibp.hpp"
#include "nefa/io.hpp"
#include "nefa/levy.hpp"
#include "nefa/params.hpp"
#include "nefa/predictive.hpp"
#include "nefa/simulate.hpp"
#include "nefa/stats.hpp"
#include "nefa/time_grid.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::uint64_t seed = 1;
    std::string out = ".";
    unsigned threads = 0;
    std::string config;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "random seed (runs are pure functions of inputs + seed)");
    app->add_option("--out", c.out, "output directory");
    app->add_option("--threads", c.threads,
                    "worker cap; reserved, results never depend on it");
    app->add_option("--config", c.config, "flat key=value defaults; command line wins");
}

// CLI11 auto-reads config files only on the root command, so the
// per-subcommand --config is applied by hand: each key fills its matching
// option unless the command line already set it.  Unknown keys are skipped,
// which lets an estimate record serve directly as a config.
void apply_config(CLI::App* app, const std::string& path) {
    if (path.empty()) return;
    const nefa::KvRecord kv = nefa::read_kv_file(path);
    for (const auto& [key, value] : kv.items) {
        CLI::Option* op = app->get_option_no_throw("--" + key);
        if (op == nullptr || op->count() > 0) continue;
        op->add_result(value);
        op->run_callback();
    }
}

std::string out_path(const Common& c, const std::string& name) {
    std::filesystem::create_directories(c.out);
    return (std::filesystem::path(c.out) / name).string();
}

void base_manifest(nefa::KvRecord& kv, const std::string& command, const Common& c) {
    kv.set("version", kVersion);
    kv.set("command", command);
    kv.set_int("seed", static_cast<long long>(c.seed));
}

struct ParamFlags {
    double eta = NAN, sigma = NAN, xi = NAN, zeta = NAN;
    void add(CLI::App* app) {
        app->add_option("--eta", eta, "mass scale > 0");
        app->add_option("--sigma", sigma, "tail index < 1");
        app->add_option("--xi", xi, "grid slowdown exponent >= 0");
        app->add_option("--zeta", zeta, "exponential tilt > 0");
    }
    bool complete() const {
        return !std::isnan(eta) && !std::isnan(sigma) && !std::isnan(xi) && !std::isnan(zeta);
    }
};

// Fill unspecified parameters from the moment estimators; explicit flags win
// field-wise.
nefa::ModelParams resolve_params(const ParamFlags& f, const nefa::AllocationStats& stats,
                                 std::size_t n, bool* estimated) {
    nefa::ModelParams p;
    *estimated = !f.complete();
    if (*estimated) {
        const nefa::HyperEstimate h = nefa::estimate_all(stats, n);
        p.eta = h.eta_hat;
        p.sigma = h.sigma_hat;
        p.xi = h.xi_hat;
        p.zeta = h.zeta_hat;
    }
    if (!std::isnan(f.eta)) p.eta = f.eta;
    if (!std::isnan(f.sigma)) p.sigma = f.sigma;
    if (!std::isnan(f.xi)) p.xi = f.xi;
    if (!std::isnan(f.zeta)) p.zeta = f.zeta;
    p.validate();
    return p;
}

void put_params(nefa::KvRecord& kv, const nefa::ModelParams& p) {
    kv.set("family", nefa::family_name(p.family));
    kv.set_real("eta", p.eta);
    kv.set_real("sigma", p.sigma);
    kv.set_real("xi", p.xi);
    kv.set_real("zeta", p.zeta);
}

int cmd_simulate(const Common& c, const ParamFlags& pf, const std::string& family,
                 std::size_t n, const std::string& sampler, double missed_tol,
                 std::size_t atom_budget) {
    // Required inputs are validated after the config merge, not by the parser,
    // so a config file can supply them.
    if (n == 0) throw std::invalid_argument("need --n >= 1");
    nefa::ModelParams p;
    p.eta = std::isnan(pf.eta) ? 1.0 : pf.eta;
    p.sigma = std::isnan(pf.sigma) ? 0.5 : pf.sigma;
    p.xi = std::isnan(pf.xi) ? 0.0 : pf.xi;
    p.zeta = std::isnan(pf.zeta) ? 1.0 : pf.zeta;
    p.family = nefa::family_from_name(family);
    p.validate();
    nefa::SamplerKind kind;
    if (sampler == "sequential") kind = nefa::SamplerKind::sequential;
    else if (sampler == "truncated") kind = nefa::SamplerKind::truncated;
    else if (sampler == "latent") kind = nefa::SamplerKind::latent;
    else throw std::invalid_argument("unknown sampler: " + sampler);

    const nefa::SimResult r = nefa::simulate_dataset(p, n, c.seed, kind, missed_tol, atom_budget);
    nefa::write_dataset_file(out_path(c, "dataset.txt"), nefa::to_dataset(r.allocation));
    if (!r.atoms.empty()) {
        nefa::CsvWriter atoms(out_path(c, "atoms.csv"), {"label", "omega", "theta"});
        for (const nefa::Atom& a : r.atoms) {
            atoms.row({std::to_string(a.label), nefa::format_real(a.omega),
                       nefa::format_real(a.theta)});
        }
    }
    const nefa::AllocationStats stats = nefa::compute_stats(r.allocation);
    nefa::KvRecord kv;
    base_manifest(kv, "simulate", c);
    put_params(kv, p);
    kv.set_int("n", static_cast<long long>(n));
    kv.set("sampler", sampler);
    if (kind != nefa::SamplerKind::sequential) {
        kv.set_real("missed_tol", missed_tol);
        kv.set_real("eps", r.eps);
        kv.set_int("atoms", static_cast<long long>(r.atoms.size()));
    }
    kv.set_int("features", static_cast<long long>(stats.n_features));
    kv.set_int("total_size", static_cast<long long>(stats.total_size));
    nefa::write_kv_file(out_path(c, "simulate_manifest.txt"), kv);
    return 0;
}

int cmd_estimate(const Common& c, const std::string& data) {
    if (data.empty()) throw std::invalid_argument("need --data");
    const nefa::Dataset ds = nefa::read_dataset_file(data);
    const nefa::FeatureAllocation alloc = nefa::to_allocation(ds);
    const nefa::AllocationStats stats = nefa::compute_stats(alloc);
    const nefa::HyperEstimate h = nefa::estimate_all(stats, ds.n());
    nefa::KvRecord kv;
    // Canonical keys first so the record can be fed back via --config.
    kv.set_real("eta", h.eta_hat);
    kv.set_real("sigma", h.sigma_hat);
    kv.set_real("xi", h.xi_hat);
    kv.set_real("zeta", h.zeta_hat);
    kv.set_int("n", static_cast<long long>(h.n));
    kv.set_int("features", static_cast<long long>(h.features));
    kv.set_int("singletons", static_cast<long long>(h.singletons));
    kv.set_int("total_size", static_cast<long long>(h.total_size));
    kv.set_int("max_size", static_cast<long long>(h.max_size));
    kv.set_real("xi_raw", h.xi_raw);
    kv.set_int("sigma_small_branch", h.sigma_small_branch ? 1 : 0);
    kv.set_int("sigma_clamped", h.sigma_clamped ? 1 : 0);
    kv.set_real("eta_alt", h.eta_alt);
    kv.set_real("zeta_alt", h.zeta_alt);
    nefa::write_kv_file(out_path(c, "estimate.txt"), kv);
    nefa::KvRecord man;
    base_manifest(man, "estimate", c);
    man.set("data", data);
    nefa::write_kv_file(out_path(c, "estimate_manifest.txt"), man);
    return 0;
}

int cmd_fit(const Common& c, const std::string& data, const ParamFlags& pf,
            std::size_t sweeps, std::size_t burn_in, std::size_t thin) {
    if (data.empty()) throw std::invalid_argument("need --data");
    const nefa::Dataset ds = nefa::read_dataset_file(data);
    const nefa::FeatureAllocation alloc = nefa::to_allocation(ds);
    const nefa::AllocationStats stats = nefa::compute_stats(alloc);
    bool estimated = false;
    const nefa::ModelParams p = resolve_params(pf, stats, ds.n(), &estimated);
    const nefa::TimeGrid grid(p.xi, ds.n());
    const nefa::GibbsTrace trace =
        nefa::run_gibbs(alloc, p, grid, sweeps, burn_in, thin, c.seed);

    nefa::CsvWriter tr(out_path(c, "trace.csv"), {"sweep", "feature", "omega", "theta", "c"});
    for (const nefa::GibbsDraw& d : trace.draws) {
        for (std::size_t k = 0; k < d.omega.size(); ++k) {
            tr.row({std::to_string(d.sweep), std::to_string(k + 1),
                    nefa::format_real(d.omega[k]), nefa::format_real(d.theta[k]),
                    nefa::format_real(d.c[k])});
        }
    }
    nefa::CsvWriter lm(out_path(c, "logmarg.csv"), {"sweep", "log_marginal"});
    for (std::size_t s = 0; s < trace.log_marginal.size(); ++s) {
        lm.row({std::to_string(s + 1), nefa::format_real(trace.log_marginal[s])});
    }
    nefa::KvRecord kv;
    base_manifest(kv, "fit", c);
    kv.set("data", data);
    put_params(kv, p);
    kv.set("params_source", estimated ? "estimated" : "given");
    kv.set_int("n", static_cast<long long>(ds.n()));
    kv.set_int("features", static_cast<long long>(stats.n_features));
    kv.set_int("sweeps", static_cast<long long>(sweeps));
    kv.set_int("burn_in", static_cast<long long>(burn_in));
    kv.set_int("thin", static_cast<long long>(thin));
    kv.set_int("recorded", static_cast<long long>(trace.draws.size()));
    nefa::write_kv_file(out_path(c, "fit_manifest.txt"), kv);
    return 0;
}

int cmd_predict(const Common& c, const std::string& data, std::size_t n_train,
                const ParamFlags& pf, std::size_t sweeps, std::size_t burn_in,
                std::size_t thin, std::size_t replicates) {
    if (data.empty()) throw std::invalid_argument("need --data");
    const nefa::Dataset ds = nefa::read_dataset_file(data);
    const auto split = nefa::split_dataset(ds, n_train);
    const std::size_t n_test = ds.n() - n_train;
    const nefa::FeatureAllocation train = nefa::to_allocation(split.first);
    const nefa::FeatureAllocation full = nefa::to_allocation(ds);
    const nefa::AllocationStats stats = nefa::compute_stats(train);
    bool estimated = false;
    const nefa::ModelParams p = resolve_params(pf, stats, n_train, &estimated);
    const nefa::TimeGrid grid(p.xi, ds.n());
    const nefa::GibbsTrace trace =
        nefa::run_gibbs(train, p, grid, sweeps, burn_in, thin, c.seed);
    const nefa::Forecast fc =
        nefa::forecast_sizes_conditional(trace, grid, n_train, n_test, replicates, c.seed);
    const nefa::ErrSummary err = nefa::l2_error(fc, full, n_train, n_test);

    const std::vector<std::size_t> offsets = nefa::default_checkpoints(n_test, 40);
    nefa::CsvWriter sm(out_path(c, "forecast.csv"),
                       {"feature", "test_index", "mean", "q05", "q95"});
    for (const nefa::ForecastSummaryRow& r : nefa::summarize_forecast(fc, offsets)) {
        sm.row({std::to_string(r.label), std::to_string(r.test_index),
                nefa::format_real(r.mean), nefa::format_real(r.q05),
                nefa::format_real(r.q95)});
    }
    nefa::KvRecord ekv;
    ekv.set_real("err_mean", err.mean);
    ekv.set_real("err_q05", err.q05);
    ekv.set_real("err_q95", err.q95);
    ekv.set_int("paths", static_cast<long long>(err.per_path.size()));
    nefa::write_kv_file(out_path(c, "err.txt"), ekv);

    nefa::KvRecord kv;
    base_manifest(kv, "predict", c);
    kv.set("data", data);
    put_params(kv, p);
    kv.set("params_source", estimated ? "estimated" : "given");
    kv.set_int("n_train", static_cast<long long>(n_train));
    kv.set_int("n_test", static_cast<long long>(n_test));
    kv.set_int("train_features", static_cast<long long>(stats.n_features));
    kv.set_int("sweeps", static_cast<long long>(sweeps));
    kv.set_int("burn_in", static_cast<long long>(burn_in));
    kv.set_int("thin", static_cast<long long>(thin));
    kv.set_int("replicates", static_cast<long long>(replicates));
    nefa::write_kv_file(out_path(c, "predict_manifest.txt"), kv);
    return 0;
}

int cmd_baseline(const Common& c, const std::string& data, std::size_t n_train,
                 std::size_t paths) {
    if (data.empty()) throw std::invalid_argument("need --data");
    const nefa::Dataset ds = nefa::read_dataset_file(data);
    const auto split = nefa::split_dataset(ds, n_train);
    const std::size_t n_test = ds.n() - n_train;
    const nefa::FeatureAllocation train = nefa::to_allocation(split.first);
    const nefa::FeatureAllocation full = nefa::to_allocation(ds);
    const nefa::IbpFit fit = nefa::ibp_mle(train);
    const nefa::Forecast fc =
        nefa::ibp_forecast(train, fit.params, n_test, paths, c.seed);
    const nefa::ErrSummary err = nefa::l2_error(fc, full, n_train, n_test);

    nefa::KvRecord fkv;
    fkv.set_real("eta", fit.params.eta);
    fkv.set_real("sigma", fit.params.sigma);
    fkv.set_real("zeta", fit.params.zeta);
    fkv.set_real("loglik", fit.loglik);
    fkv.set_int("converged", fit.converged ? 1 : 0);
    fkv.set_int("evaluations", static_cast<long long>(fit.evaluations));
    nefa::write_kv_file(out_path(c, "baseline.txt"), fkv);

    nefa::KvRecord ekv;
    ekv.set_real("err_mean", err.mean);
    ekv.set_real("err_q05", err.q05);
    ekv.set_real("err_q95", err.q95);
    ekv.set_int("paths", static_cast<long long>(paths));
    nefa::write_kv_file(out_path(c, "baseline_err.txt"), ekv);

    nefa::KvRecord kv;
    base_manifest(kv, "baseline", c);
    kv.set("data", data);
    kv.set_int("n_train", static_cast<long long>(n_train));
    kv.set_int("n_test", static_cast<long long>(n_test));
    nefa::write_kv_file(out_path(c, "baseline_manifest.txt"), kv);
    return 0;
}

int cmd_diagnose(const Common& c, const std::string& data, const ParamFlags& pf,
                 const std::string& family, std::size_t n, const std::string& sampler,
                 const std::string& checkpoints) {
    if (checkpoints != "geometric" && checkpoints != "all") {
        throw std::invalid_argument("unknown checkpoint scheme: " + checkpoints);
    }
    nefa::FeatureAllocation alloc;
    nefa::KvRecord man;
    base_manifest(man, "diagnose", c);
    if (!data.empty()) {
        alloc = nefa::to_allocation(nefa::read_dataset_file(data));
        man.set("data", data);
    } else {
        if (n == 0) throw std::invalid_argument("need --data or model parameters with --n");
        nefa::ModelParams p;
        p.eta = std::isnan(pf.eta) ? 1.0 : pf.eta;
        p.sigma = std::isnan(pf.sigma) ? 0.5 : pf.sigma;
        p.xi = std::isnan(pf.xi) ? 0.0 : pf.xi;
        p.zeta = std::isnan(pf.zeta) ? 1.0 : pf.zeta;
        p.family = nefa::family_from_name(family);
        nefa::SamplerKind kind = (sampler == "truncated") ? nefa::SamplerKind::truncated
                                 : (sampler == "latent")  ? nefa::SamplerKind::latent
                                                          : nefa::SamplerKind::sequential;
        alloc = nefa::simulate_dataset(p, n, c.seed, kind).allocation;
        put_params(man, p);
        man.set_int("n", static_cast<long long>(n));
        man.set("sampler", sampler);
    }
    const nefa::AllocationStats stats = nefa::compute_stats(alloc);
    std::vector<std::size_t> cps;
    if (checkpoints == "all") {
        for (std::size_t i = 1; i <= alloc.n_objects; ++i) cps.push_back(i);
    } else {
        cps = nefa::default_checkpoints(alloc.n_objects);
    }
    const std::vector<nefa::GrowthPoint> growth = nefa::growth_trajectory(alloc, cps);

    nefa::CsvWriter gw(out_path(c, "growth.csv"),
                       {"n", "features", "total_size", "max_size"});
    for (const nefa::GrowthPoint& g : growth) {
        gw.row({std::to_string(g.n), std::to_string(g.features),
                std::to_string(g.total_size), std::to_string(g.max_size)});
    }
    nefa::CsvWriter hw(out_path(c, "histogram.csv"), {"size", "count"});
    for (std::size_t r = 1; r < stats.size_histogram.size(); ++r) {
        if (stats.size_histogram[r] > 0) {
            hw.row({std::to_string(r), std::to_string(stats.size_histogram[r])});
        }
    }
    nefa::CsvWriter pw(out_path(c, "per_object.csv"),
                       {"object", "new_features", "degree"});
    for (std::size_t i = 1; i <= alloc.n_objects; ++i) {
        pw.row({std::to_string(i), std::to_string(stats.new_per_object[i - 1]),
                std::to_string(stats.degree[i - 1])});
    }

    // Power-law fits over the top decade of checkpoints.
    std::vector<double> xs, yk, ym, yx;
    for (const nefa::GrowthPoint& g : growth) {
        if (g.n * 10 < alloc.n_objects) continue;
        xs.push_back(static_cast<double>(g.n));
        yk.push_back(static_cast<double>(g.features));
        ym.push_back(static_cast<double>(g.total_size));
        yx.push_back(static_cast<double>(g.max_size));
    }
    nefa::KvRecord fits;
    fits.set_int("n", static_cast<long long>(alloc.n_objects));
    fits.set_int("features", static_cast<long long>(stats.n_features));
    fits.set_int("total_size", static_cast<long long>(stats.total_size));
    fits.set_real("singleton_fraction", stats.singleton_fraction);
    const nefa::PowerFit fk = nefa::fit_power_law(xs, yk);
    const nefa::PowerFit fm = nefa::fit_power_law(xs, ym);
    const nefa::PowerFit fx = nefa::fit_power_law(xs, yx);
    fits.set_real("slope_features", fk.slope);
    fits.set_real("slope_total_size", fm.slope);
    fits.set_real("slope_max_size", fx.slope);
    try {
        const nefa::HyperEstimate h = nefa::estimate_all(stats, alloc.n_objects);
        fits.set_real("xi_hat", h.xi_hat);
        fits.set_real("sigma_hat", h.sigma_hat);
        fits.set_real("eta_hat", h.eta_hat);
        fits.set_real("zeta_hat", h.zeta_hat);
    } catch (const nefa::insufficient_data_error&) {
        fits.set("estimates", "unavailable");
    }
    nefa::write_kv_file(out_path(c, "fits.txt"), fits);
    nefa::write_kv_file(out_path(c, "diagnose_manifest.txt"), man);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"feature allocation models with time-decaying novelty"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common c_sim, c_est, c_fit, c_pred, c_base, c_diag;
    ParamFlags pf_sim, pf_fit, pf_pred, pf_diag;

    // simulate
    auto* sim = app.add_subcommand("simulate", "draw a synthetic dataset from the model");
    add_common(sim, c_sim);
    pf_sim.add(sim);
    std::string sim_family = "ggp", sim_sampler = "sequential";
    std::size_t sim_n = 0, sim_budget = 10000000;
    double sim_missed = 0.1;
    sim->add_option("--family", sim_family, "ggp or tsb")
        ->check(CLI::IsMember({"ggp", "tsb"}));
    sim->add_option("--n", sim_n, "number of objects");
    sim->add_option("--sampler", sim_sampler, "sequential, truncated, or latent")
        ->check(CLI::IsMember({"sequential", "truncated", "latent"}));
    sim->add_option("--missed-tol", sim_missed,
                    "expected count of missed active features (truncated/latent)");
    sim->add_option("--atom-budget", sim_budget, "cap on truncated atom count");

    // estimate
    auto* est = app.add_subcommand("estimate", "moment estimates of the hyperparameters");
    add_common(est, c_est);
    std::string est_data;
    est->add_option("--data", est_data, "dataset file");

    // fit
    auto* fit = app.add_subcommand("fit", "posterior sampling of feature weights and locations");
    add_common(fit, c_fit);
    pf_fit.add(fit);
    std::string fit_data;
    std::size_t fit_sweeps = 1000, fit_burn = 200, fit_thin = 5;
    fit->add_option("--data", fit_data, "dataset file");
    fit->add_option("--sweeps", fit_sweeps, "total sweeps");
    fit->add_option("--burn-in", fit_burn, "discarded initial sweeps");
    fit->add_option("--thin", fit_thin, "record every thin-th sweep");

    // predict
    auto* pred = app.add_subcommand("predict", "forecast test-range feature sizes");
    add_common(pred, c_pred);
    pf_pred.add(pred);
    std::string pred_data;
    std::size_t pred_ntrain = 0, pred_sweeps = 1000, pred_burn = 200, pred_thin = 5,
                pred_reps = 1;
    pred->add_option("--data", pred_data, "dataset file (train + test)");
    pred->add_option("--n-train", pred_ntrain, "training prefix length");
    pred->add_option("--sweeps", pred_sweeps, "total sweeps");
    pred->add_option("--burn-in", pred_burn, "discarded initial sweeps");
    pred->add_option("--thin", pred_thin, "record every thin-th sweep");
    pred->add_option("--replicates", pred_reps, "forecast paths per posterior draw");

    // baseline
    auto* base = app.add_subcommand("baseline", "exchangeable-model MLE and forecast");
    add_common(base, c_base);
    std::string base_data;
    std::size_t base_ntrain = 0, base_paths = 200;
    base->add_option("--data", base_data, "dataset file (train + test)");
    base->add_option("--n-train", base_ntrain, "training prefix length");
    base->add_option("--paths", base_paths, "forecast paths");

    // diagnose
    auto* diag = app.add_subcommand("diagnose", "growth statistics and slope fits");
    add_common(diag, c_diag);
    pf_diag.add(diag);
    std::string diag_data, diag_family = "ggp", diag_sampler = "sequential",
                diag_cps = "geometric";
    std::size_t diag_n = 0;
    diag->add_option("--data", diag_data, "dataset file (otherwise simulate)");
    diag->add_option("--family", diag_family, "ggp or tsb")
        ->check(CLI::IsMember({"ggp", "tsb"}));
    diag->add_option("--n", diag_n, "objects to simulate when no --data");
    diag->add_option("--sampler", diag_sampler, "sequential, truncated, or latent")
        ->check(CLI::IsMember({"sequential", "truncated", "latent"}));
    diag->add_option("--checkpoints", diag_cps, "geometric or all");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const std::pair<CLI::App*, Common*> subs[] = {{sim, &c_sim}, {est, &c_est},
                                                      {fit, &c_fit}, {pred, &c_pred},
                                                      {base, &c_base}, {diag, &c_diag}};
        for (const auto& [sub, common] : subs) {
            if (sub->parsed()) apply_config(sub, common->config);
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: config: " << e.what() << "\n";
        return 2;
    } catch (const nefa::data_format_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(c_sim, pf_sim, sim_family, sim_n, sim_sampler, sim_missed,
                                sim_budget);
        }
        if (est->parsed()) return cmd_estimate(c_est, est_data);
        if (fit->parsed()) {
            return cmd_fit(c_fit, fit_data, pf_fit, fit_sweeps, fit_burn, fit_thin);
        }
        if (pred->parsed()) {
            return cmd_predict(c_pred, pred_data, pred_ntrain, pf_pred, pred_sweeps,
                               pred_burn, pred_thin, pred_reps);
        }
        if (base->parsed()) return cmd_baseline(c_base, base_data, base_ntrain, base_paths);
        if (diag->parsed()) {
            return cmd_diagnose(c_diag, diag_data, pf_diag, diag_family, diag_n,
                                diag_sampler, diag_cps);
        }
    } catch (const nefa::data_format_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const nefa::insufficient_data_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const nefa::budget_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const nefa::numeric_error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
