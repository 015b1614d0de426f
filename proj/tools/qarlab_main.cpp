// Command-line front end; all work happens behind the qarlab C API.

#include "CLI11.hpp"
#include "qarlab.h"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

using json = nlohmann::json;

namespace {

int exit_code(int status) {
    switch (status) {
        case QARLAB_OK: return 0;
        case QARLAB_EINVAL: return 2;
        case QARLAB_EPARSE: return 3;
        case QARLAB_EDOMAIN: return 4;
        case QARLAB_ENUMERIC: return 5;
        case QARLAB_EIO: return 6;
        default: return 1;
    }
}

struct CommonOpts {
    std::string config_path;
    std::string data;
    std::string out_dir;
    std::string stations;
    long long seed = -1;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "JSON configuration file");
    cmd->add_option("--data", o.data, "input data CSV (wide format)");
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--stations", o.stations, "station CSV (id,x,y[,elev])");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

json base_config(const CommonOpts& o) {
    json cfg = json::object();
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) {
            std::cerr << "error: cannot open config " << o.config_path << "\n";
            std::exit(6);
        }
        try {
            cfg = json::parse(in);
        } catch (const json::parse_error& e) {
            std::cerr << "error: " << o.config_path << ": " << e.what() << "\n";
            std::exit(3);
        }
    }
    if (!o.data.empty()) cfg["data"] = o.data;
    if (!o.out_dir.empty()) cfg["out_dir"] = o.out_dir;
    if (!o.stations.empty()) cfg["stations"] = o.stations;
    if (o.seed >= 0) cfg["seed"] = o.seed;
    if (o.threads >= 0) cfg["threads"] = o.threads;
    return cfg;
}

int run(int (*fn)(qarlab_ctx*, const char*), const json& cfg) {
    std::unique_ptr<qarlab_ctx, void (*)(qarlab_ctx*)> ctx(qarlab_ctx_new(),
                                                           qarlab_ctx_free);
    if (!ctx) {
        std::cerr << "error: out of memory\n";
        return 1;
    }
    const int status = fn(ctx.get(), cfg.dump().c_str());
    if (status != QARLAB_OK)
        std::cerr << "error: " << qarlab_last_error(ctx.get()) << "\n";
    return exit_code(status);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian joint quantile autoregression toolkit"};
    app.require_subcommand(1);

    // fit
    auto* fit = app.add_subcommand("fit", "fit a model and write draws/summaries");
    CommonOpts fit_o;
    add_common(fit, fit_o);
    std::string family;
    int p = 0, K = 0, iterations = 0, burn_in = -1, thin = 0;
    fit->add_option("--family", family, "qar | kx2006 | mqar | sqar");
    fit->add_option("--p", p, "autoregressive order");
    fit->add_option("--K", K, "mixture components per curve");
    fit->add_option("--iterations", iterations, "MCMC iterations");
    fit->add_option("--burn-in", burn_in, "burn-in iterations");
    fit->add_option("--thin", thin, "thinning stride");

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate series from a model");
    CommonOpts sim_o;
    add_common(sim, sim_o);
    std::string scenario, sim_family, sim_out;
    int T = 0, warmup = -1;
    double rho = -2.0, gamma = -1.0;
    sim->add_option("--scenario", scenario, "scenario name (SC1..SC7)");
    sim->add_option("--family", sim_family, "qar | mqar | sqar");
    sim->add_option("--T", T, "series length");
    sim->add_option("--warmup", warmup, "warmup steps to discard");
    sim->add_option("--rho", rho, "copula correlation (mqar)");
    sim->add_option("--gamma", gamma, "spatial mixing proportion (sqar)");
    sim->add_option("--out-csv", sim_out, "output CSV path");

    // coverage
    auto* cov = app.add_subcommand("coverage", "simulation coverage study");
    CommonOpts cov_o;
    add_common(cov, cov_o);
    std::string cov_scenario;
    int B = 0, cov_T = 0;
    double level = 0.0;
    cov->add_option("--scenario", cov_scenario, "scenario name");
    cov->add_option("--B", B, "replicates");
    cov->add_option("--T", cov_T, "series length");
    cov->add_option("--level", level, "credible level");

    // assess
    auto* as = app.add_subcommand("assess", "model adequacy metrics for a fit");
    CommonOpts as_o;
    add_common(as, as_o);
    std::string fit_dir;
    std::vector<double> v_list;
    as->add_option("--fit", fit_dir, "directory of a completed fit");
    as->add_option("--v", v_list, "p-tilde exponents (default 2)");

    // krige
    auto* kr = app.add_subcommand("krige", "quantile surfaces at new sites");
    CommonOpts kr_o;
    add_common(kr, kr_o);
    std::string kr_fit, sites;
    std::vector<double> taus;
    double cond_y = -1.0;
    int kr_draws = 0;
    kr->add_option("--fit", kr_fit, "directory of a completed sqar fit");
    kr->add_option("--sites", sites, "prediction site CSV (id,x,y[,elev])");
    kr->add_option("--tau", taus, "quantile levels");
    kr->add_option("--cond-y", cond_y, "conditioning value on (0,1)");
    kr->add_option("--draws", kr_draws, "posterior draws to use (0 = all)");

    CLI11_PARSE(app, argc, argv);

    if (fit->parsed()) {
        json cfg = base_config(fit_o);
        if (!family.empty()) cfg["family"] = family;
        if (p > 0) cfg["p"] = p;
        if (K > 0) cfg["K"] = K;
        if (iterations > 0) cfg["chain"]["iterations"] = iterations;
        if (burn_in >= 0) cfg["chain"]["burn_in"] = burn_in;
        if (thin > 0) cfg["chain"]["thin"] = thin;
        return run(qarlab_run_fit, cfg);
    }
    if (sim->parsed()) {
        json cfg = base_config(sim_o);
        json& s = cfg["simulate"];
        if (!s.is_object()) s = json::object();
        if (!scenario.empty()) s["scenario"] = scenario;
        if (!sim_family.empty()) s["family"] = sim_family;
        if (T > 0) s["T"] = T;
        if (warmup >= 0) s["warmup"] = warmup;
        if (rho > -2.0) s["rho"] = rho;
        if (gamma >= 0.0) s["gamma"] = gamma;
        if (!sim_out.empty()) s["out"] = sim_out;
        return run(qarlab_run_simulate, cfg);
    }
    if (cov->parsed()) {
        json cfg = base_config(cov_o);
        json& c = cfg["coverage"];
        if (!c.is_object()) c = json::object();
        if (!cov_scenario.empty()) c["scenario"] = cov_scenario;
        if (B > 0) c["B"] = B;
        if (cov_T > 0) c["T"] = cov_T;
        if (level > 0.0) c["level"] = level;
        return run(qarlab_run_coverage, cfg);
    }
    if (as->parsed()) {
        json cfg = base_config(as_o);
        json& a = cfg["assess"];
        if (!a.is_object()) a = json::object();
        if (!fit_dir.empty()) a["fit_dir"] = fit_dir;
        if (!v_list.empty()) a["v"] = v_list;
        return run(qarlab_run_assess, cfg);
    }
    if (kr->parsed()) {
        json cfg = base_config(kr_o);
        json& k = cfg["krige"];
        if (!k.is_object()) k = json::object();
        if (!kr_fit.empty()) k["fit_dir"] = kr_fit;
        if (!sites.empty()) k["sites"] = sites;
        if (!taus.empty()) k["tau"] = taus;
        if (cond_y >= 0.0) k["cond_y"] = cond_y;
        if (kr_draws > 0) k["draws"] = kr_draws;
        return run(qarlab_run_krige, cfg);
    }
    return 2;
}
