#include "qarlab/runner.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "qarlab/csv.hpp"
#include "qarlab/families.hpp"
#include "qarlab/simkit.hpp"
#include "qarlab/support.hpp"
#include "qarlab/threads.hpp"

namespace qarlab::runner {

namespace fs = std::filesystem;

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

void deep_merge(json& base, const json& over) {
    if (!over.is_object()) {
        base = over;
        return;
    }
    if (!base.is_object()) base = json::object();
    for (auto it = over.begin(); it != over.end(); ++it) {
        if (it->is_object() && base.contains(it.key()))
            deep_merge(base[it.key()], *it);
        else
            base[it.key()] = *it;
    }
}

std::uint64_t require_seed(const json& cfg) {
    if (!cfg.contains("seed") || !cfg["seed"].is_number())
        throw DomainError("a numeric 'seed' is required (no silent nondeterminism)");
    return cfg["seed"].get<std::uint64_t>();
}

ChainConfig chain_config(const json& cfg) {
    const json& c = cfg.at("chain");
    ChainConfig out;
    out.iterations = c.at("iterations").get<int>();
    out.burn_in = c.at("burn_in").get<int>();
    out.thin = c.at("thin").get<int>();
    out.adapt_start = c.at("adapt_start").get<int>();
    out.adapt_eps = c.at("adapt_eps").get<double>();
    out.init_step = c.at("init_step").get<double>();
    out.seed = require_seed(cfg);
    return out;
}

TauGrid tau_grid_from(const json& cfg) {
    if (!cfg.contains("tau_grid") || cfg["tau_grid"].is_null())
        return TauGrid::standard();
    return TauGrid::make(cfg["tau_grid"].get<std::vector<double>>());
}

std::vector<double> levels_from(const json& cfg) {
    return cfg.at("levels").get<std::vector<double>>();
}

SupportBounds bounds_for(const json& cfg, std::span<const double> raw) {
    const json& b = cfg.at("bounds");
    const std::string mode = b.at("mode").get<std::string>();
    if (mode == "auto") return select_bounds(raw);
    if (mode == "user") {
        SupportBounds out{b.at("m").get<double>(), b.at("M").get<double>()};
        for (double v : raw)
            if (!(v > out.m && v < out.M))
                throw DomainError("user bounds do not strictly bracket the data");
        return out;
    }
    throw DomainError("bounds.mode must be 'auto' or 'user'");
}

QarPriorConfig qar_priors(const json& cfg) {
    QarPriorConfig out;
    const json& p = cfg.at("priors");
    if (p.contains("sigma_ab")) out.sigma_ab = p["sigma_ab"].get<double>();
    if (p.contains("lambda_hi")) out.lambda_hi = p["lambda_hi"].get<double>();
    return out;
}

KxPriorConfig kx_priors(const json& cfg) {
    KxPriorConfig out;
    const json& p = cfg.at("priors");
    if (p.contains("kx_mu_sd")) out.mu_sd = p["kx_mu_sd"].get<double>();
    if (p.contains("kx_log_sigma_sd"))
        out.log_sigma_sd = p["kx_log_sigma_sd"].get<double>();
    if (p.contains("kx_log_gamma1_sd"))
        out.log_gamma1_sd = p["kx_log_gamma1_sd"].get<double>();
    return out;
}

SpatialPriorConfig spatial_priors(const json& cfg) {
    SpatialPriorConfig out;
    const json& p = cfg.at("priors");
    if (p.contains("gp_hyper_sd")) out.hyper_sd = p["gp_hyper_sd"].get<double>();
    return out;
}

void apply_init_overrides(Target& target, const json& cfg) {
    if (!cfg.contains("init") || cfg["init"].is_null() || cfg["init"].empty())
        return;
    Eigen::VectorXd z = target.init.size() == target.spec.unconstrained_dim()
                            ? target.init
                            : Eigen::VectorXd::Zero(target.spec.unconstrained_dim());
    Eigen::VectorXd c = target.spec.to_constrained(z);
    const auto names = target.spec.names();
    for (auto it = cfg["init"].begin(); it != cfg["init"].end(); ++it) {
        bool found = false;
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (names[i] == it.key()) {
                c[static_cast<Eigen::Index>(i)] = it->get<double>();
                found = true;
                break;
            }
        }
        if (!found) throw DomainError("unknown init parameter: " + it.key());
    }
    target.init = target.spec.to_unconstrained(c);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed: " + path.string());
}

void write_draws_csv(const fs::path& path, const PosteriorDraws& draws) {
    std::vector<std::vector<double>> cols(draws.names.size());
    for (std::size_t j = 0; j < draws.names.size(); ++j) {
        cols[j].resize(draws.draw_count());
        for (int i = 0; i < draws.draw_count(); ++i)
            cols[j][i] = draws.samples(i, static_cast<Eigen::Index>(j));
    }
    write_wide_csv(path.string(), draws.names, cols);
}

json summaries_json(const PosteriorDraws& draws,
                    std::span<const double> levels) {
    json out = json::array();
    for (const auto& s : summarize(draws, levels)) {
        json e{{"name", s.name}, {"mean", s.mean}};
        json iv = json::object();
        for (const auto& [level, bounds] : s.intervals)
            iv[fmt17(level)] = {bounds.first, bounds.second};
        e["intervals"] = iv;
        out.push_back(e);
    }
    return out;
}

// Conditioning values: unit-scale empirical marginal quantiles of the
// fitted series at the requested levels.
std::vector<double> cond_values(const json& cfg, std::span<const double> unit) {
    std::vector<double> out;
    for (double q : cfg.at("cond_quantiles").get<std::vector<double>>())
        out.push_back(empirical_quantile(unit, q));
    return out;
}

std::vector<double> density_y_grid(int points) {
    std::vector<double> y(points);
    for (int i = 0; i < points; ++i) y[i] = (i + 0.5) / points;
    return y;
}

std::string level_tag(double level) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", level);
    return buf;
}

struct ThetaCsv {
    std::vector<std::string> names;
    std::vector<std::vector<double>> cols;

    void add(const std::string& name, std::vector<double> col) {
        names.push_back(name);
        cols.push_back(std::move(col));
    }
    void add_curve(const std::string& prefix, const CurveSummary& cs) {
        add(prefix + "_mean", cs.mean);
        add(prefix + "_lo", cs.lo);
        add(prefix + "_hi", cs.hi);
    }
};

Eigen::VectorXd draw_row(const WideTable& draws, int b) {
    Eigen::VectorXd row(draws.cols());
    for (int j = 0; j < draws.cols(); ++j) row[j] = draws.columns[j][b];
    return row;
}

void check_draw_names(const WideTable& draws,
                      const std::vector<std::string>& expected) {
    if (draws.names != expected)
        throw IoError("draws.csv columns do not match the fitted model layout");
}

// ---------------------------------------------------------------- fit

void fit_qar(const json& cfg, const fs::path& out_dir, json& summary) {
    const int p = cfg.at("p").get<int>();
    const int K = cfg.at("K").get<int>();
    const WideTable table = read_wide_csv(cfg.at("data").get<std::string>());
    const std::string series = cfg.contains("series") && !cfg["series"].empty()
                                   ? cfg["series"][0].get<std::string>()
                                   : table.names[0];
    const std::vector<double>& raw = table.column(series);
    if (static_cast<int>(raw.size()) < p + 2)
        throw DomainError("series length must be at least p+2");

    const SupportBounds b = bounds_for(cfg, raw);
    const std::vector<double> unit = to_unit(raw, b);

    Target target = make_qar_target(p, K, unit, qar_priors(cfg));
    apply_init_overrides(target, cfg);
    const PosteriorDraws draws = run_chain(target, chain_config(cfg));
    write_draws_csv(out_dir / "draws.csv", draws);

    summary["series"] = {series};
    summary["bounds"] = {{series, {{"m", b.m}, {"M", b.M}}}};
    summary["acceptance_rate"] = draws.acceptance_rate;
    summary["adapted_acceptance_rate"] = draws.adapted_acceptance_rate;
    summary["draws"] = draws.draw_count();
    summary["warnings"] = draws.warnings;
    summary["parameters"] = summaries_json(draws, levels_from(cfg));

    const TauGrid grid = tau_grid_from(cfg);
    const double level = levels_from(cfg)[0];
    const auto conds = cond_values(cfg, unit);
    const auto y_grid = density_y_grid(cfg.at("density_grid_points").get<int>());

    auto model_at = [&](int i) {
        return qar_model_from_row(p, K, draws.samples.row(i).transpose());
    };

    ThetaCsv theta_csv;
    theta_csv.add("tau", grid.values);
    ThetaCsv dens_csv;
    dens_csv.add("y_unit", y_grid);
    {
        std::vector<double> y_orig;
        for (double v : y_grid) y_orig.push_back(from_unit(v, b));
        dens_csv.add("y_orig", y_orig);
    }

    for (std::size_t ci = 0; ci < conds.size(); ++ci) {
        FunctionalRequest req;
        req.tau_grid = grid.values;
        req.lags.assign(p, conds[ci]);
        req.y_grid = y_grid;
        req.level = level;
        const FunctionalSummary fn =
            posterior_functionals(model_at, draws.draw_count(), req);
        if (ci == 0) {
            for (int j = 0; j <= p; ++j)
                theta_csv.add_curve("theta" + std::to_string(j), fn.theta[j]);
            // original-scale intercept: m + (M-m) theta0 - m sum_j theta_j,
            // assembled from the same draw set
            Eigen::MatrixXd t0(draws.draw_count(), grid.size());
            for (int i = 0; i < draws.draw_count(); ++i) {
                const ThetaGrids tg = theta_curves(model_at(i), grid.values);
                for (int g = 0; g < grid.size(); ++g) {
                    double slopes = 0.0;
                    for (int j = 1; j <= p; ++j) slopes += tg.theta[j][g];
                    t0(i, g) = b.m + (b.M - b.m) * tg.theta[0][g] - b.m * slopes;
                }
            }
            CurveSummary orig;
            const double alpha = (1.0 - level) / 2.0;
            std::vector<double> col(draws.draw_count());
            for (int g = 0; g < grid.size(); ++g) {
                for (int i = 0; i < draws.draw_count(); ++i) col[i] = t0(i, g);
                orig.mean.push_back(t0.col(g).mean());
                orig.lo.push_back(empirical_quantile(col, alpha));
                orig.hi.push_back(empirical_quantile(col, 1.0 - alpha));
            }
            theta_csv.add_curve("theta0_orig", orig);
        }
        const std::string tag =
            level_tag(cfg.at("cond_quantiles")[ci].get<double>());
        theta_csv.add_curve("q" + tag, fn.quantile);
        dens_csv.add_curve("f" + tag, fn.density);
        summary["functional_draws_skipped"] = fn.draws_skipped;
    }
    write_wide_csv((out_dir / "theta_grid.csv").string(), theta_csv.names,
                   theta_csv.cols);
    write_wide_csv((out_dir / "density_grid.csv").string(), dens_csv.names,
                   dens_csv.cols);
}

void fit_kx2006(const json& cfg, const fs::path& out_dir, json& summary) {
    const WideTable table = read_wide_csv(cfg.at("data").get<std::string>());
    const std::string series = cfg.contains("series") && !cfg["series"].empty()
                                   ? cfg["series"][0].get<std::string>()
                                   : table.names[0];
    const std::vector<double>& raw = table.column(series);
    for (double v : raw)
        if (v < 0.0)
            throw DomainError(
                "KX2006 works on the original scale and requires nonnegative data");

    Target target = make_kx2006_target(raw, kx_priors(cfg));
    apply_init_overrides(target, cfg);
    const PosteriorDraws draws = run_chain(target, chain_config(cfg));
    write_draws_csv(out_dir / "draws.csv", draws);

    summary["series"] = {series};
    summary["acceptance_rate"] = draws.acceptance_rate;
    summary["adapted_acceptance_rate"] = draws.adapted_acceptance_rate;
    summary["draws"] = draws.draw_count();
    summary["warnings"] = draws.warnings;
    summary["parameters"] = summaries_json(draws, levels_from(cfg));

    const TauGrid grid = tau_grid_from(cfg);
    const double level = levels_from(cfg)[0];
    const double alpha = (1.0 - level) / 2.0;
    const int nd = draws.draw_count();
    const int G = grid.size();

    Eigen::MatrixXd th0(nd, G), th1(nd, G);
    for (int i = 0; i < nd; ++i) {
        const Kx2006Model m = kx_model_from_row(draws.samples.row(i).transpose());
        for (int g = 0; g < G; ++g) {
            th0(i, g) = m.mu + m.sigma * normal_quantile(grid.values[g]);
            th1(i, g) = std::min(m.gamma0 + m.gamma1 * grid.values[g], 1.0);
        }
    }
    auto col_summary = [&](const Eigen::MatrixXd& mat) {
        CurveSummary cs;
        std::vector<double> col(nd);
        for (int g = 0; g < static_cast<int>(mat.cols()); ++g) {
            for (int i = 0; i < nd; ++i) col[i] = mat(i, g);
            cs.mean.push_back(mat.col(g).mean());
            cs.lo.push_back(empirical_quantile(col, alpha));
            cs.hi.push_back(empirical_quantile(col, 1.0 - alpha));
        }
        return cs;
    };

    ThetaCsv theta_csv;
    theta_csv.add("tau", grid.values);
    theta_csv.add_curve("theta0", col_summary(th0));
    theta_csv.add_curve("theta1", col_summary(th1));

    const auto conds = cond_values(cfg, raw);
    for (std::size_t ci = 0; ci < conds.size(); ++ci) {
        Eigen::MatrixXd q(nd, G);
        for (int i = 0; i < nd; ++i)
            for (int g = 0; g < G; ++g)
                q(i, g) = th0(i, g) + th1(i, g) * conds[ci];
        theta_csv.add_curve(
            "q" + level_tag(cfg.at("cond_quantiles")[ci].get<double>()),
            col_summary(q));
    }
    write_wide_csv((out_dir / "theta_grid.csv").string(), theta_csv.names,
                   theta_csv.cols);

    // density over an extended data range; unsolvable grid points carry
    // zero density
    const auto [mn_it, mx_it] = std::minmax_element(raw.begin(), raw.end());
    const double margin = 0.05 * (*mx_it - *mn_it);
    const int points = cfg.at("density_grid_points").get<int>();
    std::vector<double> y(points);
    for (int i = 0; i < points; ++i)
        y[i] = *mn_it - margin +
               (i + 0.5) / points * (*mx_it - *mn_it + 2.0 * margin);

    ThetaCsv dens_csv;
    dens_csv.add("y", y);
    for (std::size_t ci = 0; ci < conds.size(); ++ci) {
        Eigen::MatrixXd f(nd, points);
        for (int i = 0; i < nd; ++i) {
            const Kx2006Model m =
                kx_model_from_row(draws.samples.row(i).transpose());
            for (int g = 0; g < points; ++g) {
                try {
                    const double u = kx2006_inverse_tau(m, y[g], conds[ci]);
                    f(i, g) = 1.0 / kx2006_quantile_deriv(m, u, conds[ci]);
                } catch (const NumericError&) {
                    f(i, g) = 0.0;
                }
            }
        }
        dens_csv.add_curve(
            "f" + level_tag(cfg.at("cond_quantiles")[ci].get<double>()),
            col_summary(f));
    }
    write_wide_csv((out_dir / "density_grid.csv").string(), dens_csv.names,
                   dens_csv.cols);
}

void fit_mqar(const json& cfg, const fs::path& out_dir, json& summary) {
    const int K = cfg.at("K").get<int>();
    const WideTable table = read_wide_csv(cfg.at("data").get<std::string>());
    std::vector<std::string> series;
    if (cfg.contains("series") && cfg["series"].size() == 2)
        series = cfg["series"].get<std::vector<std::string>>();
    else if (table.cols() >= 2)
        series = {table.names[0], table.names[1]};
    else
        throw DomainError("the bivariate family needs two data columns");

    const std::vector<double>& raw1 = table.column(series[0]);
    const std::vector<double>& raw2 = table.column(series[1]);
    if (raw1.size() != raw2.size() || raw1.size() < 3)
        throw DomainError("the two series must share a length of at least 3");

    const SupportBounds b1 = bounds_for(cfg, raw1);
    const SupportBounds b2 = bounds_for(cfg, raw2);
    const std::vector<double> u1 = to_unit(raw1, b1);
    const std::vector<double> u2 = to_unit(raw2, b2);

    Target target = make_mqar_target(K, u1, u2, qar_priors(cfg));
    apply_init_overrides(target, cfg);
    const PosteriorDraws draws = run_chain(target, chain_config(cfg));
    write_draws_csv(out_dir / "draws.csv", draws);

    summary["series"] = series;
    summary["bounds"] = {{series[0], {{"m", b1.m}, {"M", b1.M}}},
                         {series[1], {{"m", b2.m}, {"M", b2.M}}}};
    summary["acceptance_rate"] = draws.acceptance_rate;
    summary["adapted_acceptance_rate"] = draws.adapted_acceptance_rate;
    summary["draws"] = draws.draw_count();
    summary["warnings"] = draws.warnings;
    summary["parameters"] = summaries_json(draws, levels_from(cfg));

    const TauGrid grid = tau_grid_from(cfg);
    const double level = levels_from(cfg)[0];

    ThetaCsv theta_csv;
    theta_csv.add("tau", grid.values);
    for (int s = 0; s < 2; ++s) {
        auto model_at = [&, s](int i) {
            const BivariateQarModel m =
                mqar_model_from_row(K, draws.samples.row(i).transpose());
            return s == 0 ? m.model_max : m.model_min;
        };
        FunctionalRequest req;
        req.tau_grid = grid.values;
        req.lags = {0.5};
        req.level = level;
        const FunctionalSummary fn =
            posterior_functionals(model_at, draws.draw_count(), req);
        const std::string prefix = "s" + std::to_string(s + 1);
        theta_csv.add_curve(prefix + "_theta0", fn.theta[0]);
        theta_csv.add_curve(prefix + "_theta1", fn.theta[1]);
    }
    write_wide_csv((out_dir / "theta_grid.csv").string(), theta_csv.names,
                   theta_csv.cols);

    // joint conditional density grids over the cartesian product of the
    // conditioning quantiles, averaged over draws
    const auto conds1 = cond_values(cfg, u1);
    const auto conds2 = cond_values(cfg, u2);
    const int G = cfg.at("density_grid_points").get<int>();
    for (std::size_t i1 = 0; i1 < conds1.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < conds2.size(); ++i2) {
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(G, G);
            int used = 0;
            for (int i = 0; i < draws.draw_count(); ++i) {
                try {
                    const BivariateQarModel m =
                        mqar_model_from_row(K, draws.samples.row(i).transpose());
                    acc += joint_conditional_density_grid(m, conds1[i1],
                                                          conds2[i2], G);
                    ++used;
                } catch (const NumericError&) {
                }
            }
            if (used == 0)
                throw NumericError("all draws failed on the joint density grid");
            acc /= used;

            const std::string t1 =
                level_tag(cfg.at("cond_quantiles")[i1].get<double>());
            const std::string t2 =
                level_tag(cfg.at("cond_quantiles")[i2].get<double>());
            std::ofstream out(out_dir /
                              ("density_grid_" + t1 + "_" + t2 + ".csv"));
            if (!out) throw IoError("cannot write density grid");
            // axis headers in original data units
            out << "ymax_orig\\ymin_orig";
            for (int j = 0; j < G; ++j)
                out << "," << fmt17(from_unit((j + 0.5) / G, b2));
            out << "\n";
            for (int i = 0; i < G; ++i) {
                out << fmt17(from_unit((i + 0.5) / G, b1));
                for (int j = 0; j < G; ++j) out << "," << fmt17(acc(i, j));
                out << "\n";
            }
        }
    }
}

void fit_sqar(const json& cfg, const fs::path& out_dir, json& summary) {
    if (!cfg.contains("stations"))
        throw DomainError("the spatial family requires a 'stations' file");
    const StationSet stations =
        read_stations_csv(cfg.at("stations").get<std::string>());
    const WideTable table = read_wide_csv(cfg.at("data").get<std::string>());
    const int n = stations.size();

    Eigen::MatrixXd unit(table.rows(), n);
    json bounds_json = json::object();
    for (int i = 0; i < n; ++i) {
        const std::vector<double>& raw = table.column(stations.ids[i]);
        const SupportBounds b = bounds_for(cfg, raw);
        bounds_json[stations.ids[i]] = {{"m", b.m}, {"M", b.M}};
        const std::vector<double> u = to_unit(raw, b);
        for (int t = 0; t < table.rows(); ++t) unit(t, i) = u[t];
    }

    const double field_phi = cfg.contains("field_phi") && !cfg["field_phi"].is_null()
                                 ? cfg["field_phi"].get<double>()
                                 : phi_from_dmax(stations);
    const double copula_phi =
        cfg.contains("copula_phi") && !cfg["copula_phi"].is_null()
            ? cfg["copula_phi"].get<double>()
            : phi_from_dmax(stations);

    const bool grouped =
        cfg.at("spatial_blocks").get<std::string>() != "single";
    Target target = make_spatial_target(unit, stations, field_phi, copula_phi,
                                        spatial_priors(cfg), grouped);
    apply_init_overrides(target, cfg);
    const PosteriorDraws draws = run_chain(target, chain_config(cfg));
    write_draws_csv(out_dir / "draws.csv", draws);

    summary["series"] = stations.ids;
    summary["bounds"] = bounds_json;
    summary["field_phi"] = field_phi;
    summary["copula_phi"] = copula_phi;
    summary["acceptance_rate"] = draws.acceptance_rate;
    summary["adapted_acceptance_rate"] = draws.adapted_acceptance_rate;
    summary["draws"] = draws.draw_count();
    summary["warnings"] = draws.warnings;
    summary["parameters"] = summaries_json(draws, levels_from(cfg));

    const TauGrid grid = tau_grid_from(cfg);
    const double level = levels_from(cfg)[0];

    std::vector<double> site_col, tau_col;
    std::vector<std::vector<double>> curve_cols(6);
    for (int i = 0; i < n; ++i) {
        auto model_at = [&, i](int b) {
            return spatial_model_from_row(n, field_phi, copula_phi,
                                          draws.samples.row(b).transpose())
                .site_model(i);
        };
        FunctionalRequest req;
        req.tau_grid = grid.values;
        req.lags = {0.5};
        req.level = level;
        const FunctionalSummary fn =
            posterior_functionals(model_at, draws.draw_count(), req);
        for (int g = 0; g < grid.size(); ++g) {
            site_col.push_back(i + 1);
            tau_col.push_back(grid.values[g]);
            curve_cols[0].push_back(fn.theta[0].mean[g]);
            curve_cols[1].push_back(fn.theta[0].lo[g]);
            curve_cols[2].push_back(fn.theta[0].hi[g]);
            curve_cols[3].push_back(fn.theta[1].mean[g]);
            curve_cols[4].push_back(fn.theta[1].lo[g]);
            curve_cols[5].push_back(fn.theta[1].hi[g]);
        }
    }
    write_wide_csv((out_dir / "theta_grid.csv").string(),
                   {"site", "tau", "theta0_mean", "theta0_lo", "theta0_hi",
                    "theta1_mean", "theta1_lo", "theta1_hi"},
                   {site_col, tau_col, curve_cols[0], curve_cols[1],
                    curve_cols[2], curve_cols[3], curve_cols[4], curve_cols[5]});
}

} // namespace

json resolve_config(const json& user) {
    json cfg = {
        {"family", "qar"},
        {"p", 1},
        {"K", 1},
        {"threads", 0},
        {"out_dir", "out"},
        {"levels", {0.9, 0.95}},
        {"chain",
         {{"iterations", 20000},
          {"burn_in", 10000},
          {"thin", 5},
          {"adapt_start", 500},
          {"adapt_eps", 1e-6},
          {"init_step", 0.1}}},
        {"bounds", {{"mode", "auto"}}},
        {"priors", json::object()},
        {"cond_quantiles", {0.1, 0.5, 0.9}},
        {"density_grid_points", 201},
        {"spatial_blocks", "grouped"},
    };
    deep_merge(cfg, user);
    if (!cfg.contains("tau_grid") || cfg["tau_grid"].is_null())
        cfg["tau_grid"] = TauGrid::standard().values;
    return cfg;
}

void cmd_fit(const json& user) {
    const json cfg = resolve_config(user);
    if (!cfg.contains("data"))
        throw DomainError("fit requires a 'data' CSV path");
    require_seed(cfg);
    const fs::path out_dir = cfg.at("out_dir").get<std::string>();
    fs::create_directories(out_dir);

    json summary;
    const std::string family = cfg.at("family").get<std::string>();
    summary["family"] = family;
    summary["config"] = cfg;
    if (family == "qar")
        fit_qar(cfg, out_dir, summary);
    else if (family == "kx2006")
        fit_kx2006(cfg, out_dir, summary);
    else if (family == "mqar")
        fit_mqar(cfg, out_dir, summary);
    else if (family == "sqar")
        fit_sqar(cfg, out_dir, summary);
    else
        throw DomainError("unknown model family: " + family);
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
}

QarModel parse_qar_model_json(const json& spec) {
    std::vector<MonotoneCurve> curves;
    for (const json& c : spec.at("curves")) {
        std::vector<KumaraswamyParams> comps;
        for (const json& k : c.at("components"))
            comps.emplace_back(k.at("a").get<double>(), k.at("b").get<double>());
        std::vector<double> weights =
            c.contains("weights") ? c["weights"].get<std::vector<double>>()
                                  : std::vector<double>{1.0};
        curves.emplace_back(std::move(comps), std::move(weights));
    }
    std::vector<double> pi;
    if (spec.contains("lag_weights"))
        pi = spec["lag_weights"].get<std::vector<double>>();
    return QarModel(std::move(curves), std::move(pi));
}

void cmd_simulate(const json& user) {
    const json cfg = resolve_config(user);
    if (!cfg.contains("simulate"))
        throw DomainError("simulate requires a 'simulate' section");
    const json& sim = cfg["simulate"];
    const std::uint64_t seed = require_seed(cfg);
    const fs::path out_dir = cfg.at("out_dir").get<std::string>();
    fs::create_directories(out_dir);
    const std::string out_csv =
        sim.contains("out") ? sim["out"].get<std::string>()
                            : (out_dir / "data.csv").string();

    const std::string family =
        sim.contains("family") ? sim["family"].get<std::string>() : "qar";
    const int T = sim.at("T").get<int>();
    const int warmup = sim.contains("warmup") ? sim["warmup"].get<int>() : 100;

    if (family == "qar") {
        QarModel model = sim.contains("model")
                             ? parse_qar_model_json(sim["model"])
                             : scenario_catalog(sim.at("scenario").get<std::string>())
                                   .model();
        const auto y = simulate_qar(model, T, warmup, seed);
        write_wide_csv(out_csv, {"y"}, {y});
    } else if (family == "mqar") {
        QarModel m1 = sim.contains("model_max")
                          ? parse_qar_model_json(sim["model_max"])
                          : scenario_catalog(sim.at("scenario_max").get<std::string>())
                                .model();
        QarModel m2 = sim.contains("model_min")
                          ? parse_qar_model_json(sim["model_min"])
                          : scenario_catalog(sim.at("scenario_min").get<std::string>())
                                .model();
        const BivariateQarModel model(std::move(m1), std::move(m2),
                                      sim.at("rho").get<double>());
        const BivariateSeries s = simulate_bivariate(model, T, warmup, seed);
        write_wide_csv(out_csv, {"ymax", "ymin"}, {s.y_max, s.y_min});
    } else if (family == "sqar") {
        const StationSet stations =
            read_stations_csv(cfg.at("stations").get<std::string>());
        const int n = stations.size();
        const double phi = cfg.contains("copula_phi") && !cfg["copula_phi"].is_null()
                               ? cfg["copula_phi"].get<double>()
                               : phi_from_dmax(stations);
        const double field_phi =
            cfg.contains("field_phi") && !cfg["field_phi"].is_null()
                ? cfg["field_phi"].get<double>()
                : phi_from_dmax(stations);

        SpatialQarModel model;
        model.gamma = sim.at("gamma").get<double>();
        model.copula_phi = phi;
        model.log_fields.resize(4, n);
        const json& fields = sim.at("fields");
        const double means[4] = {fields.at("loga1").get<double>(),
                                 fields.at("logb1").get<double>(),
                                 fields.at("loga2").get<double>(),
                                 fields.at("logb2").get<double>()};
        const double var = fields.contains("var") ? fields["var"].get<double>() : 0.0;
        for (int f = 0; f < 4; ++f) {
            model.hypers[f] = GpHyper{means[f], var > 0.0 ? var : 1.0, field_phi};
            for (int i = 0; i < n; ++i) model.log_fields(f, i) = means[f];
        }
        if (var > 0.0) {
            // latent fields drawn once from their GP prior
            Rng rng(seed ^ 0xa24baed4963ee407ull);
            Eigen::MatrixXd R = exp_corr_matrix(stations, field_phi);
            Eigen::LLT<Eigen::MatrixXd> llt(R.selfadjointView<Eigen::Lower>());
            if (llt.info() != Eigen::Success)
                throw NumericError("field correlation factorization failed");
            const Eigen::MatrixXd L = llt.matrixL();
            const double sd = std::sqrt(var);
            for (int f = 0; f < 4; ++f) {
                Eigen::VectorXd z(n);
                for (int i = 0; i < n; ++i) z[i] = rng.normal();
                model.log_fields.row(f) += (sd * (L * z)).transpose();
            }
        }
        const Eigen::MatrixXd y = simulate_spatial(model, stations, T, warmup, seed);
        std::vector<std::vector<double>> cols(n);
        for (int i = 0; i < n; ++i) {
            cols[i].resize(T);
            for (int t = 0; t < T; ++t) cols[i][t] = y(t, i);
        }
        write_wide_csv(out_csv, stations.ids, cols);
    } else {
        throw DomainError("unknown simulation family: " + family);
    }
}

void cmd_coverage(const json& user) {
    const json cfg = resolve_config(user);
    if (!cfg.contains("coverage"))
        throw DomainError("coverage requires a 'coverage' section");
    const json& cov = cfg["coverage"];
    const fs::path out_dir = cfg.at("out_dir").get<std::string>();
    fs::create_directories(out_dir);

    const Scenario scenario =
        scenario_catalog(cov.at("scenario").get<std::string>());
    const TauGrid grid = tau_grid_from(cfg);
    ChainConfig chain = chain_config(cfg);
    const CoverageResult r = coverage_study(
        scenario, cov.at("B").get<int>(), cov.at("T").get<int>(),
        cov.contains("level") ? cov["level"].get<double>() : 0.9, grid, chain,
        cfg.at("threads").get<int>());

    json out{{"scenario", scenario.name},
             {"B", r.B},
             {"T", r.T},
             {"level", r.level},
             {"failed_replicates", r.failed_replicates},
             {"avg_cvg_theta0", r.avg_theta0},
             {"avg_cvg_theta1", r.avg_theta1},
             {"config", cfg}};
    write_text(out_dir / "coverage.json", out.dump(2) + "\n");
    write_wide_csv((out_dir / "coverage_tau.csv").string(),
                   {"tau", "cvg_theta0", "cvg_theta1"},
                   {r.tau, r.cvg_theta0, r.cvg_theta1});
}

namespace {

json metrics_json(const MetricsReport& r) {
    json p = json::object();
    for (const auto& [v, value] : r.p_tilde) p[level_tag(v)] = value;
    return json{{"p_tilde", p},
                {"delta_tilde", r.delta_tilde},
                {"r1_bar", r.r1_bar}};
}

} // namespace

void cmd_assess(const json& user) {
    const json cfg = resolve_config(user);
    if (!cfg.contains("assess"))
        throw DomainError("assess requires an 'assess' section");
    const json& as = cfg["assess"];
    const fs::path fit_dir = as.contains("fit_dir")
                                 ? fs::path(as["fit_dir"].get<std::string>())
                                 : fs::path(cfg.at("out_dir").get<std::string>());
    const json summary = load_json_file((fit_dir / "summary.json").string());
    const json& fit_cfg = summary.at("config");
    const std::string family = summary.at("family").get<std::string>();

    const WideTable draws = read_wide_csv((fit_dir / "draws.csv").string());
    const std::string data_path = cfg.contains("data")
                                      ? cfg.at("data").get<std::string>()
                                      : fit_cfg.at("data").get<std::string>();
    const WideTable table = read_wide_csv(data_path);
    const TauGrid grid = tau_grid_from(fit_cfg);
    const std::vector<double> v_list =
        as.contains("v") ? as["v"].get<std::vector<double>>()
                         : std::vector<double>{2.0};
    const int nd = draws.rows();

    const fs::path out_dir = cfg.at("out_dir").get<std::string>();
    fs::create_directories(out_dir);

    const auto series = summary.at("series").get<std::vector<std::string>>();
    std::vector<MetricsReport> reports;
    std::vector<std::string> report_names;

    auto unit_series = [&](const std::string& name) {
        const json& b = summary.at("bounds").at(name);
        const SupportBounds sb{b.at("m").get<double>(), b.at("M").get<double>()};
        return to_unit(table.column(name), sb);
    };

    if (family == "qar") {
        const int p = fit_cfg.at("p").get<int>();
        const int K = fit_cfg.at("K").get<int>();
        check_draw_names(draws, make_qar_target(p, K, {0.3, 0.4, 0.5}).spec.names());
        const std::vector<double> unit = unit_series(series[0]);
        auto theta_at = [&](int b) {
            const ThetaGrids tg =
                theta_curves(qar_model_from_row(p, K, draw_row(draws, b)),
                             grid.values);
            Eigen::MatrixXd m(p + 1, grid.size());
            for (int j = 0; j <= p; ++j)
                for (int g = 0; g < grid.size(); ++g) m(j, g) = tg.theta[j][g];
            return m;
        };
        reports.push_back(compute_metrics(theta_at, nd, unit, grid, v_list));
        report_names.push_back(series[0]);
    } else if (family == "kx2006") {
        const std::vector<double>& raw = table.column(series[0]);
        auto theta_at = [&](int b) {
            const Kx2006Model m = kx_model_from_row(draw_row(draws, b));
            Eigen::MatrixXd th(2, grid.size());
            for (int g = 0; g < grid.size(); ++g) {
                th(0, g) = m.mu + m.sigma * normal_quantile(grid.values[g]);
                th(1, g) = std::min(m.gamma0 + m.gamma1 * grid.values[g], 1.0);
            }
            return th;
        };
        reports.push_back(compute_metrics(theta_at, nd, raw, grid, v_list));
        report_names.push_back(series[0]);
    } else if (family == "mqar") {
        const int K = fit_cfg.at("K").get<int>();
        for (int s = 0; s < 2; ++s) {
            const std::vector<double> unit = unit_series(series[s]);
            auto theta_at = [&, s](int b) {
                const BivariateQarModel bm =
                    mqar_model_from_row(K, draw_row(draws, b));
                const ThetaGrids tg = theta_curves(
                    s == 0 ? bm.model_max : bm.model_min, grid.values);
                Eigen::MatrixXd m(2, grid.size());
                for (int j = 0; j <= 1; ++j)
                    for (int g = 0; g < grid.size(); ++g) m(j, g) = tg.theta[j][g];
                return m;
            };
            reports.push_back(compute_metrics(theta_at, nd, unit, grid, v_list));
            report_names.push_back(series[s]);
        }
    } else if (family == "sqar") {
        const int n = static_cast<int>(series.size());
        const double field_phi = summary.at("field_phi").get<double>();
        const double copula_phi = summary.at("copula_phi").get<double>();
        for (int i = 0; i < n; ++i) {
            const std::vector<double> unit = unit_series(series[i]);
            auto theta_at = [&, i](int b) {
                const QarModel m =
                    spatial_model_from_row(n, field_phi, copula_phi,
                                           draw_row(draws, b))
                        .site_model(i);
                const ThetaGrids tg = theta_curves(m, grid.values);
                Eigen::MatrixXd th(2, grid.size());
                for (int j = 0; j <= 1; ++j)
                    for (int g = 0; g < grid.size(); ++g) th(j, g) = tg.theta[j][g];
                return th;
            };
            reports.push_back(compute_metrics(theta_at, nd, unit, grid, v_list));
            report_names.push_back(series[i]);
        }
    } else {
        throw DomainError("unknown fit family: " + family);
    }

    json per_series = json::object();
    json average;
    {
        std::map<double, double> p_avg;
        double r1 = 0.0, dt = 0.0;
        for (std::size_t i = 0; i < reports.size(); ++i) {
            per_series[report_names[i]] = metrics_json(reports[i]);
            for (const auto& [v, value] : reports[i].p_tilde) p_avg[v] += value;
            r1 += reports[i].r1_bar;
            dt += reports[i].delta_tilde;
        }
        json p = json::object();
        for (auto& [v, value] : p_avg) p[level_tag(v)] = value / reports.size();
        average = {{"p_tilde", p},
                   {"r1_bar", r1 / reports.size()},
                   {"delta_tilde", dt / reports.size()}};
    }
    json out{{"family", family},
             {"fit_dir", fit_dir.string()},
             {"per_series", per_series},
             {"average", average},
             {"config", cfg}};
    write_text(out_dir / "metrics.json", out.dump(2) + "\n");

    std::vector<double> s_col, tau_col, p_col, d_col, w_col;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        for (int g = 0; g < grid.size(); ++g) {
            s_col.push_back(static_cast<double>(i + 1));
            tau_col.push_back(grid.values[g]);
            p_col.push_back(reports[i].p_profile[g]);
            d_col.push_back(reports[i].delta_profile[g]);
            w_col.push_back(reports[i].omega[g]);
        }
    }
    write_wide_csv((out_dir / "metrics_profile.csv").string(),
                   {"series", "tau", "p_profile", "delta", "omega"},
                   {s_col, tau_col, p_col, d_col, w_col});
}

void cmd_krige(const json& user) {
    const json cfg = resolve_config(user);
    if (!cfg.contains("krige"))
        throw DomainError("krige requires a 'krige' section");
    const json& kr = cfg["krige"];
    const fs::path fit_dir = kr.contains("fit_dir")
                                 ? fs::path(kr["fit_dir"].get<std::string>())
                                 : fs::path(cfg.at("out_dir").get<std::string>());
    const json summary = load_json_file((fit_dir / "summary.json").string());
    if (summary.at("family").get<std::string>() != "sqar")
        throw DomainError("krige needs a spatial (sqar) fit");
    const json& fit_cfg = summary.at("config");

    const StationSet stations =
        read_stations_csv(fit_cfg.at("stations").get<std::string>());
    const StationSet pred =
        read_stations_csv(kr.at("sites").get<std::string>());
    const double field_phi = summary.at("field_phi").get<double>();
    const double copula_phi = summary.at("copula_phi").get<double>();

    const WideTable draws = read_wide_csv((fit_dir / "draws.csv").string());
    const int n = stations.size();
    int nd = draws.rows();
    int step = 1;
    if (kr.contains("draws") && kr["draws"].get<int>() > 0 &&
        kr["draws"].get<int>() < nd) {
        step = nd / kr["draws"].get<int>();
        nd = nd / step;
    }

    SurfaceRequest req;
    req.sites.reserve(pred.size());
    for (const auto& c : pred.coords) req.sites.push_back(c);
    req.tau_list = kr.contains("tau") ? kr["tau"].get<std::vector<double>>()
                                      : std::vector<double>{0.05, 0.5, 0.95};
    req.cond_y = kr.contains("cond_y") ? kr["cond_y"].get<double>() : 0.5;

    const std::uint64_t seed =
        cfg.contains("seed") ? cfg["seed"].get<std::uint64_t>()
                             : fit_cfg.at("seed").get<std::uint64_t>() ^
                                   0x6b79ab1e8f3c55d1ull;
    auto model_at = [&](int b) {
        return spatial_model_from_row(n, field_phi, copula_phi,
                                      draw_row(draws, b * step));
    };
    const SurfaceResult surf =
        predict_quantile_surface(model_at, nd, stations, req, seed);

    const fs::path out_dir = cfg.at("out_dir").get<std::string>();
    fs::create_directories(out_dir);
    std::vector<double> x_col, y_col, tau_col, cond_col, q_col;
    for (int j = 0; j < static_cast<int>(req.sites.size()); ++j) {
        for (int g = 0; g < static_cast<int>(req.tau_list.size()); ++g) {
            x_col.push_back(req.sites[j].x);
            y_col.push_back(req.sites[j].y);
            tau_col.push_back(req.tau_list[g]);
            cond_col.push_back(req.cond_y);
            q_col.push_back(surf.q_mean(j, g));
        }
    }
    write_wide_csv((out_dir / "surface.csv").string(),
                   {"x", "y", "tau", "cond_y", "q_mean"},
                   {x_col, y_col, tau_col, cond_col, q_col});
}

} // namespace qarlab::runner
