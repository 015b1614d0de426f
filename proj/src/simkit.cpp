#include "qarlab/simkit.hpp"

#include <cmath>

#include "qarlab/families.hpp"
#include "qarlab/threads.hpp"

namespace qarlab {

QarModel Scenario::model() const {
    auto curve = [&](const std::vector<KumaraswamyParams>& comps,
                     double lambda) {
        if (K == 1) return MonotoneCurve(comps[0]);
        return MonotoneCurve(comps, {lambda, 1.0 - lambda});
    };
    return QarModel({curve(eta1_components, lambda1),
                     curve(eta2_components, lambda2)});
}

Scenario scenario_catalog(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "SC1") {
        s.K = 1;
        s.eta1_components = {{0.5, 2.0}};
        s.eta2_components = {{0.5, 2.0}};
    } else if (name == "SC2") {
        s.K = 1;
        s.eta1_components = {{4.0, 4.0}};
        s.eta2_components = {{1.0, 2.0}};
    } else if (name == "SC3") {
        s.K = 1;
        s.eta1_components = {{0.5, 2.0}};
        s.eta2_components = {{2.0, 1.0}};
    } else if (name == "SC4") {
        s.K = 1;
        s.eta1_components = {{0.3, 6.0}};
        s.eta2_components = {{12.0, 8.0}};
    } else if (name == "SC5") {
        s.K = 2;
        s.eta1_components = {{0.5, 2.0}, {4.0, 8.0}};
        s.eta2_components = {{0.5, 2.0}, {4.0, 8.0}};
        s.lambda1 = 0.3;
        s.lambda2 = 0.3;
    } else if (name == "SC6") {
        s.K = 2;
        s.eta1_components = {{0.5, 2.0}, {0.3, 6.0}};
        s.eta2_components = {{1.0, 1.0}, {12.0, 8.0}};
        s.lambda1 = 0.4;
        s.lambda2 = 0.1;
    } else if (name == "SC7") {
        s.K = 2;
        s.eta1_components = {{3.0, 0.5}, {2.0, 1.0}};
        s.eta2_components = {{1.0, 2.0}, {0.5, 1.0}};
        s.lambda1 = 0.2;
        s.lambda2 = 0.4;
    } else {
        throw DomainError("unknown scenario: " + name);
    }
    return s;
}

std::vector<double> simulate_qar(const QarModel& m, int T, int warmup,
                                 std::uint64_t seed) {
    if (T < 1) throw DomainError("need T >= 1");
    if (warmup < 0) throw DomainError("warmup must be nonnegative");
    const int p = m.order();
    Rng rng(seed);
    std::vector<double> lags(p, 0.5);
    std::vector<double> out;
    out.reserve(T);
    for (int t = 0; t < warmup + T; ++t) {
        const double y = conditional_quantile(m, rng.uniform(), lags);
        for (int j = p - 1; j > 0; --j) lags[j] = lags[j - 1];
        lags[0] = y;
        if (t >= warmup) out.push_back(y);
    }
    return out;
}

BivariateSeries simulate_bivariate(const BivariateQarModel& m, int T,
                                   int warmup, std::uint64_t seed) {
    if (T < 1) throw DomainError("need T >= 1");
    Rng rng(seed);
    const double c = std::sqrt(1.0 - m.rho * m.rho);
    double lag1 = 0.5, lag2 = 0.5;
    BivariateSeries out;
    out.y_max.reserve(T);
    out.y_min.reserve(T);
    for (int t = 0; t < warmup + T; ++t) {
        const double z1 = rng.normal();
        const double z2 = m.rho * z1 + c * rng.normal();
        const double l1[] = {lag1}, l2[] = {lag2};
        const double y1 = conditional_quantile(m.model_max, normal_cdf(z1), l1);
        const double y2 = conditional_quantile(m.model_min, normal_cdf(z2), l2);
        lag1 = y1;
        lag2 = y2;
        if (t >= warmup) {
            out.y_max.push_back(y1);
            out.y_min.push_back(y2);
        }
    }
    return out;
}

Eigen::MatrixXd simulate_spatial(const SpatialQarModel& m,
                                 const StationSet& stations, int T, int warmup,
                                 std::uint64_t seed) {
    if (T < 1) throw DomainError("need T >= 1");
    const int n = stations.size();
    if (m.log_fields.cols() != n)
        throw DomainError("model fields must match the station set");
    if (!(m.gamma >= 0.0 && m.gamma <= 1.0))
        throw DomainError("gamma must lie in [0,1]");

    Eigen::MatrixXd Rc = m.gamma * exp_corr_matrix(stations, m.copula_phi);
    Rc.diagonal().array() += 1.0 - m.gamma;
    Eigen::LLT<Eigen::MatrixXd> llt(Rc.selfadjointView<Eigen::Lower>());
    if (llt.info() != Eigen::Success)
        throw NumericError("copula correlation is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();

    std::vector<QarModel> site_models;
    site_models.reserve(n);
    for (int i = 0; i < n; ++i) site_models.push_back(m.site_model(i));

    Rng rng(seed);
    Eigen::VectorXd xi(n);
    Eigen::VectorXd lag = Eigen::VectorXd::Constant(n, 0.5);
    Eigen::MatrixXd out(T, n);
    for (int t = 0; t < warmup + T; ++t) {
        for (int i = 0; i < n; ++i) xi[i] = rng.normal();
        const Eigen::VectorXd z = L * xi;
        for (int i = 0; i < n; ++i) {
            const double l[] = {lag[i]};
            const double y =
                conditional_quantile(site_models[i], normal_cdf(z[i]), l);
            lag[i] = y;
            if (t >= warmup) out(t - warmup, i) = y;
        }
    }
    return out;
}

CoverageResult coverage_study(const Scenario& scenario, int B, int T,
                              double level, const TauGrid& grid,
                              const ChainConfig& cfg, int threads) {
    if (B < 1) throw DomainError("need at least one replicate");
    if (!(level > 0.0 && level < 1.0)) throw DomainError("invalid level");

    const QarModel truth = scenario.model();
    const ThetaGrids truth_grids = theta_curves(truth, grid.values);
    const int G = grid.size();

    struct Replicate {
        bool ok = false;
        std::vector<char> cover0, cover1;
    };
    std::vector<Replicate> reps(B);

    parallel_for(B, threads, [&](int b) {
        Replicate& r = reps[b];
        try {
            const std::uint64_t sim_seed = cfg.seed + static_cast<std::uint64_t>(b);
            const std::vector<double> y = simulate_qar(truth, T, 100, sim_seed);

            Target target = make_qar_target(1, scenario.K, y);
            ChainConfig rep_cfg = cfg;
            // decouple the chain stream from the simulation stream
            rep_cfg.seed = sim_seed ^ 0x9e3779b97f4a7c15ull;
            const PosteriorDraws draws = run_chain(target, rep_cfg);

            const double alpha = (1.0 - level) / 2.0;
            const int nd = draws.draw_count();
            Eigen::MatrixXd theta0(nd, G), theta1(nd, G);
            for (int i = 0; i < nd; ++i) {
                const QarModel m = qar_model_from_row(
                    1, scenario.K, draws.samples.row(i).transpose());
                for (int g = 0; g < G; ++g) {
                    const double base = m.curves[1].eval(grid.values[g]);
                    theta0(i, g) = base;
                    theta1(i, g) = m.curves[0].eval(grid.values[g]) - base;
                }
            }
            std::vector<double> col0(nd), col1(nd);
            r.cover0.assign(G, 0);
            r.cover1.assign(G, 0);
            for (int g = 0; g < G; ++g) {
                for (int i = 0; i < nd; ++i) {
                    col0[i] = theta0(i, g);
                    col1[i] = theta1(i, g);
                }
                const double lo0 = empirical_quantile(col0, alpha);
                const double hi0 = empirical_quantile(col0, 1.0 - alpha);
                const double lo1 = empirical_quantile(col1, alpha);
                const double hi1 = empirical_quantile(col1, 1.0 - alpha);
                r.cover0[g] = truth_grids.theta[0][g] >= lo0 &&
                              truth_grids.theta[0][g] <= hi0;
                r.cover1[g] = truth_grids.theta[1][g] >= lo1 &&
                              truth_grids.theta[1][g] <= hi1;
            }
            r.ok = true;
        } catch (const std::exception&) {
            r.ok = false;
        }
    });

    CoverageResult out;
    out.tau = grid.values;
    out.cvg_theta0.assign(G, 0.0);
    out.cvg_theta1.assign(G, 0.0);
    out.B = B;
    out.T = T;
    out.level = level;
    int ok = 0;
    for (const auto& r : reps) {
        if (!r.ok) {
            ++out.failed_replicates;
            continue;
        }
        ++ok;
        for (int g = 0; g < G; ++g) {
            out.cvg_theta0[g] += r.cover0[g];
            out.cvg_theta1[g] += r.cover1[g];
        }
    }
    if (ok == 0) throw NumericError("all coverage replicates failed");
    double a0 = 0.0, a1 = 0.0;
    for (int g = 0; g < G; ++g) {
        out.cvg_theta0[g] /= ok;
        out.cvg_theta1[g] /= ok;
        a0 += out.cvg_theta0[g];
        a1 += out.cvg_theta1[g];
    }
    out.avg_theta0 = a0 / G;
    out.avg_theta1 = a1 / G;
    return out;
}

} // namespace qarlab
