#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qarlab/families.hpp"
#include "qarlab/simkit.hpp"
#include "qarlab/threads.hpp"

using namespace qarlab;

namespace {

double sample_corr(const std::vector<double>& a, const std::vector<double>& b) {
    const int n = static_cast<int>(a.size());
    double ma = 0.0, mb = 0.0;
    for (int i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (int i = 0; i < n; ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

double lag1_autocorr(const std::vector<double>& y) {
    std::vector<double> a(y.begin(), y.end() - 1), b(y.begin() + 1, y.end());
    return sample_corr(a, b);
}

} // namespace

TEST_CASE("scenario catalog parameters") {
    const Scenario sc2 = scenario_catalog("SC2");
    CHECK(sc2.K == 1);
    CHECK(sc2.eta1_components[0].a == 4.0);
    CHECK(sc2.eta1_components[0].b == 4.0);
    CHECK(sc2.eta2_components[0].a == 1.0);
    CHECK(sc2.eta2_components[0].b == 2.0);

    const Scenario sc5 = scenario_catalog("SC5");
    CHECK(sc5.K == 2);
    CHECK(sc5.lambda1 == 0.3);
    CHECK(sc5.lambda2 == 0.3);
    CHECK(sc5.eta1_components[0].a == 0.5);
    CHECK(sc5.eta1_components[1].b == 8.0);

    const Scenario sc7 = scenario_catalog("SC7");
    CHECK(sc7.eta1_components[0].a == 3.0);
    CHECK(sc7.eta1_components[0].b == 0.5);
    CHECK(sc7.lambda1 == 0.2);
    CHECK(sc7.lambda2 == 0.4);

    CHECK_THROWS_AS(scenario_catalog("SC8"), DomainError);
}

TEST_CASE("SC1 and SC5 are independence scenarios") {
    const std::vector<double> grid{0.05, 0.3, 0.5, 0.8, 0.95};
    for (const char* name : {"SC1", "SC5"}) {
        const ThetaGrids tg =
            theta_curves(scenario_catalog(name).model(), grid);
        for (double v : tg.theta[1])
            CHECK(v == doctest::Approx(0.0).epsilon(1e-14));
    }
}

TEST_CASE("SC4 slope at the median") {
    // hand evaluation of the two cdfs
    const double f1 = 1.0 - std::pow(1.0 - std::pow(0.5, 0.3), 6.0);
    const double f2 = 1.0 - std::pow(1.0 - std::pow(0.5, 12.0), 8.0);
    const ThetaGrids tg = theta_curves(scenario_catalog("SC4").model(),
                                       std::vector<double>{0.5});
    CHECK(tg.theta[1][0] == doctest::Approx(f1 - f2).epsilon(1e-12));
    CHECK(tg.theta[1][0] > 0.78);
}

TEST_CASE("paper-described scenario spans hold") {
    // SC3's slope sweeps roughly 0.2 -> 0.7 below tau = 0.75
    const TauGrid grid = TauGrid::standard();
    const ThetaGrids sc3 = theta_curves(scenario_catalog("SC3").model(),
                                        grid.values);
    double lo = 1.0, hi = -1.0;
    for (int g = 0; g < grid.size(); ++g) {
        if (grid.values[g] >= 0.75) continue;
        lo = std::min(lo, sc3.theta[1][g]);
        hi = std::max(hi, sc3.theta[1][g]);
    }
    CHECK(lo == doctest::Approx(0.2).epsilon(0.1));
    CHECK(hi == doctest::Approx(0.7).epsilon(0.1));

    // SC4 stays within 0.78 .. 1 below tau = 0.75
    const ThetaGrids sc4 = theta_curves(scenario_catalog("SC4").model(),
                                        grid.values);
    for (int g = 0; g < grid.size(); ++g) {
        if (grid.values[g] >= 0.75) continue;
        CHECK(sc4.theta[1][g] >= 0.78);
        CHECK(sc4.theta[1][g] <= 1.0);
    }
}

TEST_CASE("simulate_qar basics") {
    const QarModel ident({MonotoneCurve{KumaraswamyParams{1, 1}},
                          MonotoneCurve{KumaraswamyParams{1, 1}}});
    const auto y = simulate_qar(ident, 10000, 100, 5);
    CHECK(std::abs(lag1_autocorr(y)) < 0.05);
    for (double v : y) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }

    const auto y2 = simulate_qar(ident, 10000, 100, 5);
    CHECK(y == y2);
    const auto y3 = simulate_qar(ident, 100, 100, 6);
    CHECK(y3.size() == 100);
}

TEST_CASE("SC1 marginal distribution") {
    // with identical curves the series is IID with cdf eta^{-1}
    const Scenario sc1 = scenario_catalog("SC1");
    const auto y = simulate_qar(sc1.model(), 10000, 100, 17);
    std::vector<double> sorted = y;
    std::sort(sorted.begin(), sorted.end());
    const KumaraswamyParams p{0.5, 2.0};
    double ks = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double cdf = kuma_quantile(sorted[i], p);
        const double ecdf_hi = static_cast<double>(i + 1) / sorted.size();
        const double ecdf_lo = static_cast<double>(i) / sorted.size();
        ks = std::max(ks, std::max(std::abs(ecdf_hi - cdf),
                                   std::abs(ecdf_lo - cdf)));
    }
    // 1% Kolmogorov-Smirnov critical value
    CHECK(ks < 1.63 / std::sqrt(10000.0));
}

TEST_CASE("scenario likelihoods are finite at the truth") {
    for (const char* name : {"SC1", "SC2", "SC3", "SC4", "SC5", "SC6", "SC7"}) {
        const QarModel m = scenario_catalog(name).model();
        const auto y = simulate_qar(m, 150, 100, 23);
        CHECK(std::isfinite(log_likelihood(m, y)));
    }
}

TEST_CASE("simulate_bivariate dependence") {
    const QarModel ident({MonotoneCurve{KumaraswamyParams{1, 1}},
                          MonotoneCurve{KumaraswamyParams{1, 1}}});
    for (double rho : {0.0, 0.6}) {
        const BivariateQarModel m{ident, ident, rho};
        const BivariateSeries s = simulate_bivariate(m, 10000, 50, 29);
        // identity marginals: the series values are the copula levels
        std::vector<double> z1, z2;
        for (std::size_t t = 0; t < s.y_max.size(); ++t) {
            z1.push_back(normal_quantile(s.y_max[t]));
            z2.push_back(normal_quantile(s.y_min[t]));
        }
        CHECK(std::abs(sample_corr(z1, z2) - rho) < 0.05);
    }
}

TEST_CASE("simulate_spatial dependence") {
    // two nearly coincident sites under a fully spatial copula
    const StationSet close = StationSet::create(
        {"a", "b"}, {{0.0, 0.0}, {1e-6, 0.0}});
    SpatialQarModel m;
    m.log_fields = Eigen::MatrixXd::Zero(4, 2);
    for (auto& h : m.hypers) h = GpHyper{0.0, 1.0, 1.0};
    m.copula_phi = 1.0;

    m.gamma = 1.0 - 1e-12;
    const Eigen::MatrixXd y = simulate_spatial(m, close, 4000, 20, 31);
    std::vector<double> z1, z2;
    for (int t = 0; t < y.rows(); ++t) {
        z1.push_back(normal_quantile(y(t, 0)));
        z2.push_back(normal_quantile(y(t, 1)));
    }
    CHECK(sample_corr(z1, z2) > 0.99);

    m.gamma = 1e-12;
    const Eigen::MatrixXd y0 = simulate_spatial(m, close, 4000, 20, 31);
    z1.clear();
    z2.clear();
    for (int t = 0; t < y0.rows(); ++t) {
        z1.push_back(normal_quantile(y0(t, 0)));
        z2.push_back(normal_quantile(y0(t, 1)));
    }
    CHECK(std::abs(sample_corr(z1, z2)) < 0.05);
}

TEST_CASE("coverage study smoke") {
    const Scenario sc1 = scenario_catalog("SC1");
    const TauGrid grid = TauGrid::make({0.1, 0.5, 0.9});
    ChainConfig cfg;
    cfg.iterations = 800;
    cfg.burn_in = 400;
    cfg.thin = 2;
    cfg.seed = 1000;
    const CoverageResult r = coverage_study(sc1, 2, 60, 0.9, grid, cfg, 2);
    CHECK(r.B == 2);
    CHECK(r.failed_replicates == 0);
    for (double v : r.cvg_theta0) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    CHECK(r.avg_theta0 >= 0.0);
    CHECK(r.avg_theta1 <= 1.0);
}

TEST_CASE("SC2 point recovery of the central slope") {
    // posterior means of theta1(0.5) across replicates stay near the truth
    const Scenario sc2 = scenario_catalog("SC2");
    const double truth = -0.5224761962890625;
    const TauGrid grid = TauGrid::make({0.5});
    ChainConfig cfg;
    cfg.iterations = 6000;
    cfg.burn_in = 3000;
    cfg.thin = 3;
    cfg.seed = 40;

    const int B = 20;
    std::vector<double> means(B);
    parallel_for(B, 0, [&](int b) {
        const auto y = simulate_qar(sc2.model(), 150, 100, cfg.seed + b);
        Target t = make_qar_target(1, 1, y);
        ChainConfig rep = cfg;
        rep.seed = cfg.seed + 1000 + b;
        const PosteriorDraws draws = run_chain(t, rep);
        double acc = 0.0;
        for (int i = 0; i < draws.draw_count(); ++i) {
            const QarModel m =
                qar_model_from_row(1, 1, draws.samples.row(i).transpose());
            acc += m.curves[0].eval(0.5) - m.curves[1].eval(0.5);
        }
        means[b] = acc / draws.draw_count();
    });
    const double avg =
        std::accumulate(means.begin(), means.end(), 0.0) / B;
    CHECK(std::abs(avg - truth) <= 0.1);
}
