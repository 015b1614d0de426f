#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "qarlab/families.hpp"
#include "qarlab/mcmc.hpp"

using namespace qarlab;

namespace {

Target gaussian_target(int d) {
    Target t;
    for (int i = 0; i < d; ++i)
        t.spec.blocks.push_back({"z" + std::to_string(i + 1),
                                 Transform::Identity, PriorKind::None});
    t.log_lik = [](const Eigen::VectorXd& c) { return -0.5 * c.squaredNorm(); };
    return t;
}

double batch_mean_se(const Eigen::VectorXd& x, int batches) {
    const int len = static_cast<int>(x.size()) / batches;
    Eigen::VectorXd means(batches);
    for (int b = 0; b < batches; ++b)
        means[b] = x.segment(static_cast<Eigen::Index>(b) * len, len).mean();
    const double mu = means.mean();
    double var = 0.0;
    for (int b = 0; b < batches; ++b) var += (means[b] - mu) * (means[b] - mu);
    var /= (batches - 1);
    return std::sqrt(var / batches);
}

} // namespace

TEST_CASE("parameter transforms") {
    ParamSpec spec;
    spec.blocks = {
        {"loga", Transform::Log, PriorKind::Normal, 0, 1, 0.0, 3.0},
        {"lambda1", Transform::Logit, PriorKind::Uniform, 0.0, 0.5},
        {"rho", Transform::Logit, PriorKind::Uniform, -1.0, 1.0},
    };
    ParamBlock pi;
    pi.name = "pi";
    pi.transform = Transform::Simplex;
    pi.zdim = 2;
    spec.blocks.push_back(pi);

    CHECK(spec.unconstrained_dim() == 5);
    CHECK(spec.constrained_dim() == 6);

    const Eigen::VectorXd z = Eigen::VectorXd::Zero(5);
    const Eigen::VectorXd c = spec.to_constrained(z);
    CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-14));   // exp(0)
    CHECK(c[1] == doctest::Approx(0.25).epsilon(1e-14));  // midpoint of (0, 1/2)
    CHECK(c[2] == doctest::Approx(0.0).epsilon(1e-14));   // midpoint of (-1, 1)
    for (int i = 3; i < 6; ++i)
        CHECK(c[i] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    // round trip through the inverse map
    Eigen::VectorXd z2(5);
    z2 << 0.7, -0.9, 1.3, 0.4, -0.2;
    const Eigen::VectorXd back = spec.to_unconstrained(spec.to_constrained(z2));
    for (int i = 0; i < 5; ++i)
        CHECK(back[i] == doctest::Approx(z2[i]).epsilon(1e-10));

    const auto names = spec.names();
    CHECK(names.size() == 6);
    CHECK(names[3] == "pi1");
    CHECK(names[5] == "pi3");
}

TEST_CASE("log posterior of the zero-initialized QAR1K1 target") {
    std::vector<double> y{0.3, 0.6, 0.2, 0.8, 0.5};
    const Target t = make_qar_target(1, 1, y);
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(4);

    // identity curves score zero; each log-scale prior contributes a
    // N(0, 3^2) density at zero with no Jacobian correction
    const double per_param =
        -std::log(3.0 * std::sqrt(2.0 * std::numbers::pi));
    CHECK(per_param == doctest::Approx(-2.0175508218727822).epsilon(1e-12));
    CHECK(log_posterior(t, z) ==
          doctest::Approx(4.0 * per_param).epsilon(1e-12));
}

TEST_CASE("likelihood failures reject instead of aborting") {
    Target t = gaussian_target(1);
    t.log_lik = [](const Eigen::VectorXd& c) -> double {
        if (c[0] > 0.2) throw NumericError("synthetic failure");
        return 0.0;
    };
    const Eigen::VectorXd bad = Eigen::VectorXd::Constant(1, 1.0);
    CHECK(log_posterior(t, bad) == -std::numeric_limits<double>::infinity());

    ChainConfig cfg;
    cfg.iterations = 2000;
    cfg.burn_in = 500;
    cfg.thin = 1;
    cfg.seed = 99;
    const PosteriorDraws draws = run_chain(t, cfg);
    for (int i = 0; i < draws.draw_count(); ++i)
        CHECK(draws.samples(i, 0) <= 0.2);
}

TEST_CASE("chains are deterministic given the seed") {
    Target t = gaussian_target(3);
    ChainConfig cfg;
    cfg.iterations = 4000;
    cfg.burn_in = 1000;
    cfg.thin = 2;
    cfg.seed = 2024;
    const PosteriorDraws a = run_chain(t, cfg);
    const PosteriorDraws b = run_chain(t, cfg);
    CHECK(a.samples == b.samples);
    CHECK(a.acceptance_rate == b.acceptance_rate);

    cfg.seed = 2025;
    const PosteriorDraws c = run_chain(t, cfg);
    CHECK(a.samples != c.samples);
}

TEST_CASE("adaptive chain recovers a 2-d standard normal") {
    Target t = gaussian_target(2);
    ChainConfig cfg;
    cfg.iterations = 30000;
    cfg.burn_in = 5000;
    cfg.thin = 1;
    cfg.seed = 314;
    const PosteriorDraws draws = run_chain(t, cfg);

    CHECK(draws.adapted_acceptance_rate > 0.15);
    CHECK(draws.adapted_acceptance_rate < 0.45);

    for (int j = 0; j < 2; ++j) {
        const Eigen::VectorXd col = draws.samples.col(j);
        const double se = batch_mean_se(col, 40);
        CHECK(std::abs(col.mean()) < 3.0 * se);
        const double var =
            (col.array() - col.mean()).square().sum() / (col.size() - 1);
        CHECK(var == doctest::Approx(1.0).epsilon(0.12));
    }
}

TEST_CASE("proposal covariance stays nondegenerate") {
    Target t = gaussian_target(3);
    ChainConfig cfg;
    cfg.iterations = 3000;
    cfg.burn_in = 1000;
    cfg.thin = 5;
    cfg.seed = 4;
    const PosteriorDraws draws = run_chain(t, cfg);
    REQUIRE(draws.proposal_cov.size() == 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(draws.proposal_cov[0]);
    const double floor = cfg.adapt_eps * 2.38 * 2.38 / 3.0;
    CHECK(eig.eigenvalues().minCoeff() >= floor - 1e-15);
}

TEST_CASE("retained draws satisfy the constrained-space invariants") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.05, 0.95);
    std::vector<double> y(40);
    for (double& v : y) v = unif(rng);

    Target t = make_qar_target(2, 2, y);
    ChainConfig cfg;
    cfg.iterations = 1500;
    cfg.burn_in = 500;
    cfg.thin = 5;
    cfg.seed = 12;
    const PosteriorDraws draws = run_chain(t, cfg);
    const auto names = t.spec.names();
    REQUIRE(names.size() == static_cast<std::size_t>(draws.samples.cols()));
    for (int i = 0; i < draws.draw_count(); ++i) {
        double pi_sum = 0.0;
        for (int j = 0; j < draws.samples.cols(); ++j) {
            const double v = draws.samples(i, j);
            const std::string& n = names[j];
            if (n.find(".a") != std::string::npos ||
                n.find(".b") != std::string::npos)
                CHECK(v > 0.0);
            if (n.find("lambda1") != std::string::npos) {
                CHECK(v > 0.0);
                CHECK(v < 0.5);
            }
            if (n.rfind("pi", 0) == 0) pi_sum += v;
        }
        CHECK(pi_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("detailed balance smoke test on a binned 1-d normal") {
    Target t = gaussian_target(1);
    ChainConfig cfg;
    cfg.iterations = 110000;
    cfg.burn_in = 10000;
    cfg.thin = 20; // damp autocorrelation so multinomial bands apply
    cfg.seed = 777;
    const PosteriorDraws draws = run_chain(t, cfg);
    const int N = draws.draw_count();

    const std::vector<double> edges{-1e30, -1.5, -1.0, -0.5, 0.0,
                                    0.5,   1.0,  1.5,  1e30};
    std::vector<int> counts(edges.size() - 1, 0);
    for (int i = 0; i < N; ++i) {
        const double v = draws.samples(i, 0);
        for (std::size_t b = 0; b + 1 < edges.size(); ++b)
            if (v >= edges[b] && v < edges[b + 1]) {
                ++counts[b];
                break;
            }
    }
    for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
        const double p = normal_cdf(std::min(edges[b + 1], 50.0)) -
                         normal_cdf(std::max(edges[b], -50.0));
        const double sd = std::sqrt(N * p * (1.0 - p));
        CHECK(std::abs(counts[b] - N * p) <= 3.0 * sd);
    }
}

TEST_CASE("all-rejection window raises a warning") {
    Target t = gaussian_target(1);
    t.log_lik = [](const Eigen::VectorXd& c) -> double {
        // only the exact origin has support: every proposal is rejected
        return c[0] == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
    };
    ChainConfig cfg;
    cfg.iterations = 1200;
    cfg.burn_in = 600;
    cfg.thin = 1;
    cfg.seed = 8;
    const PosteriorDraws draws = run_chain(t, cfg);
    REQUIRE_FALSE(draws.warnings.empty());
    bool found = false;
    for (const auto& w : draws.warnings)
        if (w.find("acceptance below 1%") != std::string::npos) found = true;
    CHECK(found);
}

TEST_CASE("summarize") {
    PosteriorDraws d;
    d.names = {"x", "c"};
    d.samples.resize(100, 2);
    for (int i = 0; i < 100; ++i) {
        d.samples(i, 0) = i + 1;
        d.samples(i, 1) = 7.5;
    }
    const double levels[] = {0.9};
    const auto s = summarize(d, levels);
    REQUIRE(s.size() == 2);
    CHECK(s[0].mean == doctest::Approx(50.5).epsilon(1e-14));
    CHECK(s[0].intervals.at(0.9).first == doctest::Approx(5.95).epsilon(1e-12));
    CHECK(s[0].intervals.at(0.9).second ==
          doctest::Approx(95.05).epsilon(1e-12));
    CHECK(s[1].mean == doctest::Approx(7.5).epsilon(1e-14));
    CHECK(s[1].intervals.at(0.9).first == doctest::Approx(7.5).epsilon(1e-14));
    CHECK(s[1].intervals.at(0.9).second == doctest::Approx(7.5).epsilon(1e-14));
}

TEST_CASE("posterior functionals") {
    const MonotoneCurve up{KumaraswamyParams{2, 1}};
    const MonotoneCurve down{KumaraswamyParams{1, 2}};
    const MonotoneCurve ident{KumaraswamyParams{1, 1}};

    FunctionalRequest req;
    req.tau_grid = {0.1, 0.3, 0.5, 0.7, 0.9};
    req.lags = {0.4};
    req.y_grid = {0.25, 0.5, 0.75};

    // single draw reproduces that draw's curves exactly
    const QarModel single({up, down});
    const auto one = posterior_functionals([&](int) { return single; }, 1, req);
    const ThetaGrids tg = theta_curves(single, req.tau_grid);
    for (std::size_t g = 0; g < req.tau_grid.size(); ++g) {
        CHECK(one.theta[0].mean[g] ==
              doctest::Approx(tg.theta[0][g]).epsilon(1e-14));
        CHECK(one.theta[1].mean[g] ==
              doctest::Approx(tg.theta[1][g]).epsilon(1e-14));
    }

    // two draws with mirrored slopes: the posterior mean slope vanishes
    const QarModel plus({up, ident});
    const QarModel minus({ident, up});
    const auto two = posterior_functionals(
        [&](int b) { return b == 0 ? plus : minus; }, 2, req);
    for (std::size_t g = 0; g < req.tau_grid.size(); ++g)
        CHECK(two.theta[1].mean[g] == doctest::Approx(0.0).epsilon(1e-13));

    // identity draws: posterior mean quantile is tau, density one
    const QarModel id2({ident, ident});
    const auto idf = posterior_functionals([&](int) { return id2; }, 3, req);
    for (std::size_t g = 0; g < req.tau_grid.size(); ++g)
        CHECK(idf.quantile.mean[g] ==
              doctest::Approx(req.tau_grid[g]).epsilon(1e-12));
    for (std::size_t i = 0; i < req.y_grid.size(); ++i)
        CHECK(idf.density.mean[i] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(idf.draws_used == 3);
    CHECK(idf.draws_skipped == 0);
}

TEST_CASE("chain config validation") {
    Target t = gaussian_target(1);
    ChainConfig cfg;
    cfg.iterations = 100;
    cfg.burn_in = 100;
    CHECK_THROWS_AS(run_chain(t, cfg), DomainError);
    cfg.burn_in = 50;
    cfg.thin = 0;
    CHECK_THROWS_AS(run_chain(t, cfg), DomainError);
}
