#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "qarlab/qar.hpp"
#include "qarlab/support.hpp"

using namespace qarlab;

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

} // namespace

TEST_CASE("select_bounds closed form") {
    const auto s101 = linspace(0.0, 1.0, 101);
    const SupportBounds b = select_bounds(s101);
    CHECK(b.m == doctest::Approx(-0.01).epsilon(1e-14));
    CHECK(b.M == doctest::Approx(1.01).epsilon(1e-14));

    const std::vector<double> two{0.0, 1.0};
    const SupportBounds b2 = select_bounds(two);
    CHECK(b2.m == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(b2.M == doctest::Approx(2.0).epsilon(1e-14));

    const std::vector<double> constant{3.0, 3.0, 3.0};
    CHECK_THROWS_AS(select_bounds(constant), DomainError);
}

TEST_CASE("bounds strictly bracket the data") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss(10.0, 4.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> y(80);
        for (double& v : y) v = gauss(rng);
        const SupportBounds b = select_bounds(y);
        for (double v : y) {
            CHECK(v > b.m);
            CHECK(v < b.M);
        }
    }
}

TEST_CASE("transform examples and round trip") {
    const SupportBounds b{-0.01, 1.01};
    CHECK(to_unit(0.5, b) == doctest::Approx(0.5).epsilon(1e-14));
    // (0 + 0.01) / 1.02
    CHECK(to_unit(0.0, b) == doctest::Approx(0.01 / 1.02).epsilon(1e-14));
    CHECK(from_unit(0.5, {-1.0, 2.0}) == doctest::Approx(0.5).epsilon(1e-14));

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(-0.009, 1.009);
    for (int i = 0; i < 200; ++i) {
        const double v = unif(rng);
        CHECK(from_unit(to_unit(v, b), b) ==
              doctest::Approx(v).epsilon(1e-12));
    }
    CHECK_THROWS_AS(to_unit(-0.5, b), DomainError);
    CHECK_THROWS_AS(to_unit(1.02, b), DomainError);
}

TEST_CASE("automatic bounds place extremes at 1/(T+1) and T/(T+1)") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int T : {10, 53, 200}) {
        std::vector<double> y(T);
        for (double& v : y) v = gauss(rng);
        const SupportBounds b = select_bounds(y);
        const auto unit = to_unit(y, b);
        double lo = 1.0, hi = 0.0;
        for (double v : unit) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(std::abs(lo - 1.0 / (T + 1)) <= 1e-12);
        CHECK(std::abs(hi - static_cast<double>(T) / (T + 1)) <= 1e-12);
    }
}

TEST_CASE("original-scale intercept") {
    const MonotoneCurve ident{KumaraswamyParams{1, 1}};
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};

    // identity curves on (0,1): theta0*(tau) = tau
    const auto v = original_scale_intercept(ident, ident, {0.0, 1.0}, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(v[i] == doctest::Approx(grid[i]).epsilon(1e-14));

    // eta(0) = 0 pins theta0*(0) at m
    const auto w = original_scale_intercept(ident, ident, {3.0, 9.0},
                                            std::vector<double>{0.0});
    CHECK(w[0] == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("original-scale intercept hand case") {
    // curves engineered so eta1(0.5) = 0.6 and eta2(0.5) = 0.3
    // via single Kumaraswamy components: F(0.5|1,b) = 1 - 0.5^b
    const double b1 = std::log(0.4) / std::log(0.5);  // eta1(0.5) = 0.6
    const double b2 = std::log(0.7) / std::log(0.5);  // eta2(0.5) = 0.3
    const MonotoneCurve eta1{KumaraswamyParams{1.0, b1}};
    const MonotoneCurve eta2{KumaraswamyParams{1.0, b2}};
    const auto v = original_scale_intercept(eta1, eta2, {10.0, 40.0},
                                            std::vector<double>{0.5});
    CHECK(v[0] == doctest::Approx(16.0).epsilon(1e-12));
}

TEST_CASE("quantile functions commute with the affine support map") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logu(-1.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const QarModel m({MonotoneCurve{KumaraswamyParams{std::exp(logu(rng)),
                                                          std::exp(logu(rng))}},
                          MonotoneCurve{KumaraswamyParams{std::exp(logu(rng)),
                                                          std::exp(logu(rng))}}});
        const SupportBounds b{-2.0 + unif(rng), 5.0 + unif(rng)};
        const double y_raw = from_unit(unif(rng), b);
        const double y_unit = to_unit(y_raw, b);
        for (double tau : {0.05, 0.3, 0.5, 0.8, 0.95}) {
            const double lag[] = {y_unit};
            const double q_unit = conditional_quantile(m, tau, lag);
            CHECK(from_unit(q_unit, b) ==
                  doctest::Approx(b.m + (b.M - b.m) * q_unit).epsilon(1e-10));
        }
    }
}
