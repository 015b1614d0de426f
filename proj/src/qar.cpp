#include "qarlab/qar.hpp"

#include <cmath>
#include <string>

namespace qarlab {

namespace {

constexpr double kLevelClamp = 1e-12;
constexpr double kDerivFloor = 1e-300;

void check_lags(const QarModel& m, std::span<const double> lags) {
    if (static_cast<int>(lags.size()) != m.order())
        throw DomainError("expected " + std::to_string(m.order()) + " lag values");
    for (double v : lags)
        if (!(v >= 0.0 && v <= 1.0))
            throw DomainError("lag values must lie in [0,1]");
}

} // namespace

QarModel::QarModel(std::vector<MonotoneCurve> curves_, std::vector<double> pi)
    : curves(std::move(curves_)), lag_weights(std::move(pi)) {
    if (curves.size() < 2)
        throw DomainError("a QAR model needs p+1 >= 2 curves");
    const int p = order();
    if (lag_weights.empty() && p == 1) lag_weights = {1.0};
    if (static_cast<int>(lag_weights.size()) != p)
        throw DomainError("expected p lag weights");
    double sum = 0.0;
    for (double w : lag_weights) {
        if (!(w >= 0.0)) throw DomainError("lag weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw DomainError("lag weights must sum to 1");
}

double conditional_quantile(const QarModel& m, double tau,
                            std::span<const double> lags) {
    check_lags(m, lags);
    double q = 0.0;
    double w = 0.0;
    for (std::size_t j = 0; j < lags.size(); ++j) {
        const double c = m.lag_weights[j] * lags[j];
        if (c != 0.0) q += c * m.curves[j].eval(tau);
        w += c;
    }
    q += (1.0 - w) * m.curves.back().eval(tau);
    return q;
}

ThetaGrids theta_curves(const QarModel& m, std::span<const double> tau_grid) {
    ThetaGrids out;
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    const int p = m.order();
    out.theta.assign(p + 1, std::vector<double>(tau_grid.size()));
    for (std::size_t g = 0; g < tau_grid.size(); ++g) {
        const double base = m.curves.back().eval(tau_grid[g]);
        out.theta[0][g] = base;
        for (int j = 0; j < p; ++j)
            out.theta[j + 1][g] =
                m.lag_weights[j] * (m.curves[j].eval(tau_grid[g]) - base);
    }
    return out;
}

double inverse_tau(const QarModel& m, double y, std::span<const double> lags,
                   const RootConfig& cfg) {
    check_lags(m, lags);
    if (!(y > 0.0 && y < 1.0))
        throw DomainError("inverse level requires y strictly inside (0,1)");
    const double root = brent(
        [&](double tau) { return conditional_quantile(m, tau, lags) - y; }, 0.0,
        1.0, cfg);
    return std::min(1.0 - kLevelClamp, std::max(kLevelClamp, root));
}

namespace {

double quantile_deriv_at(const QarModel& m, double u,
                         std::span<const double> lags) {
    double d = 0.0;
    double w = 0.0;
    for (std::size_t j = 0; j < lags.size(); ++j) {
        const double c = m.lag_weights[j] * lags[j];
        if (c != 0.0) d += c * m.curves[j].deriv(u);
        w += c;
    }
    d += (1.0 - w) * m.curves.back().deriv(u);
    return d;
}

} // namespace

double conditional_density(const QarModel& m, double y,
                           std::span<const double> lags,
                           const RootConfig& cfg) {
    const double u = inverse_tau(m, y, lags, cfg);
    const double d = quantile_deriv_at(m, u, lags);
    if (!std::isfinite(d) || d < kDerivFloor)
        throw NumericError("degenerate quantile derivative in density");
    return 1.0 / d;
}

double log_likelihood(const QarModel& m, std::span<const double> y,
                      QuantileLevelPath* path, const RootConfig& cfg) {
    const int p = m.order();
    const int T = static_cast<int>(y.size());
    if (T < p + 1)
        throw DomainError("series too short for the model order");
    for (int t = 0; t < T; ++t)
        if (!(y[t] > 0.0 && y[t] < 1.0))
            throw DomainError("series values must lie strictly inside (0,1) at t=" +
                              std::to_string(t + 1));
    if (path) {
        path->u.clear();
        path->u.reserve(T - p);
    }
    std::vector<double> lags(p);
    double ll = 0.0;
    for (int t = p; t < T; ++t) {
        for (int j = 0; j < p; ++j) lags[j] = y[t - 1 - j];
        const double u = inverse_tau(m, y[t], lags, cfg);
        const double d = quantile_deriv_at(m, u, lags);
        if (!std::isfinite(d) || d < kDerivFloor)
            throw NumericError("degenerate quantile derivative at t=" +
                               std::to_string(t + 1));
        const double term = std::log(d);
        if (!std::isfinite(term))
            throw NumericError("nonfinite likelihood term at t=" +
                               std::to_string(t + 1));
        ll -= term;
        if (path) path->u.push_back(u);
    }
    return ll;
}

Kx2006Model::Kx2006Model(double mu_, double sigma_, double g0, double g1)
    : mu(mu_), sigma(sigma_), gamma0(g0), gamma1(g1) {
    if (!(sigma > 0.0) || !(gamma0 > 0.0 && gamma0 < 1.0) || !(gamma1 > 0.0))
        throw DomainError("invalid KX2006 parameters");
}

double kx2006_quantile(const Kx2006Model& m, double tau, double y_prev) {
    if (!(y_prev >= 0.0))
        throw DomainError("KX2006 conditions on nonnegative lag values");
    if (!(tau > 0.0 && tau < 1.0))
        throw DomainError("quantile level must lie strictly inside (0,1)");
    const double slope = std::min(m.gamma0 + m.gamma1 * tau, 1.0);
    return m.mu + m.sigma * normal_quantile(tau) + slope * y_prev;
}

double kx2006_quantile_deriv(const Kx2006Model& m, double tau, double y_prev) {
    const double z = normal_quantile(tau);
    double d = m.sigma / normal_pdf(z);
    if (m.gamma0 + m.gamma1 * tau < 1.0) d += m.gamma1 * y_prev;
    return d;
}

double kx2006_inverse_tau(const Kx2006Model& m, double y, double y_prev,
                          const RootConfig& cfg) {
    const double lo = kLevelClamp, hi = 1.0 - kLevelClamp;
    if (!(y > kx2006_quantile(m, lo, y_prev)) ||
        !(y < kx2006_quantile(m, hi, y_prev)))
        throw NumericError("observation outside the solvable quantile range");
    return brent([&](double tau) { return kx2006_quantile(m, tau, y_prev) - y; },
                 lo, hi, cfg);
}

double kx2006_log_likelihood(const Kx2006Model& m, std::span<const double> raw,
                             const RootConfig& cfg) {
    const int T = static_cast<int>(raw.size());
    if (T < 2) throw DomainError("series too short");
    for (int t = 0; t < T; ++t)
        if (!(raw[t] >= 0.0) || !std::isfinite(raw[t]))
            throw DomainError("KX2006 requires nonnegative data at t=" +
                              std::to_string(t + 1));
    double ll = 0.0;
    for (int t = 1; t < T; ++t) {
        double u;
        try {
            u = kx2006_inverse_tau(m, raw[t], raw[t - 1], cfg);
        } catch (const NumericError&) {
            throw NumericError("KX2006 root bracket failure at t=" +
                               std::to_string(t + 1));
        }
        const double d = kx2006_quantile_deriv(m, u, raw[t - 1]);
        if (!std::isfinite(d) || d < kDerivFloor)
            throw NumericError("degenerate derivative at t=" + std::to_string(t + 1));
        ll -= std::log(d);
    }
    return ll;
}

} // namespace qarlab
