#include "qarlab/mqar.hpp"

#include <cmath>
#include <string>

namespace qarlab {

CopulaCorrelation::CopulaCorrelation(const Eigen::MatrixXd& R) {
    if (R.rows() != R.cols() || R.rows() < 1)
        throw DomainError("correlation matrix must be square");
    llt_.compute(R.selfadjointView<Eigen::Lower>());
    if (llt_.info() != Eigen::Success)
        throw NumericError("correlation matrix is not positive definite");
    log_det_ = 0.0;
    const auto& L = llt_.matrixLLT();
    for (Eigen::Index i = 0; i < L.rows(); ++i)
        log_det_ += 2.0 * std::log(L(i, i));
}

double CopulaCorrelation::logdensity_q(const Eigen::VectorXd& q) const {
    if (q.size() != llt_.matrixLLT().rows())
        throw DomainError("copula dimension mismatch");
    // q' R^{-1} q via one triangular solve.
    const Eigen::VectorXd w = llt_.matrixL().solve(q);
    return -0.5 * log_det_ + 0.5 * (q.squaredNorm() - w.squaredNorm());
}

double CopulaCorrelation::logdensity(std::span<const double> u) const {
    Eigen::VectorXd q(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!(u[i] > 0.0 && u[i] < 1.0))
            throw DomainError("copula arguments must lie strictly inside (0,1)");
        q[static_cast<Eigen::Index>(i)] = normal_quantile(u[i]);
    }
    return logdensity_q(q);
}

double gaussian_copula_logdensity(std::span<const double> u,
                                  const Eigen::MatrixXd& R) {
    if (static_cast<Eigen::Index>(u.size()) != R.rows())
        throw DomainError("copula dimension mismatch");
    return CopulaCorrelation(R).logdensity(u);
}

BivariateQarModel::BivariateQarModel(QarModel max_, QarModel min_, double rho_)
    : model_max(std::move(max_)), model_min(std::move(min_)), rho(rho_) {
    if (!(std::abs(rho) < 1.0))
        throw DomainError("copula correlation must lie in (-1,1)");
    if (model_max.order() != 1 || model_min.order() != 1)
        throw DomainError("bivariate model couples two QAR(1) marginals");
}

namespace {

Eigen::MatrixXd rho_matrix(double rho) {
    Eigen::MatrixXd R(2, 2);
    R << 1.0, rho, rho, 1.0;
    return R;
}

} // namespace

double mqar_log_likelihood(const BivariateQarModel& m,
                           std::span<const double> y_max,
                           std::span<const double> y_min,
                           const RootConfig& cfg) {
    if (y_max.size() != y_min.size())
        throw DomainError("the two series must have equal length");
    const int T = static_cast<int>(y_max.size());
    if (T < 2) throw DomainError("series too short");

    const CopulaCorrelation cop(rho_matrix(m.rho));
    Eigen::VectorXd q(2);
    double ll = 0.0;
    for (int t = 1; t < T; ++t) {
        double u1, u2, d1, d2;
        try {
            const double lag1[] = {y_max[t - 1]};
            u1 = inverse_tau(m.model_max, y_max[t], lag1, cfg);
            d1 = conditional_density(m.model_max, y_max[t], lag1, cfg);
        } catch (const std::exception& e) {
            throw NumericError("series 1, t=" + std::to_string(t + 1) + ": " +
                               e.what());
        }
        try {
            const double lag2[] = {y_min[t - 1]};
            u2 = inverse_tau(m.model_min, y_min[t], lag2, cfg);
            d2 = conditional_density(m.model_min, y_min[t], lag2, cfg);
        } catch (const std::exception& e) {
            throw NumericError("series 2, t=" + std::to_string(t + 1) + ": " +
                               e.what());
        }
        q[0] = normal_quantile(u1);
        q[1] = normal_quantile(u2);
        ll += std::log(d1) + std::log(d2) + cop.logdensity_q(q);
    }
    return ll;
}

Eigen::MatrixXd joint_conditional_density_grid(const BivariateQarModel& m,
                                               double y_max_prev,
                                               double y_min_prev, int G,
                                               const RootConfig& cfg) {
    if (G < 2) throw DomainError("grid needs at least two points per axis");
    if (!(y_max_prev >= 0.0 && y_max_prev <= 1.0) ||
        !(y_min_prev >= 0.0 && y_min_prev <= 1.0))
        throw DomainError("conditioning values must lie in [0,1]");

    const CopulaCorrelation cop(rho_matrix(m.rho));
    const double lag1[] = {y_max_prev};
    const double lag2[] = {y_min_prev};

    // Per-axis levels, densities and normal scores; the copula factor is
    // then a closed-form 2x2 evaluation per cell.
    Eigen::VectorXd q1(G), q2(G), f1(G), f2(G);
    for (int i = 0; i < G; ++i) {
        const double x = (i + 0.5) / G;
        const double u1 = inverse_tau(m.model_max, x, lag1, cfg);
        const double u2 = inverse_tau(m.model_min, x, lag2, cfg);
        q1[i] = normal_quantile(u1);
        q2[i] = normal_quantile(u2);
        f1[i] = conditional_density(m.model_max, x, lag1, cfg);
        f2[i] = conditional_density(m.model_min, x, lag2, cfg);
    }

    const double rho = m.rho;
    const double om = 1.0 - rho * rho;
    Eigen::MatrixXd grid(G, G);
    for (int i = 0; i < G; ++i) {
        for (int j = 0; j < G; ++j) {
            const double quad =
                (q1[i] * q1[i] + q2[j] * q2[j]) * (1.0 - 1.0 / om) +
                2.0 * rho * q1[i] * q2[j] / om;
            const double logc = -0.5 * std::log(om) + 0.5 * quad;
            grid(i, j) = f1[i] * f2[j] * std::exp(logc);
        }
    }
    return grid;
}

} // namespace qarlab
