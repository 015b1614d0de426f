#ifndef QARLAB_QAR_HPP
#define QARLAB_QAR_HPP

#include <span>
#include <vector>

#include "qarlab/dist.hpp"
#include "qarlab/rootfind.hpp"

namespace qarlab {

// Joint quantile autoregression of order p on the unit interval:
//   Q(tau | lags) = sum_j pi_j y_{t-j} eta_j(tau)
//                 + (1 - sum_j pi_j y_{t-j}) eta_{p+1}(tau),
// with p+1 monotone curves and nonnegative lag weights summing to one.
struct QarModel {
    std::vector<MonotoneCurve> curves; // eta_1 .. eta_{p+1}
    std::vector<double> lag_weights;   // pi_1 .. pi_p

    QarModel() = default;
    QarModel(std::vector<MonotoneCurve> curves_, std::vector<double> pi = {});

    int order() const { return static_cast<int>(curves.size()) - 1; }
};

// Quantile levels u_t = tau_{y_{t-1}}(y_t) recovered while scoring a
// series; consumed by the copula-coupled models.
struct QuantileLevelPath {
    std::vector<double> u; // one entry per t = p+1 .. T
};

struct ThetaGrids {
    std::vector<double> tau;
    // theta[0] is the intercept eta_{p+1}; theta[j] = pi_j (eta_j - eta_{p+1}).
    std::vector<std::vector<double>> theta;
};

double conditional_quantile(const QarModel& m, double tau,
                            std::span<const double> lags);

ThetaGrids theta_curves(const QarModel& m, std::span<const double> tau_grid);

// Quantile level of y given the lags; the conditional cdf. Clamped into
// [1e-12, 1-1e-12] before any downstream normal-quantile use.
double inverse_tau(const QarModel& m, double y, std::span<const double> lags,
                   const RootConfig& cfg = {});

double conditional_density(const QarModel& m, double y,
                           std::span<const double> lags,
                           const RootConfig& cfg = {});

// Log-likelihood conditioning on the first p observations. When `path`
// is non-null the recovered quantile levels are stored there.
double log_likelihood(const QarModel& m, std::span<const double> y,
                      QuantileLevelPath* path = nullptr,
                      const RootConfig& cfg = {});

// Baseline with Gaussian intercept and clamped linear slope, fitted on
// the original (positive) data scale:
//   Q(tau | y_prev) = mu + sigma Phi^{-1}(tau) + min{g0 + g1 tau, 1} y_prev.
struct Kx2006Model {
    double mu = 0.0;
    double sigma = 1.0;
    double gamma0 = 0.5;
    double gamma1 = 1.0;

    Kx2006Model() = default;
    Kx2006Model(double mu_, double sigma_, double g0, double g1);
};

double kx2006_quantile(const Kx2006Model& m, double tau, double y_prev);
double kx2006_quantile_deriv(const Kx2006Model& m, double tau, double y_prev);
double kx2006_inverse_tau(const Kx2006Model& m, double y, double y_prev,
                          const RootConfig& cfg = {});
double kx2006_log_likelihood(const Kx2006Model& m, std::span<const double> raw,
                             const RootConfig& cfg = {});

} // namespace qarlab

#endif
