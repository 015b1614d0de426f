#ifndef QARLAB_ASSESS_HPP
#define QARLAB_ASSESS_HPP

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "qarlab/errors.hpp"

namespace qarlab {

struct TauGrid {
    std::vector<double> values;

    // {0.01, 0.02, ..., 0.99}
    static TauGrid standard();
    static TauGrid make(std::vector<double> values);
    int size() const { return static_cast<int>(values.size()); }
};

double check_loss(double u, double tau);

// Type-7 linearly interpolated order statistic.
double empirical_quantile(std::span<const double> y, double tau);

// Standardized deviation of the posterior exceedance profile p(tau) from
// tau, aggregated over the grid with exponent v.
double p_tilde(std::span<const double> p_profile, int T, const TauGrid& grid,
               double v);

struct R1Result {
    std::vector<double> delta_profile;
    std::vector<double> omega;
    double delta_tilde = 0.0;
    double r1_bar = 0.0;
};

// Check-loss profile of the posterior-mean quantiles against the
// empirical-marginal-quantile null model. mean_quantiles is (T-1) x G:
// row t-2 holds E[Q(tau_g | y_{t-1})] for t = 2..T.
R1Result r1_bar(const Eigen::MatrixXd& mean_quantiles,
                std::span<const double> y, const TauGrid& grid);

struct MetricsReport {
    std::vector<double> p_profile;
    std::map<double, double> p_tilde; // keyed by v
    std::vector<double> delta_profile;
    std::vector<double> omega;
    double delta_tilde = 0.0;
    double r1_bar = 0.0;
    int draws_used = 0;
};

// Streams posterior draws through the indicator and check-loss metrics
// for any model whose conditional quantile is affine in the lags:
// theta_at(b) returns a (p+1) x G matrix of theta_j(tau_g) for draw b,
// and Q_b(tau | lags) = theta_0 + sum_j theta_j y_{t-j}.
MetricsReport compute_metrics(
    const std::function<Eigen::MatrixXd(int)>& theta_at, int n_draws,
    std::span<const double> y, const TauGrid& grid,
    std::span<const double> v_list);

} // namespace qarlab

#endif
