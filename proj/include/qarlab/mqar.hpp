#ifndef QARLAB_MQAR_HPP
#define QARLAB_MQAR_HPP

#include <Eigen/Dense>
#include <span>

#include "qarlab/qar.hpp"

namespace qarlab {

// log c(u | R) = -1/2 log|R| + 1/2 q' (I - R^{-1}) q with q_i = Phi^{-1}(u_i).
// The determinant and the solve both come from one Cholesky factor of R.
double gaussian_copula_logdensity(std::span<const double> u,
                                  const Eigen::MatrixXd& R);

// Precomputed factorization for repeated evaluations against one R.
class CopulaCorrelation {
  public:
    explicit CopulaCorrelation(const Eigen::MatrixXd& R);

    int dim() const { return static_cast<int>(llt_.matrixLLT().rows()); }
    double log_det() const { return log_det_; }
    double logdensity(std::span<const double> u) const;
    double logdensity_q(const Eigen::VectorXd& q) const;

  private:
    Eigen::LLT<Eigen::MatrixXd> llt_;
    double log_det_ = 0.0;
};

// Two unit-scale QAR(1) series whose quantile levels are linked by a
// bivariate Gaussian copula with correlation rho.
struct BivariateQarModel {
    QarModel model_max;
    QarModel model_min;
    double rho = 0.0;

    BivariateQarModel() = default;
    BivariateQarModel(QarModel max_, QarModel min_, double rho_);
};

double mqar_log_likelihood(const BivariateQarModel& m,
                           std::span<const double> y_max,
                           std::span<const double> y_min,
                           const RootConfig& cfg = {});

// Conditional joint density on a G x G lattice of cell centers
// ((i+0.5)/G, (j+0.5)/G); rows index the first (max) series.
Eigen::MatrixXd joint_conditional_density_grid(const BivariateQarModel& m,
                                               double y_max_prev,
                                               double y_min_prev, int G,
                                               const RootConfig& cfg = {});

} // namespace qarlab

#endif
