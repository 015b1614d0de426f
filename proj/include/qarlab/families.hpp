#ifndef QARLAB_FAMILIES_HPP
#define QARLAB_FAMILIES_HPP

#include <optional>

#include "qarlab/mcmc.hpp"
#include "qarlab/mqar.hpp"
#include "qarlab/spatial.hpp"

namespace qarlab {

// Prior scales; negative sigma_ab means the family default
// (3 for a QAR(1) with K=1, otherwise 1.5).
struct QarPriorConfig {
    double sigma_ab = -1.0;
    double lambda_hi = 0.5;
};

struct KxPriorConfig {
    double mu_sd = 10.0;
    double log_sigma_sd = 3.0;
    double log_gamma1_sd = 3.0;
};

struct SpatialPriorConfig {
    double hyper_sd = 3.0;
};

Target make_qar_target(int p, int K, std::vector<double> unit_data,
                       const QarPriorConfig& priors = {});
QarModel qar_model_from_row(int p, int K, const Eigen::VectorXd& constrained);

Target make_kx2006_target(std::vector<double> raw_data,
                          const KxPriorConfig& priors = {});
Kx2006Model kx_model_from_row(const Eigen::VectorXd& constrained);

Target make_mqar_target(int K, std::vector<double> unit_max,
                        std::vector<double> unit_min,
                        const QarPriorConfig& priors = {});
BivariateQarModel mqar_model_from_row(int K, const Eigen::VectorXd& constrained);

// The spatial model samples the four latent fields jointly with their
// hypers and gamma; grouped blocks (one per field, one for hypers+gamma)
// are the default for mixing.
Target make_spatial_target(Eigen::MatrixXd unit_data, StationSet stations,
                           double field_phi, double copula_phi,
                           const SpatialPriorConfig& priors = {},
                           bool grouped_blocks = true);
SpatialQarModel spatial_model_from_row(int n_sites, double field_phi,
                                       double copula_phi,
                                       const Eigen::VectorXd& constrained);

} // namespace qarlab

#endif
