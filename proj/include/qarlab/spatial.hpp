#ifndef QARLAB_SPATIAL_HPP
#define QARLAB_SPATIAL_HPP

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "qarlab/mqar.hpp"
#include "qarlab/qar.hpp"
#include "qarlab/rng.hpp"

namespace qarlab {

struct Coord {
    double x = 0.0;
    double y = 0.0;
};

// Monitoring sites on projected planar coordinates; distances are
// Euclidean in the supplied units.
struct StationSet {
    std::vector<std::string> ids;
    std::vector<Coord> coords;
    std::vector<double> elevation; // optional, carried through unused
    Eigen::MatrixXd dist;

    static StationSet create(std::vector<std::string> ids,
                             std::vector<Coord> coords,
                             std::vector<double> elevation = {});
    int size() const { return static_cast<int>(ids.size()); }
};

// Mean/variance of one latent log-scale GP field; decay is fixed.
struct GpHyper {
    double mean = 0.0;
    double var = 1.0;
    double decay = 1.0;
};

// Spatial QAR(1): per-site K=1 curve parameters as four latent fields on
// the log scale, plus the copula mixing proportion gamma and decay phi.
struct SpatialQarModel {
    // Rows: log a1(s), log b1(s), log a2(s), log b2(s); one column per site.
    Eigen::MatrixXd log_fields;
    std::array<GpHyper, 4> hypers;
    double gamma = 0.5;
    double copula_phi = 1.0;

    QarModel site_model(int i) const;
};

Eigen::MatrixXd exp_corr_matrix(const StationSet& stations, double phi);
double phi_from_dmax(const StationSet& stations);

// Multivariate normal log-density of a field under GP(mean, var * R).
double gp_field_logprior(const Eigen::VectorXd& field, const GpHyper& h,
                         const Eigen::MatrixXd& R);
double gp_field_logprior(const Eigen::VectorXd& field, const GpHyper& h,
                         const Eigen::LLT<Eigen::MatrixXd>& R_llt);

// Full likelihood: site-wise marginal terms plus a Gaussian copula with
// correlation gamma R(phi) + (1-gamma) I over each time slice.
double spatial_log_likelihood(const SpatialQarModel& m,
                              const Eigen::MatrixXd& data,
                              const StationSet& stations,
                              const RootConfig& cfg = {});

struct KrigeResult {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::VectorXd sample;
};

// Conditional normal of one GP field at new sites given observed values.
KrigeResult krige_field(const Eigen::VectorXd& field, const GpHyper& h,
                        const StationSet& observed,
                        std::span<const Coord> new_sites, Rng& rng);

struct SurfaceRequest {
    std::vector<Coord> sites;
    std::vector<double> tau_list;
    double cond_y = 0.5;
};

struct SurfaceResult {
    // q_mean(site, tau): posterior mean conditional quantile.
    Eigen::MatrixXd q_mean;
    int draws_used = 0;
    int draws_skipped = 0;
};

// Averages kriged conditional quantiles over posterior draws of the
// model; `models` yields the draw-specific spatial model by index.
SurfaceResult predict_quantile_surface(
    const std::function<SpatialQarModel(int)>& model_at, int n_draws,
    const StationSet& observed, const SurfaceRequest& req, std::uint64_t seed);

} // namespace qarlab

#endif
