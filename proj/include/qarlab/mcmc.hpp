#ifndef QARLAB_MCMC_HPP
#define QARLAB_MCMC_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qarlab/assess.hpp"
#include "qarlab/qar.hpp"
#include "qarlab/rng.hpp"

namespace qarlab {

enum class Transform { Identity, Log, Logit, Simplex };
enum class PriorKind { Normal, Uniform, None };

// One sampled quantity: its bijection from the unconstrained line and
// its prior. Normal priors live on the unconstrained scale (the paper
// states log-scale priors); Uniform priors are flat on the constrained
// value of a Logit block. Simplex blocks map zdim reals to zdim+1
// weights via additive log-ratios with a flat Dirichlet prior.
struct ParamBlock {
    std::string name;
    Transform transform = Transform::Identity;
    PriorKind prior = PriorKind::None;
    double lo = 0.0, hi = 1.0;               // Logit bounds
    double prior_mean = 0.0, prior_sd = 1.0; // Normal prior
    int zdim = 1;                            // Simplex only
};

struct ParamSpec {
    std::vector<ParamBlock> blocks;

    int unconstrained_dim() const;
    int constrained_dim() const;
    std::vector<std::string> names() const;
    Eigen::VectorXd to_constrained(const Eigen::VectorXd& z) const;
    Eigen::VectorXd to_unconstrained(const Eigen::VectorXd& c) const;
    // Scalar log-priors plus transform Jacobians.
    double log_prior(const Eigen::VectorXd& z) const;
};

// A posterior target: likelihood and any joint prior terms are functions
// of the constrained vector. Numeric failures count as zero density.
struct Target {
    ParamSpec spec;
    std::function<double(const Eigen::VectorXd&)> log_lik;
    std::function<double(const Eigen::VectorXd&)> extra_log_prior; // optional
    std::vector<std::vector<int>> sample_blocks; // empty: one full block
    Eigen::VectorXd init;                        // empty: zeros
};

double log_posterior(const Target& target, const Eigen::VectorXd& z);

struct ChainConfig {
    int iterations = 20000;
    int burn_in = 10000;
    int thin = 5;
    std::uint64_t seed = 0;
    int adapt_start = 500;
    double adapt_eps = 1e-6;
    double init_step = 0.1;
};

struct PosteriorDraws {
    std::vector<std::string> names;
    Eigen::MatrixXd samples; // B x constrained_dim
    Eigen::VectorXd log_post;
    double acceptance_rate = 0.0;
    double adapted_acceptance_rate = 0.0;
    std::vector<std::string> warnings;
    std::vector<Eigen::MatrixXd> proposal_cov; // final, one per block
    int iterations = 0, burn_in = 0, thin = 0;
    std::uint64_t seed = 0;

    int draw_count() const { return static_cast<int>(samples.rows()); }
};

// Adaptive Metropolis: symmetric Gaussian proposals with covariance
// (2.38^2/d) (empirical covariance + eps I) once past adapt_start,
// updated recursively from the chain history. Deterministic given seed.
PosteriorDraws run_chain(const Target& target, const ChainConfig& cfg);

struct ParamSummary {
    std::string name;
    double mean = 0.0;
    std::map<double, std::pair<double, double>> intervals; // by level
};

std::vector<ParamSummary> summarize(const PosteriorDraws& draws,
                                    std::span<const double> levels);

struct CurveSummary {
    std::vector<double> mean, lo, hi;
};

struct FunctionalRequest {
    std::vector<double> tau_grid;
    std::vector<double> lags;   // conditioning lags, unit scale
    std::vector<double> y_grid; // density evaluation points, interior
    double level = 0.9;
};

struct FunctionalSummary {
    std::vector<double> tau;
    std::vector<CurveSummary> theta; // theta_0 .. theta_p
    CurveSummary quantile;           // Q(tau | lags)
    std::vector<double> y;
    CurveSummary density; // f(y | lags)
    int draws_used = 0;
    int draws_skipped = 0;
};

// Pushes each retained draw through the model's quantile machinery and
// reports pointwise means and equal-tailed intervals. Draws that fail
// numerically are skipped and counted.
FunctionalSummary posterior_functionals(
    const std::function<QarModel(int)>& model_at, int n_draws,
    const FunctionalRequest& req);

} // namespace qarlab

#endif
