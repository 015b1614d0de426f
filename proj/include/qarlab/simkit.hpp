#ifndef QARLAB_SIMKIT_HPP
#define QARLAB_SIMKIT_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qarlab/assess.hpp"
#include "qarlab/mcmc.hpp"
#include "qarlab/mqar.hpp"
#include "qarlab/spatial.hpp"

namespace qarlab {

// Catalogued simulation scenario: K=1 scenarios carry one component per
// curve, K=2 scenarios two components with first-component weights.
struct Scenario {
    std::string name;
    int K = 1;
    std::vector<KumaraswamyParams> eta1_components;
    std::vector<KumaraswamyParams> eta2_components;
    double lambda1 = 1.0; // weight of eta1's first component
    double lambda2 = 1.0; // weight of eta2's first component

    QarModel model() const;
};

// SC1..SC7.
Scenario scenario_catalog(const std::string& name);

std::vector<double> simulate_qar(const QarModel& m, int T, int warmup,
                                 std::uint64_t seed);

struct BivariateSeries {
    std::vector<double> y_max;
    std::vector<double> y_min;
};

BivariateSeries simulate_bivariate(const BivariateQarModel& m, int T,
                                   int warmup, std::uint64_t seed);

Eigen::MatrixXd simulate_spatial(const SpatialQarModel& m,
                                 const StationSet& stations, int T, int warmup,
                                 std::uint64_t seed);

struct CoverageResult {
    std::vector<double> tau;
    std::vector<double> cvg_theta0;
    std::vector<double> cvg_theta1;
    double avg_theta0 = 0.0;
    double avg_theta1 = 0.0;
    int B = 0;
    int T = 0;
    double level = 0.9;
    int failed_replicates = 0;
};

// Simulate-fit-cover loop: per replicate, simulate from the scenario,
// fit the matching model, and check whether pointwise equal-tailed
// credible intervals of theta0(tau) and theta1(tau) cover the truth.
CoverageResult coverage_study(const Scenario& scenario, int B, int T,
                              double level, const TauGrid& grid,
                              const ChainConfig& cfg, int threads = 0);

} // namespace qarlab

#endif
