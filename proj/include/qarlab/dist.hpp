#ifndef QARLAB_DIST_HPP
#define QARLAB_DIST_HPP

#include <vector>

#include "qarlab/errors.hpp"

namespace qarlab {

// Two-parameter distribution on [0,1] with closed-form cdf and quantile
// function; the building block for all monotone curves in this library.
struct KumaraswamyParams {
    double a = 1.0;
    double b = 1.0;

    KumaraswamyParams() = default;
    KumaraswamyParams(double a_, double b_);
};

double kuma_cdf(double x, const KumaraswamyParams& p);
double kuma_pdf(double x, const KumaraswamyParams& p);
double kuma_quantile(double tau, const KumaraswamyParams& p);

// Parameters of a smooth unimodal cdf with median k/(K+1). Convention:
// a is fixed at 2 and b solved from the closed-form median.
KumaraswamyParams basis_curve_params(int K, int k);

double normal_cdf(double x);
double normal_pdf(double x);
// Strictly interior p required; p in {0,1} is an error.
double normal_quantile(double p);

// Strictly increasing map [0,1] -> [0,1] built as a weighted mixture of
// Kumaraswamy cdfs. Weights are nonnegative and sum to one.
class MonotoneCurve {
  public:
    MonotoneCurve() : components_{KumaraswamyParams{}}, weights_{1.0} {}
    explicit MonotoneCurve(KumaraswamyParams single)
        : components_{single}, weights_{1.0} {}
    MonotoneCurve(std::vector<KumaraswamyParams> components,
                  std::vector<double> weights);

    double eval(double tau) const;
    double deriv(double tau) const;

    int size() const { return static_cast<int>(components_.size()); }
    const std::vector<KumaraswamyParams>& components() const { return components_; }
    const std::vector<double>& weights() const { return weights_; }

  private:
    std::vector<KumaraswamyParams> components_;
    std::vector<double> weights_;
};

double curve_eval(const MonotoneCurve& c, double tau);
double curve_deriv(const MonotoneCurve& c, double tau);

} // namespace qarlab

#endif
