#include "qarlab/dist.hpp"

#include <cmath>
#include <numbers>

namespace qarlab {

namespace {

void check_params(const KumaraswamyParams& p) {
    if (!(p.a > 0.0) || !(p.b > 0.0) || !std::isfinite(p.a) || !std::isfinite(p.b))
        throw DomainError("Kumaraswamy parameters must be positive and finite");
}

void check_unit(double x, const char* what) {
    if (!(x >= 0.0 && x <= 1.0))
        throw DomainError(std::string(what) + " must lie in [0,1]");
}

} // namespace

KumaraswamyParams::KumaraswamyParams(double a_, double b_) : a(a_), b(b_) {
    check_params(*this);
}

double kuma_cdf(double x, const KumaraswamyParams& p) {
    check_params(p);
    check_unit(x, "cdf argument");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    // 1 - (1 - x^a)^b, with the power taken in log space to avoid
    // cancellation as x^a -> 1.
    return -std::expm1(p.b * std::log1p(-std::pow(x, p.a)));
}

double kuma_pdf(double x, const KumaraswamyParams& p) {
    check_params(p);
    if (!(x > 0.0 && x < 1.0))
        throw DomainError("pdf argument must lie in (0,1)");
    const double xa = std::pow(x, p.a);
    return std::exp(std::log(p.a) + std::log(p.b) + (p.a - 1.0) * std::log(x) +
                    (p.b - 1.0) * std::log1p(-xa));
}

double kuma_quantile(double tau, const KumaraswamyParams& p) {
    check_params(p);
    check_unit(tau, "quantile level");
    if (tau == 0.0) return 0.0;
    if (tau == 1.0) return 1.0;
    // (1 - (1-tau)^(1/b))^(1/a)
    const double u = -std::expm1(std::log1p(-tau) / p.b);
    return std::pow(u, 1.0 / p.a);
}

KumaraswamyParams basis_curve_params(int K, int k) {
    if (K < 1 || k < 1 || k > K)
        throw DomainError("basis_curve_params requires 1 <= k <= K");
    const double median = static_cast<double>(k) / (K + 1);
    const double a = 2.0;
    // median m solves (1 - 2^(-1/b))^(1/a) = m  =>  b = log(1/2)/log(1 - m^a)
    const double b = std::log(0.5) / std::log1p(-median * median);
    return KumaraswamyParams(a, b);
}

double normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

namespace {

// Rational approximation of the standard normal quantile (Acklam's
// coefficients), accurate to ~1e-9 before refinement.
double normal_quantile_approx(double p) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("normal_quantile requires p strictly inside (0,1)");
    double x = normal_quantile_approx(p);
    // One Halley step against the erfc-based cdf.
    const double e = normal_cdf(x) - p;
    const double u = e / normal_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

MonotoneCurve::MonotoneCurve(std::vector<KumaraswamyParams> components,
                             std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
    if (components_.empty() || components_.size() != weights_.size())
        throw DomainError("curve needs K >= 1 components with matching weights");
    double sum = 0.0;
    for (const auto& c : components_) check_params(c);
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw DomainError("curve weights must be nonnegative");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw DomainError("curve weights must sum to 1");
}

double MonotoneCurve::eval(double tau) const {
    check_unit(tau, "curve argument");
    double v = 0.0;
    for (std::size_t k = 0; k < components_.size(); ++k)
        v += weights_[k] * kuma_cdf(tau, components_[k]);
    return v;
}

double MonotoneCurve::deriv(double tau) const {
    double v = 0.0;
    for (std::size_t k = 0; k < components_.size(); ++k)
        v += weights_[k] * kuma_pdf(tau, components_[k]);
    return v;
}

double curve_eval(const MonotoneCurve& c, double tau) { return c.eval(tau); }
double curve_deriv(const MonotoneCurve& c, double tau) { return c.deriv(tau); }

} // namespace qarlab
