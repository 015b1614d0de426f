#ifndef QARLAB_SUPPORT_HPP
#define QARLAB_SUPPORT_HPP

#include <span>
#include <vector>

#include "qarlab/dist.hpp"
#include "qarlab/errors.hpp"

namespace qarlab {

// Lower/upper bounds (data units) used to map a raw series onto (0,1).
struct SupportBounds {
    double m = 0.0;
    double M = 1.0;
};

// Order-statistics based bound selection: places the transformed minimum
// at 1/(T+1) and maximum at T/(T+1).
SupportBounds select_bounds(std::span<const double> raw);

std::vector<double> to_unit(std::span<const double> raw, const SupportBounds& b);
std::vector<double> from_unit(std::span<const double> unit, const SupportBounds& b);
double to_unit(double raw, const SupportBounds& b);
double from_unit(double unit, const SupportBounds& b);

// Intercept of the quantile line on the original data scale,
// theta0*(tau) = m (1 - eta1(tau)) + M eta2(tau). The slope
// eta1 - eta2 is unchanged by the affine support map.
std::vector<double> original_scale_intercept(const MonotoneCurve& eta1,
                                             const MonotoneCurve& eta2,
                                             const SupportBounds& b,
                                             std::span<const double> tau_grid);

} // namespace qarlab

#endif
