#include "qarlab/support.hpp"

#include <algorithm>
#include <cmath>

namespace qarlab {

SupportBounds select_bounds(std::span<const double> raw) {
    if (raw.size() < 2)
        throw DomainError("bound selection needs at least two observations");
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(lo < hi))
        throw DomainError("bound selection is degenerate for a constant series");
    const double T = static_cast<double>(raw.size());
    return SupportBounds{(T * lo - hi) / (T - 1.0), (T * hi - lo) / (T - 1.0)};
}

double to_unit(double raw, const SupportBounds& b) {
    if (!(b.m < b.M)) throw DomainError("support bounds must satisfy m < M");
    if (!(raw > b.m && raw < b.M))
        throw DomainError("value outside the open support bracket (m, M)");
    return (raw - b.m) / (b.M - b.m);
}

double from_unit(double unit, const SupportBounds& b) {
    if (!(b.m < b.M)) throw DomainError("support bounds must satisfy m < M");
    return b.m + (b.M - b.m) * unit;
}

std::vector<double> to_unit(std::span<const double> raw, const SupportBounds& b) {
    std::vector<double> out;
    out.reserve(raw.size());
    for (double v : raw) out.push_back(to_unit(v, b));
    return out;
}

std::vector<double> from_unit(std::span<const double> unit, const SupportBounds& b) {
    std::vector<double> out;
    out.reserve(unit.size());
    for (double v : unit) out.push_back(from_unit(v, b));
    return out;
}

std::vector<double> original_scale_intercept(const MonotoneCurve& eta1,
                                             const MonotoneCurve& eta2,
                                             const SupportBounds& b,
                                             std::span<const double> tau_grid) {
    std::vector<double> out;
    out.reserve(tau_grid.size());
    for (double tau : tau_grid)
        out.push_back(b.m * (1.0 - eta1.eval(tau)) + b.M * eta2.eval(tau));
    return out;
}

} // namespace qarlab
