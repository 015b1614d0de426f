#ifndef QARLAB_ROOTFIND_HPP
#define QARLAB_ROOTFIND_HPP

#include <functional>

#include "qarlab/errors.hpp"

namespace qarlab {

struct RootConfig {
    double abs_tol = 1e-12;
    int max_iter = 200;
};

// Bracketing scalar root solver combining bisection, the secant method and
// inverse quadratic interpolation. Requires a sign change on [lo, hi]; the
// function is never evaluated outside the bracket.
double brent(const std::function<double(double)>& f, double lo, double hi,
             const RootConfig& cfg = {});

} // namespace qarlab

#endif
