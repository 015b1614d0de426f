#ifndef QARLAB_RNG_HPP
#define QARLAB_RNG_HPP

#include <cstdint>
#include <random>

#include "qarlab/dist.hpp"

namespace qarlab {

// Seeded generator with platform-stable output: uniforms come straight
// from the mt19937_64 bit stream and normals through the inverse cdf,
// so identical seeds give identical draws everywhere.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Strictly inside (0,1).
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { return normal_quantile(uniform()); }

  private:
    std::mt19937_64 eng_;
};

} // namespace qarlab

#endif
