#pragma once

#include <cmath>
#include <random>

#include "monoflow/types.hpp"

namespace monoflow {

// Deterministic sampling helpers.  Gaussians come from an explicit
// Box-Muller transform rather than std::normal_distribution so streams are
// reproducible across standard-library implementations.
inline double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa in [0,1)
  return (rng() >> 11) * 0x1.0p-53;
}

inline double unit_gaussian(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  double u2 = uniform01(rng);
  while (u1 <= 1e-300) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline Vec gaussian_vector(std::mt19937_64& rng, int dim) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = unit_gaussian(rng);
  return v;
}

inline Vec unit_direction(std::mt19937_64& rng, int dim) {
  Vec v = gaussian_vector(rng, dim);
  double n = v.norm();
  while (n < 1e-12) {
    v = gaussian_vector(rng, dim);
    n = v.norm();
  }
  return v / n;
}

inline Vec uniform_in_ball(std::mt19937_64& rng, int dim, double radius) {
  Vec d = unit_direction(rng, dim);
  double r = radius * std::pow(uniform01(rng), 1.0 / dim);
  return r * d;
}

}  // namespace monoflow
