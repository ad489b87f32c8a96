#pragma once

#include <cstdint>
#include <random>

namespace dockbench {

using Rng = std::mt19937_64;

/// Standard normal draw. A fresh distribution object per call keeps the
/// mapping from rng state to output independent of call interleaving.
inline double draw_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

/// Uniform draw in [0, 1).
inline double draw_uniform(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng);
}

}  // namespace dockbench
