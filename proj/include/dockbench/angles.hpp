#pragma once

#include <cmath>
#include <numbers>

namespace dockbench {

/// Wraps an angle into (-pi, pi]. The branch point maps +pi to itself,
/// so opposing-yaw references sitting exactly on the cut stay put.
template <typename Scalar>
inline Scalar wrap_angle(Scalar a) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  constexpr Scalar two_pi = Scalar(2) * pi;
  if (a > -pi && a <= pi) return a;  // already in range, keep it bit-exact
  Scalar r = std::fmod(a + pi, two_pi);
  if (r <= Scalar(0)) r += two_pi;
  return r - pi;
}

/// Shortest signed difference a - b, wrapped into (-pi, pi].
template <typename Scalar>
inline Scalar angle_diff(Scalar a, Scalar b) {
  return wrap_angle(a - b);
}

}  // namespace dockbench
