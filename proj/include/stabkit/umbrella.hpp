#pragma once

// The Whitney umbrella y1 y2^2 = y3^2 and Bottema's marginal surface
// a1 a2 a3 = a1^2 + a3^2 (quartic normalized to a4 = 1), together with the
// explicit map carrying the first onto the second.

#include <cmath>
#include <limits>
#include <utility>

#include "stabkit/errors.hpp"

namespace stabkit {

template <typename Scalar>
struct UmbrellaPoint {
  Scalar y1{0}, y2{0}, y3{0};
  Scalar x1{0}, x2{0};  // preimage, when known
};

template <typename Scalar>
struct BottemaSurfacePoint {
  Scalar a1{0}, a2{0}, a3{0};
  Scalar m{0};  // slope a3/a1 of the generator through the point (0 on the axis)
};

template <typename Scalar>
UmbrellaPoint<Scalar> umbrella_map(Scalar x1, Scalar x2) {
  return {x1 * x1, x2, x1 * x2, x1, x2};
}

template <typename Scalar>
Scalar umbrella_residual(Scalar y1, Scalar y2, Scalar y3) {
  return y1 * y2 * y2 - y3 * y3;
}

/// Residual of the surface equation a1 a2 a3 - a1^2 - a3^2.
template <typename Scalar>
Scalar bottema_residual(Scalar a1, Scalar a2, Scalar a3) {
  return a1 * a2 * a3 - a1 * a1 - a3 * a3;
}

/// Marginal height a2 = (a1^2 + a3^2)/(a1 a3) = m + 1/m over (a1, a3).
template <typename Scalar>
Scalar bottema_height(Scalar a1, Scalar a3) {
  if (!(a1 > 0) || !(a3 > 0))
    throw DomainError("bottema_height: a1 and a3 must be positive");
  const Scalar m = a3 / a1;
  return m + 1 / m;
}

/// Point at distance a1 along the generator a3 = m a1, a2 = m + 1/m.
template <typename Scalar>
BottemaSurfacePoint<Scalar> bottema_generator(Scalar m, Scalar a1) {
  if (!(m > 0)) throw DomainError("bottema_generator: slope must be positive");
  return {a1, m + 1 / m, m * a1, m};
}

/// The two generator slopes through the double-line point (0, a2, 0),
/// a2 >= 2; they coincide (m = 1) at the pinch a2 = 2.
template <typename Scalar>
std::pair<Scalar, Scalar> generator_slopes(Scalar a2) {
  if (!(a2 >= 2)) throw DomainError("generator_slopes: a2 must be >= 2");
  const Scalar root = std::sqrt(a2 * a2 - 4);
  const Scalar big = (a2 + root) / 2;
  return {1 / big, big};
}

/// a1 = y3/2 + w, a2 = 2 + y2, a3 = -y3/2 + w with w = +sqrt(y3^2/4 + y1 y2).
template <typename Scalar>
BottemaSurfacePoint<Scalar> bottema_from_whitney(Scalar y1, Scalar y2, Scalar y3) {
  const Scalar w2 = y3 * y3 / 4 + y1 * y2;
  if (w2 < 0) throw DomainError("bottema_from_whitney: y3^2/4 + y1 y2 < 0");
  const Scalar w = std::sqrt(w2);
  BottemaSurfacePoint<Scalar> p;
  p.a1 = y3 / 2 + w;
  p.a2 = 2 + y2;
  p.a3 = -y3 / 2 + w;
  // Cancellation can leave a tiny negative on the boundary of the chart.
  if (p.a1 < 0 || p.a3 < 0) {
    const Scalar slack = 8 * std::numeric_limits<Scalar>::epsilon() * (std::abs(y3) + w);
    if (p.a1 < -slack || p.a3 < -slack)
      throw DomainError("bottema_from_whitney: image leaves a1, a3 >= 0");
    if (p.a1 < 0) p.a1 = 0;
    if (p.a3 < 0) p.a3 = 0;
  }
  p.m = p.a1 > 0 ? p.a3 / p.a1 : Scalar(0);
  return p;
}

}  // namespace stabkit
