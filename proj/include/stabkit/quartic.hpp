#pragma once

// Stability of the monic real quartic  l^4 + a1 l^3 + a2 l^2 + a3 l + a4.
//
// Two independent routes are provided:
//   * hurwitz_verdict: closed-form root census from the Routh array and
//     Bottema's condition sets (including the marginal and biquadratic
//     cases), with an indeterminacy band around every defining equality;
//   * root_oracle: numerical roots of the companion matrix.
// Inside the band hurwitz_verdict defers to the oracle and flags the
// verdict as boundary-resolved.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "stabkit/errors.hpp"

namespace stabkit {

template <typename Scalar>
struct QuarticCoeffs {
  Scalar a1{0}, a2{0}, a3{0}, a4{0};

  bool finite() const {
    using std::isfinite;
    return isfinite(a1) && isfinite(a2) && isfinite(a3) && isfinite(a4);
  }
};

using Quartic = QuarticCoeffs<double>;

enum class StabilityLabel {
  AsymptoticallyStable,
  MarginallyStable,
  Unstable,
  DegenerateMarginal,
};

constexpr std::string_view to_string(StabilityLabel label) {
  switch (label) {
    case StabilityLabel::AsymptoticallyStable: return "AsymptoticallyStable";
    case StabilityLabel::MarginallyStable: return "MarginallyStable";
    case StabilityLabel::Unstable: return "Unstable";
    case StabilityLabel::DegenerateMarginal: return "DegenerateMarginal";
  }
  return "?";
}

struct StabilityVerdict {
  int left_count = 0;
  int imag_count = 0;
  int right_count = 0;
  StabilityLabel label = StabilityLabel::Unstable;
  bool has_repeated_imag_root = false;
  // True when the verdict came from the root oracle because the point sat
  // inside the indeterminacy band of a defining equality.
  bool boundary_resolved = false;

  bool unstable() const { return label == StabilityLabel::Unstable; }
  bool asymptotically_stable() const {
    return label == StabilityLabel::AsymptoticallyStable;
  }
  bool same_census(const StabilityVerdict& o) const {
    return left_count == o.left_count && imag_count == o.imag_count &&
           right_count == o.right_count && label == o.label;
  }
};

namespace detail {

inline StabilityVerdict make_verdict(int left, int imag, int right,
                                     bool repeated_imag) {
  StabilityVerdict v;
  v.left_count = left;
  v.imag_count = imag;
  v.right_count = right;
  v.has_repeated_imag_root = repeated_imag;
  if (right > 0) {
    v.label = StabilityLabel::Unstable;
  } else if (imag == 0) {
    v.label = StabilityLabel::AsymptoticallyStable;
  } else if (repeated_imag) {
    v.label = StabilityLabel::DegenerateMarginal;
  } else {
    v.label = StabilityLabel::MarginallyStable;
  }
  return v;
}

// Characteristic root magnitude, used to make the indeterminacy bands
// homogeneous in the coefficient weights (a_i has weight i).
template <typename Scalar>
Scalar root_scale(const QuarticCoeffs<Scalar>& q) {
  using std::abs;
  using std::pow;
  return std::max({Scalar(1), abs(q.a1), pow(abs(q.a2), Scalar(1) / 2),
                   pow(abs(q.a3), Scalar(1) / 3), pow(abs(q.a4), Scalar(1) / 4)});
}

template <typename Scalar>
int sign_changes(std::initializer_list<Scalar> column) {
  int changes = 0;
  const Scalar* prev = nullptr;
  for (const Scalar& x : column) {
    if (prev && ((*prev > 0) != (x > 0))) ++changes;
    prev = &x;
  }
  return changes;
}

}  // namespace detail

/// Bottema's marginal function H = a1^2 a4 + a3^2 - a1 a2 a3. H = 0 is the
/// condition for a pair of roots on the imaginary axis.
template <typename Scalar>
Scalar marginal_H(const QuarticCoeffs<Scalar>& q) {
  return q.a1 * q.a1 * q.a4 + q.a3 * q.a3 - q.a1 * q.a2 * q.a3;
}

/// All four roots, from the eigenvalues of the companion matrix followed by
/// Newton polishing that is kept only when it lowers the residual.
template <typename Scalar>
std::array<std::complex<Scalar>, 4> quartic_roots(const QuarticCoeffs<Scalar>& q) {
  using Complex = std::complex<Scalar>;
  Eigen::Matrix<Scalar, 4, 4> companion = Eigen::Matrix<Scalar, 4, 4>::Zero();
  companion.template diagonal<-1>().setOnes();
  companion(0, 3) = -q.a4;
  companion(1, 3) = -q.a3;
  companion(2, 3) = -q.a2;
  companion(3, 3) = -q.a1;
  Eigen::EigenSolver<Eigen::Matrix<Scalar, 4, 4>> solver(companion, false);

  auto poly = [&](Complex z) {
    return (((z + q.a1) * z + q.a2) * z + q.a3) * z + q.a4;
  };
  auto dpoly = [&](Complex z) {
    return ((Scalar(4) * z + Scalar(3) * q.a1) * z + Scalar(2) * q.a2) * z + q.a3;
  };

  std::array<Complex, 4> roots;
  for (int i = 0; i < 4; ++i) {
    Complex z = solver.eigenvalues()(i);
    for (int it = 0; it < 2; ++it) {
      const Complex d = dpoly(z);
      if (d == Complex(0)) break;
      const Complex candidate = z - poly(z) / d;
      if (std::abs(poly(candidate)) < std::abs(poly(z))) {
        z = candidate;
      } else {
        break;
      }
    }
    roots[i] = z;
  }
  return roots;
}

/// Root-location census with real-part threshold `tol`; imaginary-axis roots
/// closer than `repeat_tol` to each other count as repeated.
template <typename Scalar>
StabilityVerdict root_oracle(const QuarticCoeffs<Scalar>& q, Scalar tol,
                             Scalar repeat_tol = Scalar(1e-7)) {
  const auto roots = quartic_roots(q);
  int left = 0, imag = 0, right = 0;
  std::array<std::complex<Scalar>, 4> on_axis;
  for (const auto& z : roots) {
    if (z.real() < -tol) {
      ++left;
    } else if (z.real() > tol) {
      ++right;
    } else {
      on_axis[imag++] = z;
    }
  }
  bool repeated = false;
  for (int i = 0; i < imag; ++i)
    for (int j = i + 1; j < imag; ++j)
      if (std::abs(on_axis[i] - on_axis[j]) < repeat_tol) repeated = true;
  return detail::make_verdict(left, imag, right, repeated);
}

/// Default relative half-width of the indeterminacy band.
inline constexpr double kDefaultBand = 1e-10;

/// Band used by boundary bisections.
inline constexpr double kBoundaryBand = 1e-12;

/// Exact root census from the coefficients alone. `tol` is the relative
/// half-width of the band around each defining equality (a_i = 0, H = 0,
/// a2^2 = 4 a4); inside it the root oracle decides.
template <typename Scalar>
StabilityVerdict hurwitz_verdict(const QuarticCoeffs<Scalar>& q,
                                 Scalar tol = Scalar(kDefaultBand)) {
  using std::abs;
  using std::sqrt;
  if (!q.finite()) throw DomainError("hurwitz_verdict: non-finite coefficient");
  if (!(tol >= 0)) throw DomainError("hurwitz_verdict: negative tolerance");

  // a_i = 0 is tested against the root scale (a_i has weight i); H, the
  // biquadratic discriminant and the Routh minor a1 a2 - a3 against the sum
  // of the magnitudes of their own terms.
  const Scalar s = detail::root_scale(q);
  const Scalar band1 = tol * s, band2 = band1 * s, band3 = band2 * s, band4 = band3 * s;
  auto fuzzy = [](Scalar x, Scalar band) { return x != 0 && abs(x) <= band; };

  auto oracle = [&] {
    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    StabilityVerdict v = root_oracle(q, sqrt(eps) * s, Scalar(1e-7) * s);
    v.boundary_resolved = true;
    return v;
  };

  const Scalar a1 = q.a1, a2 = q.a2, a3 = q.a3, a4 = q.a4;

  // Biquadratic: l^4 + a2 l^2 + a4 with z = l^2 (condition set B).
  if (a1 == 0 && a3 == 0) {
    const Scalar disc = a2 * a2 - 4 * a4;
    if (fuzzy(disc, tol * (a2 * a2 + 4 * abs(a4))) || fuzzy(a4, band4)) return oracle();
    if (disc < 0) return detail::make_verdict(2, 0, 2, false);
    if (disc == 0) {
      if (a2 < 0) return detail::make_verdict(2, 0, 2, false);
      return detail::make_verdict(0, 4, 0, true);
    }
    const Scalar root = sqrt(disc);
    const Scalar z1 = a2 > 0 ? -(a2 + root) / 2 : (root - a2) / 2;
    const Scalar z2 = a4 / z1;
    int left = 0, imag = 0, right = 0;
    bool repeated = false;
    for (Scalar z : {z1, z2}) {
      if (z < 0) {
        imag += 2;
      } else if (z > 0) {
        ++left;
        ++right;
      } else {
        imag += 2;
        repeated = true;
      }
    }
    return detail::make_verdict(left, imag, right, repeated);
  }

  if (abs(a1) <= band1 || abs(a3) <= band3) return oracle();

  const Scalar h = marginal_H(q);
  const Scalar band_h = tol * (a1 * a1 * abs(a4) + a3 * a3 + abs(a1 * a2 * a3));
  const Scalar band_b1 = tol * (abs(a1 * a2) + abs(a3));
  const bool leading_positive =
      a1 > band1 && a2 > band2 && a3 > band3;

  // One root at the origin: l (l^3 + a1 l^2 + a2 l + a3).
  if (a4 == 0) {
    if (leading_positive && h < -band_h)
      return detail::make_verdict(3, 1, 0, false);
    if (leading_positive && h == 0)
      return detail::make_verdict(1, 3, 0, false);
    const Scalar b1 = a1 * a2 - a3;
    if (abs(b1) <= band_b1) return oracle();
    const int right = detail::sign_changes({Scalar(1), a1, b1 / a1, a3});
    return detail::make_verdict(3 - right, 1, right, false);
  }
  if (abs(a4) <= band4) return oracle();

  if (h == 0) {
    if (leading_positive && a4 > band4)
      return detail::make_verdict(2, 2, 0, false);
    return oracle();
  }
  if (abs(h) <= band_h) return oracle();

  // Routh array first column: 1, a1, (a1 a2 - a3)/a1, -H/(a1 a2 - a3), a4.
  const Scalar b1 = a1 * a2 - a3;
  if (abs(b1) <= band_b1) return oracle();
  const int right =
      detail::sign_changes({Scalar(1), a1, b1 / a1, -h / b1, a4});
  return detail::make_verdict(4 - right, 0, right, false);
}

/// Bottema's substitution l = c mu with c = a4^(1/4) > 0, giving a quartic
/// with unit constant term and the same verdict.
template <typename Scalar>
QuarticCoeffs<Scalar> normalize_constant_term(const QuarticCoeffs<Scalar>& q) {
  if (!(q.a4 > 0)) throw DomainError("normalize_constant_term: a4 must be positive");
  const Scalar c = std::pow(q.a4, Scalar(1) / 4);
  return {q.a1 / c, q.a2 / (c * c), q.a3 / (c * c * c), Scalar(1)};
}

/// Coefficients of (l^2 + p1 l + q1)(l^2 + p2 l + q2).
template <typename Scalar>
QuarticCoeffs<Scalar> quartic_from_factors(Scalar p1, Scalar q1, Scalar p2, Scalar q2) {
  return {p1 + p2, p1 * p2 + q1 + q2, p1 * q2 + p2 * q1, q1 * q2};
}

}  // namespace stabkit
