#pragma once

// Two-degree-of-freedom non-conservative systems
//   x'' + (delta D + Omega G) x' + (K + nu N) x = 0,  G = N = [[0,1],[-1,0]],
// their characteristic quartic, the critical circulatory parameter with and
// without damping, and two concrete instances (Ziegler's double pendulum and
// Hulten's drum-brake model).

#include <Eigen/Core>

#include "stabkit/quartic.hpp"

namespace stabkit {

/// Canonical 2x2 skew matrix [[0,1],[-1,0]].
inline Eigen::Matrix2d unit_skew() {
  Eigen::Matrix2d j;
  j << 0, 1, -1, 0;
  return j;
}

struct SystemMatrices2 {
  Eigen::Matrix2d K = Eigen::Matrix2d::Zero();  // symmetric stiffness
  double nu = 0;                                // circulatory magnitude
  Eigen::Matrix2d D = Eigen::Matrix2d::Zero();  // symmetric damping shape
  double delta = 0;                             // damping magnitude
  double omega = 0;                             // gyroscopic magnitude

  SystemMatrices2() = default;
  SystemMatrices2(const Eigen::Matrix2d& K, double nu, const Eigen::Matrix2d& D,
                  double delta, double omega);

  /// Splits arbitrary velocity and position matrices B, A into their
  /// symmetric and skew parts (delta = 1, D = sym B, Omega = skew(B)_12,
  /// K = sym A, nu = skew(A)_12).
  static SystemMatrices2 from_general(const Eigen::Matrix2d& B, const Eigen::Matrix2d& A);

  Eigen::Matrix2d position_matrix() const { return K + nu * unit_skew(); }
  Eigen::Matrix2d velocity_matrix() const { return delta * D + omega * unit_skew(); }
};

/// Monic quartic det(M l^2 + B l + C) / det M for general 2x2 M, B, C.
Quartic characteristic_quartic(const Eigen::Matrix2d& M, const Eigen::Matrix2d& B,
                               const Eigen::Matrix2d& C);

/// a1 = tr(dD), a2 = trK + det(dD) + W^2, a3 = trK tr(dD) - tr(K dD) + 2 W nu,
/// a4 = detK + nu^2 (dD = delta D, W = Omega).
Quartic quartic_from_system(const SystemMatrices2& s);

/// nu_0 = sqrt((trK/2)^2 - detK): flutter threshold without damping.
double nu_critical_undamped(const Eigen::Matrix2d& K);

/// (2 tr(KD) - trK trD) / (2 trD), the quantity whose square separates the
/// damped limit from the undamped threshold.
double damping_shape_defect(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D);

/// Zero-damping limit nu_cr = sqrt(nu_0^2 - defect^2) of the critical
/// circulatory parameter.
double nu_critical_damped_limit(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D);

/// First-order form nu_0 - defect^2 / (2 nu_0).
double nu_critical_damped_limit_approx(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D);

/// Finite-damping threshold for k12 = 0 and Omega = 0, where D already
/// includes its magnitude. Cross-check only; the invariant forms above do not
/// need k12 = 0.
double nu_critical_finite_damping(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D);

/// Bisected critical nu for the system (K, D, delta, Omega = 0): the smallest
/// nu > 0 at which the verdict turns Unstable.
double nu_critical_bisected(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D,
                            double delta, double tol = 1e-12);

struct ZieglerParams {
  double m = 1, l = 1, c = 1;
  double b = 0;  // joint damping, b1 = b2 = b
  double P = 0;  // follower load

  void validate() const;
};

/// Quartic of the double pendulum with masses 2m, m on rods of length l.
Quartic ziegler_quartic(const ZieglerParams& p);

/// (7/2 - sqrt 2) c/l for b = 0, otherwise (41/28) c/l + b^2 / (2 m l^3).
double ziegler_critical_load(const ZieglerParams& p);

/// Flutter load found by bisecting the quartic verdict in P (the b in `p` is
/// used, P is ignored).
double ziegler_critical_load_bisected(const ZieglerParams& p, double tol = 1e-12);

struct HultenParams {
  double w1 = 1, w2 = 1;      // natural pulsations
  double eta1 = 0, eta2 = 0;  // relative damping
  double mu = 0;              // friction coefficient

  void validate() const;
};

Quartic hulten_quartic(const HultenParams& p);

/// |w1^2 - w2^2| / (2 w1 w2), where the undamped biquadratic loses condition B.
double hulten_critical_mu_undamped(double w1, double w2);

/// Bisected friction coefficient at flutter onset (mu in `p` ignored).
double hulten_critical_mu(const HultenParams& p, double tol = 1e-12);

}  // namespace stabkit
