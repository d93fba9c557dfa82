#pragma once

// Beck's column: a cantilever on [0, 1] under a follower load q,
//   u'''' + q u'' + lambda (d1 u'''' + d2 u) + lambda^2 u = 0,
//   u(0) = u'(0) = 0,  u''(1) = u'''(1) = 0,
// discretized by Galerkin projection on the clamped-free beam modes.

#include <complex>
#include <utility>

#include <Eigen/Core>

namespace stabkit {

struct BeckParams {
  double q = 0;
  double d1 = 0;  // internal (Kelvin-Voigt) damping
  double d2 = 0;  // external damping
  int n_modes = 12;

  void validate() const;
};

/// Clamped-free modes phi_k (normalized in L2) and their projections.
struct GalerkinBasis {
  int n = 0;
  Eigen::VectorXd beta;  // roots of cos b cosh b = -1
  Eigen::MatrixXd M;     // (phi_i, phi_j)
  Eigen::MatrixXd P2;    // (phi_i, phi_j''), not symmetric
  Eigen::MatrixXd P4;    // (phi_i, phi_j'''')
  double quadrature_change = 0;  // max relative entry change on refinement
};

/// k-th clamped-free wavenumber (k >= 1).
double clamped_free_root(int k);

/// phi(x) and phi''(x) of the k-th mode before normalization.
std::pair<double, double> clamped_free_mode(double beta, double x);

/// Cached per n; thread-safe. Throws QuadratureError when doubling the panel
/// count changes any entry by more than 1e-10 relative.
const GalerkinBasis& clamped_free_basis(int n);

struct GalerkinSystem {
  BeckParams params;
  Eigen::MatrixXd M, Dmat, Kmat;
};

GalerkinSystem assemble(const BeckParams& p);

/// The 2n eigenvalues of lambda^2 M + lambda Dmat + Kmat.
Eigen::VectorXcd beck_spectrum(const GalerkinSystem& s);

struct FlutterPoint {
  double q_cr = 0;
  double omega_cr = 0;
};

inline constexpr double kBeckCeiling = 60.0;

/// First flutter load: coalescence of imaginary pairs without damping,
/// first crossing of max Re lambda through 0 with damping.
FlutterPoint flutter_load(double d1, double d2, int n_modes = 12, double ceiling = kBeckCeiling,
                          double tol = 1e-10);

inline constexpr double kBeckUndampedLoad = 20.05;

/// q0 - 1902 d1^2 / (14.34 d1 + 0.091 d2)^2 + 12.68 d1 d2 + 0.053 d2^2.
double be12_surface(double d1, double d2);

}  // namespace stabkit
