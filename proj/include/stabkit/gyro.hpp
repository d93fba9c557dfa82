#pragma once

// Gyroscopic systems x'' + Omega G x' + K x = 0 in m degrees of freedom and
// their perturbation by damping delta D and circulatory forces nu N.
// Krein collisions of imaginary eigenvalues are located numerically, the
// Jordan chain at the collision is computed, and the first-order expansions
// built on it give the singular critical surface Omega_cr(delta, nu).

#include <complex>
#include <utility>

#include <Eigen/Core>

#include "stabkit/quartic.hpp"

namespace stabkit {

struct GyroSystem {
  Eigen::MatrixXd K, D, G, N;
  double omega = 0, delta = 0, nu = 0;

  GyroSystem(Eigen::MatrixXd K, Eigen::MatrixXd D, Eigen::MatrixXd G, Eigen::MatrixXd N,
             double omega = 0, double delta = 0, double nu = 0);

  /// m = 2 with the canonical skew G = N = [[0,1],[-1,0]].
  static GyroSystem two_dof(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D,
                            double omega = 0, double delta = 0, double nu = 0);

  int dim() const { return static_cast<int>(K.rows()); }
  GyroSystem with(double omega, double delta, double nu) const;
  bool canonical_two_dof() const;
};

/// First-order 2m x 2m matrix for y = (x, x' + Omega G x / 2).
Eigen::MatrixXd first_order_matrix(const GyroSystem& s);

Eigen::VectorXcd spectrum(const GyroSystem& s);

/// max Re over the spectrum.
double spectral_abscissa(const GyroSystem& s);

/// Unstable by the quartic verdict when m = 2 with canonical G, N and by the
/// spectral abscissa otherwise.
bool gyro_unstable(const GyroSystem& s);

struct KreinCollisionData {
  explicit KreinCollisionData(GyroSystem s) : system(std::move(s)) {}

  GyroSystem system;  // the Hamiltonian system (delta = nu = 0) at the collision
  double collision_speed = 0;      // Omega_0
  double collision_frequency = 0;  // omega_0
  Eigen::VectorXcd u0, u1;         // Jordan chain, |u0| = 1, u0^H u1 = 0
  double mu2 = 0, mu = 0;          // splitting rate, mu = sqrt(|mu2|)
  double d1 = 0, d2 = 0, n1 = 0, n2 = 0, gamma_star = 0;
  double null_residual = 0;   // |L0 u0|
  double chain_residual = 0;  // |L0 u1 + (2 i w0 I + W0 G) u0|
};

/// Recomputes mu2, mu, d1, d2, n1, n2, gamma_star from u0 and u1.
void update_krein_coefficients(KreinCollisionData& data);

/// Replaces u1 by u1 + c u0 (another admissible chain) and refreshes the
/// derived scalars.
KreinCollisionData regauge_chain(const KreinCollisionData& data, std::complex<double> c);

/// Scans Omega over [lo, hi] for the minimal gap between imaginary
/// eigenvalues, refines it by golden section and builds the Jordan chain.
/// Only K, D, G, N of `s` are used.
KreinCollisionData find_krein_collision(const GyroSystem& s, double lo, double hi,
                                        int scan_points = 2000);

/// Same with the interval [0, 4 sqrt(max|eig K|) + 1].
KreinCollisionData find_krein_collision(const GyroSystem& s);

/// Two-term expansion i w0 +- i mu sqrt(Omega - Omega_0) (complex sqrt).
std::pair<std::complex<double>, std::complex<double>> krein_splitting(
    const KreinCollisionData& data, double omega);

struct ImaginaryMode {
  double frequency = 0;  // eigenvalue i * frequency
  Eigen::VectorXcd u;    // null vector of -w^2 I + i w Omega G + K, |u| = 1
};

/// Exact simple imaginary eigenvalue of the Hamiltonian system at Omega that
/// continues the branch +-1 of the collision.
ImaginaryMode unperturbed_mode(const KreinCollisionData& data, double omega, int branch);

/// First-order increment of i w(Omega) under delta D + nu N.
std::complex<double> eigenvalue_increment(const KreinCollisionData& data, double omega,
                                          double delta, double nu, int branch);

/// Ratio nu / delta keeping the branch on the imaginary axis to first order.
double gamma_neutral(const KreinCollisionData& data, double omega, int branch);

/// Directional limit Omega_0 + n1^2 (gamma - gamma_*)^2 / (mu^2 den^2).
double omega_cr_ray(const KreinCollisionData& data, double gamma);

/// The umbrella surface Omega_0 + n1^2 (nu - gamma_* delta)^2 / (mu^2 den^2 delta^2),
/// den = w0 d2 - gamma_* n2 - d1.
double omega_cr_surface(const KreinCollisionData& data, double delta, double nu);

struct TwoDofCollision {
  double collision_speed = 0;
  double collision_frequency = 0;
};

/// w0 = detK^(1/4), Omega_0 = sqrt(-trK + 2 sqrt(detK)) for detK > 0, trK < 0.
TwoDofCollision krein_collision_two_dof(const Eigen::Matrix2d& K);

/// gamma_* = (tr(KD) + (Omega_0^2 - w0^2) trD) / (2 Omega_0).
double gamma_star_two_dof(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D);

/// Omega_0 + 2 Omega_0 (nu - gamma_* delta)^2 / ((w0 trD)^2 delta^2).
double omega_cr_two_dof(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D, double delta,
                        double nu);

/// Bisected critical Omega in [lo, hi] for the system with its delta and nu;
/// `lo` must be unstable and `hi` is expanded until stable.
double omega_cr_bisected(const GyroSystem& s, double lo, double hi, double tol = 1e-12);

struct MaxwellBlochParams {
  double omega = 0, delta = 0, nu = 0, kappa = 0;
};

/// Real quartic of x'' + (delta + i Omega) x' + (kappa + i nu) x = 0.
Quartic maxwell_bloch_quartic(const MaxwellBlochParams& p);

StabilityVerdict maxwell_bloch_verdict(const MaxwellBlochParams& p);

/// delta^2 kappa + delta Omega nu - nu^2; positive together with delta > 0
/// is asymptotic stability.
double maxwell_bloch_margin(const MaxwellBlochParams& p);

/// Closed-form asymptotic stability; for nu = 0 the quartic verdict decides.
bool maxwell_bloch_stable_closed_form(const MaxwellBlochParams& p);

/// Boundary nu = (Omega +- sqrt(Omega^2 + 4 kappa)) delta / 2; throws
/// DomainError when Omega^2 + 4 kappa < 0.
std::pair<double, double> maxwell_bloch_boundary_nu(double omega, double delta, double kappa);

/// Local branches +-2 sqrt(-kappa) +- (nu -+ delta sqrt(-kappa))^2 / (sqrt(-kappa) delta^2).
std::pair<double, double> hauger_omega_cr(double delta, double nu, double kappa);

/// Gyropendulum data (I, I0, b, r, mgs, eta, T, k) to Maxwell-Bloch form.
MaxwellBlochParams hauger_parameters(double I, double I0, double b, double r, double mgs,
                                     double eta, double T, double k);

}  // namespace stabkit
