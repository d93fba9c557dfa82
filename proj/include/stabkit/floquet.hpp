#pragma once

// Parametrically excited rotor
//   x'' + 2 alpha y' + (1 + 4 eps eta^2 cos 2 eta t) x + mu x' = 0,
//   y'' - 2 alpha x' + (1 + 4 eps eta^2 cos 2 eta t) y + mu y' = 0,
// with mu = 2 eps kappa: monodromy over T = pi/eta, Floquet multipliers and
// the first sum-resonance tongue near eta = sqrt(1 + alpha^2).

#include <array>
#include <complex>
#include <vector>

#include <Eigen/Core>

namespace stabkit {

struct RotorParams {
  double alpha = 0;
  double eps = 0;
  double eta = 1;
  double kappa = 0;  // damping scale; mu = 2 eps kappa

  double damping() const { return 2 * eps * kappa; }
  void validate() const;
};

inline constexpr int kDefaultFloquetSteps = 1024;
inline constexpr double kMultiplierTol = 1e-9;

struct FloquetResult {
  std::array<std::complex<double>, 4> multipliers;
  double max_modulus = 0;
  bool stable = false;  // max_modulus <= 1 + kMultiplierTol
  Eigen::Matrix4d monodromy;
  double liouville_error = 0;  // |det Phi - exp(-2 mu T)| / exp(-2 mu T)
};

/// Classical RK4 over one period, repeated with doubled steps; throws
/// IntegrationError when the two monodromy matrices differ by more than
/// 1e-6 relative.
FloquetResult monodromy(const RotorParams& p, int steps = kDefaultFloquetSteps);

/// Monodromy matrix alone with a fixed number of RK4 steps (no step check).
Eigen::Matrix4d monodromy_matrix(const RotorParams& p, int steps);

struct MathieuResult {
  std::array<std::complex<double>, 2> multipliers;
  double max_modulus = 0;
  bool stable = false;
};

/// v'' + (a + 4 eps cos 2 tau) v = 0 over tau in [0, pi].
MathieuResult mathieu_monodromy(double a, double eps, int steps = kDefaultFloquetSteps);

struct ReductionCheck {
  int compared = 0;
  int disagreements = 0;  // verdicts that differ outside the band
  double max_modulus_deviation = 0;
};

/// Compares the rotor verdict (mu = 0) with that of the reduced scalar
/// equation with a = (1 + alpha^2) / eta^2 on every eta of the grid. Points
/// whose max modulus lies in (1 + kMultiplierTol, 1 + band] for either
/// system are not counted.
ReductionCheck mathieu_reduction_check(const RotorParams& p, const std::vector<double>& etas,
                                       double band = 1e-6);

/// sqrt(1 + alpha^2) (1 + side eps).
double tongue_boundary_undamped_estimate(double alpha, double eps, int side);

/// eta_0 (1 + side sqrt((1 + alpha^2) eps^2 - (mu / (2 eta_0))^2)); throws
/// NoBoundary when the radicand is negative.
double tongue_boundary_damped_estimate(double alpha, double eps, double mu, int side);

/// Bisected edge (side = +1 upper, -1 lower) of the first tongue; `p.eta`
/// is ignored.
double tongue_boundary(const RotorParams& p, int side, double tol = 1e-10);

}  // namespace stabkit
