#pragma once

// Two-layer quasi-geostrophic channel flow with Ekman friction r:
// normal modes phi ~ exp(i alpha (x - c t)) sin(m pi y) and the quadratic
// dispersion relation for the complex phase speed c.

#include <complex>
#include <vector>

#include <Eigen/Core>

namespace stabkit {

struct BaroclinicParams {
  double F = 1;      // internal rotational Froude number
  double beta = 0;   // planetary vorticity gradient
  double r = 0;      // Ekman dissipation
  double alpha = 1;  // zonal wavenumber
  int m = 1;         // meridional mode
  double U1 = 0, U2 = 0;

  double a2() const;  // alpha^2 + m^2 pi^2
  double shear() const { return U1 - U2; }
  void validate() const;
};

struct DispersionRoots {
  std::complex<double> c1, c2;  // ordered by decreasing Im c
  double growth1 = 0, growth2 = 0;  // alpha Im c
  double residual = 0;  // max |det| of the layer system, relative
};

/// 2x2 layer-amplitude matrix at phase speed c; its determinant vanishes on
/// the dispersion relation.
Eigen::Matrix2cd dispersion_matrix(const BaroclinicParams& p, std::complex<double> c);

/// Roots of A (c'^2 - U^2/4) + 2 (a^2 + F)(beta + i R) c' + (beta + i R)^2 + a^2 F U^2 = 0
/// with c = (U1 + U2)/2 + c', A = a^2 (a^2 + 2F), R = r a^2 / alpha.
DispersionRoots dispersion(const BaroclinicParams& p);

inline constexpr double kGrowthTol = 1e-12;

bool baroclinic_unstable(const BaroclinicParams& p);

/// 2 beta F / (a^2 sqrt(4F^2 - a^4)); DomainError when 4F^2 <= a^4.
double inviscid_threshold(const BaroclinicParams& p);

/// 2 beta F / (a (a^2 + F) sqrt(2F - a^2)); DomainError when 2F <= a^2.
double vanishing_viscosity_threshold(const BaroclinicParams& p);

/// Smallest shear U1 - U2 >= 0 with Im c > kGrowthTol at the given r (U2
/// kept, U1 varied).
double critical_shear_bisected(const BaroclinicParams& p, double tol = 1e-13);

struct PortraitRow {
  double U = 0;
  DispersionRoots roots;
};

/// Both roots on `count` equally spaced shears in [U_lo, U_hi].
std::vector<PortraitRow> merging_portrait(const BaroclinicParams& p, double U_lo, double U_hi,
                                          int count);

}  // namespace stabkit
