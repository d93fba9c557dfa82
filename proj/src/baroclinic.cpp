#include "stabkit/baroclinic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>

#include "stabkit/errors.hpp"
#include "stabkit/sweep.hpp"

namespace stabkit {

namespace {
using cd = std::complex<double>;
constexpr cd I1{0, 1};
}  // namespace

double BaroclinicParams::a2() const {
  const double k = m * std::numbers::pi;
  return alpha * alpha + k * k;
}

void BaroclinicParams::validate() const {
  if (!(F > 0)) throw DomainError("BaroclinicParams: F must be positive");
  if (!(beta >= 0)) throw DomainError("BaroclinicParams: beta must be >= 0");
  if (!(r >= 0)) throw DomainError("BaroclinicParams: r must be >= 0");
  if (!(alpha > 0)) throw DomainError("BaroclinicParams: alpha must be positive");
  if (m < 1) throw DomainError("BaroclinicParams: m must be >= 1");
  if (!std::isfinite(U1) || !std::isfinite(U2)) throw DomainError("BaroclinicParams: non-finite U");
}

Eigen::Matrix2cd dispersion_matrix(const BaroclinicParams& p, cd c) {
  const double a2 = p.a2(), F = p.F, U = p.shear();
  const cd iR = I1 * (p.r * a2 / p.alpha);
  const cd s1 = p.U1 - c, s2 = p.U2 - c;
  Eigen::Matrix2cd A;
  A << -s1 * (a2 + F) + p.beta + F * U + iR, s1 * F,
       s2 * F, -s2 * (a2 + F) + p.beta - F * U + iR;
  return A;
}

DispersionRoots dispersion(const BaroclinicParams& p) {
  p.validate();
  const double a2 = p.a2(), F = p.F, U = p.shear();
  const double lead = a2 * (a2 + 2 * F);
  if (lead == 0) throw DegenerateQuadratic("dispersion: leading coefficient vanishes");
  const cd b = p.beta + I1 * (p.r * a2 / p.alpha);
  const cd half_lin = (a2 + F) * b;  // linear coefficient / 2
  const cd c0 = b * b + a2 * F * U * U - lead * U * U / 4;
  const cd disc = std::sqrt(half_lin * half_lin - lead * c0);
  // Cancellation-free pair of roots.
  const cd qq = -(half_lin + (std::real(std::conj(half_lin) * disc) >= 0 ? disc : -disc));
  cd r1, r2;
  if (qq == cd(0)) {
    r1 = r2 = cd(0);
  } else {
    r1 = qq / lead;
    r2 = c0 / qq;
  }
  const double um = 0.5 * (p.U1 + p.U2);
  DispersionRoots out;
  out.c1 = um + r1;
  out.c2 = um + r2;
  if (out.c2.imag() > out.c1.imag()) std::swap(out.c1, out.c2);
  out.growth1 = p.alpha * out.c1.imag();
  out.growth2 = p.alpha * out.c2.imag();

  // Residual of the layer determinant, scaled by its size at that c.
  for (cd c : {out.c1, out.c2}) {
    const Eigen::Matrix2cd A = dispersion_matrix(p, c);
    const double scale = std::abs(A(0, 0) * A(1, 1)) + std::abs(A(0, 1) * A(1, 0));
    out.residual = std::max(out.residual, std::abs(A.determinant()) / std::max(scale, 1e-300));
  }
  return out;
}

bool baroclinic_unstable(const BaroclinicParams& p) {
  return dispersion(p).c1.imag() > kGrowthTol;
}

double inviscid_threshold(const BaroclinicParams& p) {
  p.validate();
  const double a2 = p.a2();
  const double r = 4 * p.F * p.F - a2 * a2;
  if (!(r > 0)) throw DomainError("inviscid_threshold: requires 4F^2 > a^4");
  return 2 * p.beta * p.F / (a2 * std::sqrt(r));
}

double vanishing_viscosity_threshold(const BaroclinicParams& p) {
  p.validate();
  const double a2 = p.a2();
  const double r = 2 * p.F - a2;
  if (!(r > 0)) throw DomainError("vanishing_viscosity_threshold: requires 2F > a^2");
  return 2 * p.beta * p.F / (std::sqrt(a2) * (a2 + p.F) * std::sqrt(r));
}

double critical_shear_bisected(const BaroclinicParams& p, double tol) {
  p.validate();
  auto unstable = [&](double U) {
    BaroclinicParams q = p;
    q.U1 = p.U2 + U;
    return baroclinic_unstable(q);
  };
  if (unstable(0.0)) throw NoBracket("critical_shear_bisected: unstable without shear");
  const double hi = expand_bracket(unstable, 0.0, 0.01, 2.0, 80);
  return bisect_boundary(unstable, 0.0, hi, tol);
}

std::vector<PortraitRow> merging_portrait(const BaroclinicParams& p, double U_lo, double U_hi,
                                          int count) {
  if (count < 2 || !(U_lo < U_hi)) throw DomainError("merging_portrait: bad shear range");
  std::vector<PortraitRow> rows(count);
  for (int i = 0; i < count; ++i) {
    BaroclinicParams q = p;
    const double U = U_lo + (U_hi - U_lo) * i / (count - 1);
    q.U1 = p.U2 + U;
    rows[i] = {U, dispersion(q)};
  }
  return rows;
}

}  // namespace stabkit
