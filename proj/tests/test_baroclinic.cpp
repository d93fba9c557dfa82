#include <cmath>
#include <complex>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "stabkit/baroclinic.hpp"
#include "stabkit/errors.hpp"

using namespace stabkit;
using cd = std::complex<double>;

namespace {

BaroclinicParams reference(double U = 0, double r = 0) { return {10, 1, r, 1, 1, U, 0}; }

// det A(c) is quadratic in c: recover it from three samples and solve.
std::pair<cd, cd> roots_from_determinant(const BaroclinicParams& p) {
  auto det = [&](cd c) { return dispersion_matrix(p, c).determinant(); };
  const cd f0 = det(0.0), f1 = det(1.0), fm = det(-1.0);
  const cd a = (f1 + fm) / 2.0 - f0, b = (f1 - fm) / 2.0, c = f0;
  const cd s = std::sqrt(b * b - 4.0 * a * c);
  return {(-b + s) / (2.0 * a), (-b - s) / (2.0 * a)};
}

}  // namespace

TEST(Baroclinic, Thresholds) {
  EXPECT_NEAR(reference().a2(), 1 + M_PI * M_PI, 1e-14);
  EXPECT_NEAR(inviscid_threshold(reference()), 0.1096, 1e-4);
  EXPECT_NEAR(vanishing_viscosity_threshold(reference()), 0.0962, 1e-4);
  BaroclinicParams f = reference();
  f.beta = 0;
  EXPECT_EQ(inviscid_threshold(f), 0);
  BaroclinicParams weak = reference();
  weak.F = 1;
  EXPECT_THROW(inviscid_threshold(weak), DomainError);
  EXPECT_THROW(vanishing_viscosity_threshold(weak), DomainError);
}

TEST(Baroclinic, RootsSolveLayerSystem) {
  for (double U : {0.0, 0.05, 0.12, 0.5})
    for (double r : {0.0, 1e-3, 0.1}) {
      const auto p = reference(U, r);
      const auto d = dispersion(p);
      EXPECT_LT(d.residual, 1e-10);
      const auto [x, y] = roots_from_determinant(p);
      const double scale = std::max({1.0, std::abs(x), std::abs(y)});
      const double e1 = std::abs(d.c1 - x) + std::abs(d.c2 - y);
      const double e2 = std::abs(d.c1 - y) + std::abs(d.c2 - x);
      EXPECT_LT(std::min(e1, e2), 1e-8 * scale) << U << " " << r;
      EXPECT_GE(d.c1.imag(), d.c2.imag());
    }
}

TEST(Baroclinic, InviscidOnsetIsKreinCollision) {
  const double U = inviscid_threshold(reference());
  const auto below = dispersion(reference(U * (1 - 1e-3)));
  EXPECT_EQ(below.c1.imag(), 0);
  EXPECT_EQ(below.c2.imag(), 0);
  EXPECT_GT(std::abs(below.c1 - below.c2), 0);
  const auto above = dispersion(reference(U * (1 + 1e-3)));
  EXPECT_GT(above.growth1, 0);
  EXPECT_NEAR(above.c1.imag(), -above.c2.imag(), 1e-14);
  EXPECT_NEAR(critical_shear_bisected(reference()), U, 1e-6 * U);
}

TEST(Baroclinic, VanishingFrictionOnset) {
  const double U = vanishing_viscosity_threshold(reference());
  EXPECT_NEAR(critical_shear_bisected(reference(0, 1e-6)), U, 1e-3 * U);
  EXPECT_LT(critical_shear_bisected(reference(0, 1e-3)), inviscid_threshold(reference()));
}

TEST(Baroclinic, SmallFrictionContinuityAwayFromCollision) {
  const double Uc = inviscid_threshold(reference());
  for (int i = 0; i <= 200; ++i) {
    const double U = 0.3 * i / 200;
    if (std::abs(U - Uc) < 0.02) continue;
    const auto a = dispersion(reference(U, 0)), b = dispersion(reference(U, 1e-6));
    // Real pairs carry no order, so match them either way.
    const double d = std::min(std::abs(a.c1 - b.c1) + std::abs(a.c2 - b.c2),
                              std::abs(a.c1 - b.c2) + std::abs(a.c2 - b.c1));
    EXPECT_LT(d, 1e-3) << U;
  }
  // Between the two thresholds the sign of the growth rate differs.
  const double Um = 0.5 * (Uc + vanishing_viscosity_threshold(reference()));
  EXPECT_EQ(dispersion(reference(Um, 0)).growth1, 0);
  EXPECT_GT(dispersion(reference(Um, 1e-6)).growth1, 0);
}

TEST(Baroclinic, Ordering) {
  int both = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      BaroclinicParams p = reference();
      p.F = 1 + 49.0 * i / 19;
      p.alpha = 0.1 + 4.9 * j / 19;
      if (2 * p.F <= p.a2()) continue;
      ++both;
      EXPECT_LT(vanishing_viscosity_threshold(p), inviscid_threshold(p));
    }
  EXPECT_GT(both, 50);
}

TEST(Baroclinic, Portrait) {
  const auto rows = merging_portrait(reference(), 0, 0.2, 81);
  ASSERT_EQ(rows.size(), 81u);
  const double Uc = inviscid_threshold(reference());
  for (const auto& r : rows) {
    if (r.U < Uc - 1e-9) {
      EXPECT_EQ(r.roots.growth1, 0);
    } else if (r.U > Uc + 1e-9) {
      EXPECT_GT(r.roots.growth1, 0);
    }
  }
  BaroclinicParams damped = reference();
  damped.r = 1e-3;
  const auto imperfect = merging_portrait(damped, 0, 0.2, 81);
  for (const auto& r : imperfect) EXPECT_LT(r.roots.growth2, 0);
  double onset = INFINITY;
  for (const auto& r : imperfect)
    if (r.roots.growth1 > 0) onset = std::min(onset, r.U);
  EXPECT_LT(onset, Uc);
  EXPECT_LT(imperfect.front().roots.growth1, 0);
  EXPECT_THROW(merging_portrait(reference(), 1, 0, 10), DomainError);
}
