#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "stabkit/circulatory.hpp"

using namespace stabkit;

namespace {

Eigen::Matrix2d diag2(double a, double b) { return Eigen::Vector2d(a, b).asDiagonal(); }

Eigen::Matrix2d sym2(double a11, double a12, double a22) {
  Eigen::Matrix2d m;
  m << a11, a12, a12, a22;
  return m;
}

// Characteristic polynomial det(l I - C) of a 4x4 matrix from the power
// sums tr(C^k) (Newton identities).
Eigen::Vector4d char_poly(const Eigen::Matrix4d& C) {
  Eigen::Matrix4d P = C;
  double p[5];
  for (int k = 1; k <= 4; ++k) {
    p[k] = P.trace();
    P = P * C;
  }
  Eigen::Vector4d a;
  a(0) = -p[1];
  a(1) = -(a(0) * p[1] + p[2]) / 2;
  a(2) = -(a(1) * p[1] + a(0) * p[2] + p[3]) / 3;
  a(3) = -(a(2) * p[1] + a(1) * p[2] + a(0) * p[3] + p[4]) / 4;
  return a;
}

}  // namespace

TEST(QuarticFromSystem, Examples) {
  const SystemMatrices2 s(diag2(1, 4), 0, Eigen::Matrix2d::Zero(), 0, 0);
  const Quartic q = quartic_from_system(s);
  EXPECT_EQ(q.a1, 0);
  EXPECT_EQ(q.a2, 5);
  EXPECT_EQ(q.a3, 0);
  EXPECT_EQ(q.a4, 4);
  const Quartic r = quartic_from_system(SystemMatrices2(diag2(1, 4), 2, Eigen::Matrix2d::Zero(), 0, 0));
  EXPECT_EQ(r.a4, 8);
}

TEST(QuarticFromSystem, RejectsAsymmetricInput) {
  Eigen::Matrix2d K;
  K << 1, 2, 3, 4;
  EXPECT_THROW(SystemMatrices2(K, 0, Eigen::Matrix2d::Identity(), 1, 0), DomainError);
}

TEST(QuarticFromSystem, MatchesFirstOrderMatrix) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 10000; ++i) {
    const SystemMatrices2 s(sym2(u(rng), u(rng), u(rng)), u(rng), sym2(u(rng), u(rng), u(rng)),
                            std::abs(u(rng)), u(rng));
    Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
    C.topRightCorner<2, 2>().setIdentity();
    C.bottomLeftCorner<2, 2>() = -s.position_matrix();
    C.bottomRightCorner<2, 2>() = -s.velocity_matrix();
    const Eigen::Vector4d ref = char_poly(C);
    const Quartic q = quartic_from_system(s);
    const Eigen::Vector4d got(q.a1, q.a2, q.a3, q.a4);
    for (int k = 0; k < 4; ++k)
      ASSERT_NEAR(got(k), ref(k), 1e-10 * std::max(1.0, std::abs(ref(k)))) << "sample " << i;
  }
}

TEST(QuarticFromSystem, GeneralSplitMatchesDeterminant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 1000; ++i) {
    Eigen::Matrix2d B, A;
    B << u(rng), u(rng), u(rng), u(rng);
    A << u(rng), u(rng), u(rng), u(rng);
    const Quartic q = quartic_from_system(SystemMatrices2::from_general(B, A));
    const Quartic r = characteristic_quartic(Eigen::Matrix2d::Identity(), B, A);
    EXPECT_NEAR(q.a1, r.a1, 1e-12);
    EXPECT_NEAR(q.a2, r.a2, 1e-12);
    EXPECT_NEAR(q.a3, r.a3, 1e-12);
    EXPECT_NEAR(q.a4, r.a4, 1e-12);
    // det(l^2 + B l + A) at l = 0.7 - 0.3i
    const std::complex<double> l(0.7, -0.3);
    const Eigen::Matrix2cd Ml = l * l * Eigen::Matrix2cd::Identity() + l * B.cast<std::complex<double>>() +
                                A.cast<std::complex<double>>();
    const auto det = Ml(0, 0) * Ml(1, 1) - Ml(0, 1) * Ml(1, 0);
    const auto poly = (((l + q.a1) * l + q.a2) * l + q.a3) * l + q.a4;
    EXPECT_NEAR(std::abs(det - poly), 0.0, 1e-12);
  }
}

TEST(NuCritical, Undamped) {
  EXPECT_DOUBLE_EQ(nu_critical_undamped(diag2(1, 4)), 1.5);
  EXPECT_DOUBLE_EQ(nu_critical_undamped(diag2(3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(nu_critical_undamped(diag2(1, 9)), 4.0);
  // Rotation invariance: the threshold depends on K only through trK, detK.
  const double c = std::cos(0.4), s = std::sin(0.4);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  EXPECT_NEAR(nu_critical_undamped(R * diag2(1, 9) * R.transpose()), 4.0, 1e-14);
}

TEST(NuCritical, DampedLimitExamples) {
  EXPECT_NEAR(nu_critical_damped_limit(diag2(1, 4), Eigen::Matrix2d::Identity()), 1.5, 1e-15);
  EXPECT_NEAR(damping_shape_defect(diag2(1, 4), diag2(1, 0)), -1.5, 1e-15);
  EXPECT_NEAR(nu_critical_damped_limit(diag2(1, 4), diag2(1, 0)), 0.0, 1e-15);
  EXPECT_THROW(nu_critical_damped_limit(diag2(1, 4), diag2(-1, 0)), DomainError);
  EXPECT_THROW(nu_critical_damped_limit(diag2(1, 4), diag2(1, -3)), DomainError);
}

TEST(NuCritical, DampedLimitBelowUndamped) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 5), v(-1, 1);
  for (int i = 0; i < 2000; ++i) {
    const Eigen::Matrix2d K = sym2(u(rng), v(rng), u(rng)), D = sym2(u(rng), v(rng), u(rng));
    double lim;
    try {
      lim = nu_critical_damped_limit(K, D);
    } catch (const DomainError&) {
      continue;
    }
    EXPECT_LE(lim, nu_critical_undamped(K) + 1e-14);
  }
}

TEST(NuCritical, BisectedConvergesToLimit) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.5, 4), v(-0.5, 0.5);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 25; ++i) {
    const Eigen::Matrix2d K = sym2(u(rng), v(rng), u(rng));
    Eigen::Matrix2d D = sym2(u(rng), v(rng), u(rng));
    const double nu0 = nu_critical_undamped(K);
    if (nu0 < 0.2) continue;
    double lim;
    try {
      lim = nu_critical_damped_limit(K, D);
    } catch (const DomainError&) {
      continue;
    }
    if (lim < 0.1 * nu0) continue;
    ++checked;
    double prev = INFINITY;
    for (double delta : {1e-3, 1e-4, 1e-5}) {
      const double err = std::abs(nu_critical_bisected(K, D, delta) - lim);
      EXPECT_LE(err, 50 * nu0 * delta) << "delta " << delta;
      EXPECT_LE(err, prev + 1e-9);
      prev = err;
    }
    // Jump size: nu0 - nu_cr = defect^2 / (nu0 + nu_cr).
    const double defect = damping_shape_defect(K, D);
    const double gap = nu0 - nu_critical_bisected(K, D, 1e-6);
    EXPECT_NEAR(gap, defect * defect / (nu0 + lim), 1e-4 * nu0);
  }
  EXPECT_GE(checked, 10);
}

TEST(NuCritical, FirstOrderApproximation) {
  const Eigen::Matrix2d K = diag2(1, 4);
  const Eigen::Matrix2d D = sym2(1, 0, 0.9);
  const double exact = nu_critical_damped_limit(K, D);
  const double approx = nu_critical_damped_limit_approx(K, D);
  const double d = damping_shape_defect(K, D);
  EXPECT_NEAR(approx, exact, std::pow(d, 4) / std::pow(nu_critical_undamped(K), 3));
}

TEST(NuCritical, FiniteDampingCrossCheck) {
  const Eigen::Matrix2d K = diag2(1, 4);
  for (const Eigen::Matrix2d& D : {diag2(1, 2), Eigen::Matrix2d(sym2(2, 0.5, 1))}) {
    for (double delta : {0.3, 0.05, 1e-3}) {
      EXPECT_NEAR(nu_critical_finite_damping(K, delta * D), nu_critical_bisected(K, D, delta), 1e-9);
    }
  }
  // Singular D: the threshold is 0 and the bisection stops at the resolution
  // of the verdict, where the growth rate drops below sqrt(eps).
  for (double delta : {0.3, 0.05}) {
    EXPECT_EQ(nu_critical_finite_damping(K, delta * diag2(1, 0)), 0);
    EXPECT_LT(nu_critical_bisected(K, diag2(1, 0), delta), 1e-4);
  }
  EXPECT_THROW(nu_critical_finite_damping(sym2(1, 0.2, 4), Eigen::Matrix2d::Identity()), DomainError);
}

TEST(Ziegler, VerdictExamples) {
  ZieglerParams p;
  p.P = 1;
  EXPECT_EQ(hurwitz_verdict(ziegler_quartic(p)).label, StabilityLabel::MarginallyStable);
  p.P = 2.2;
  EXPECT_EQ(hurwitz_verdict(ziegler_quartic(p)).label, StabilityLabel::Unstable);
  p.b = 0.5;
  p.P = 0.9 * ziegler_critical_load(p);
  EXPECT_EQ(hurwitz_verdict(ziegler_quartic(p)).label, StabilityLabel::AsymptoticallyStable);
  p.P = 1.1 * ziegler_critical_load(p);
  EXPECT_EQ(hurwitz_verdict(ziegler_quartic(p)).label, StabilityLabel::Unstable);
}

TEST(Ziegler, CriticalLoads) {
  ZieglerParams p;
  EXPECT_NEAR(ziegler_critical_load(p), 3.5 - std::sqrt(2.0), 1e-15);
  p.b = 1;
  EXPECT_NEAR(ziegler_critical_load(p), 41.0 / 28 + 0.5, 1e-15);
}

TEST(Ziegler, AnalyticMatchesBisection) {
  ZieglerParams p;
  for (int k = 0; k <= 16; ++k) {
    p.b = std::pow(10.0, -4 + k * 0.25);
    EXPECT_NEAR(ziegler_critical_load(p), ziegler_critical_load_bisected(p), 1e-8) << "b=" << p.b;
  }
  p.b = 0;
  EXPECT_NEAR(ziegler_critical_load(p), ziegler_critical_load_bisected(p), 1e-10);
}

TEST(Ziegler, DimensionalParameters) {
  ZieglerParams p{2.0, 0.5, 3.0, 0.0, 0.0};
  EXPECT_NEAR(ziegler_critical_load_bisected(p), (3.5 - std::sqrt(2.0)) * 3.0 / 0.5, 1e-8);
  p.b = 0.2;
  EXPECT_NEAR(ziegler_critical_load_bisected(p), ziegler_critical_load(p), 1e-8);
  EXPECT_THROW(ziegler_quartic(ZieglerParams{1, 1, 1, -1, 0}), DomainError);
}

TEST(Hulten, UndampedQuartic) {
  const Quartic q = hulten_quartic(HultenParams{1.5, 2.5, 0, 0, 0});
  EXPECT_NEAR(q.a1, 0, 1e-15);
  EXPECT_NEAR(q.a2, 1.5 * 1.5 + 2.5 * 2.5, 1e-14);
  EXPECT_NEAR(q.a3, 0, 1e-15);
  EXPECT_NEAR(q.a4, 1.5 * 1.5 * 2.5 * 2.5, 1e-13);
}

TEST(Hulten, UndampedCriticalFriction) {
  for (auto [w1, w2] : {std::pair{1.0, 2.0}, {1.0, 1.3}, {3.0, 0.5}}) {
    const double mu0 = hulten_critical_mu_undamped(w1, w2);
    EXPECT_NEAR(mu0, std::abs(w1 * w1 - w2 * w2) / (2 * w1 * w2), 1e-15);
    EXPECT_NEAR(hulten_critical_mu(HultenParams{w1, w2, 0, 0, 0}), mu0, 1e-9);
    // Biquadratic discriminant vanishes there.
    const Quartic q = hulten_quartic(HultenParams{w1, w2, 0, 0, mu0});
    EXPECT_NEAR(q.a2 * q.a2 - 4 * q.a4, 0, 1e-12 * q.a2 * q.a2);
  }
}

TEST(Hulten, SmallDampingJumpDependsOnRay) {
  const double w1 = 1, w2 = 2, mu0 = hulten_critical_mu_undamped(w1, w2);
  std::vector<double> limits;
  for (double ratio : {0.25, 1.0, 4.0}) {
    const double eta = 1e-5;
    limits.push_back(hulten_critical_mu(HultenParams{w1, w2, eta, ratio * eta, 0}));
    EXPECT_LE(limits.back(), mu0 + 1e-6);
  }
  const auto [lo, hi] = std::minmax_element(limits.begin(), limits.end());
  EXPECT_LT(*lo, mu0 - 1e-2);
  EXPECT_GT(*hi - *lo, 1e-2);
}
