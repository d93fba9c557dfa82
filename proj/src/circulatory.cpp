#include "stabkit/circulatory.hpp"

#include <cmath>

#include "stabkit/sweep.hpp"

namespace stabkit {

namespace {

bool is_symmetric(const Eigen::Matrix2d& a) {
  return std::abs(a(0, 1) - a(1, 0)) <= 1e-14 * std::max(1.0, a.cwiseAbs().maxCoeff());
}

double cross_trace(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b) {
  // Coefficient of s in det(a + s b), divided out: a11 b22 + a22 b11 - a12 b21 - a21 b12.
  return a(0, 0) * b(1, 1) + a(1, 1) * b(0, 0) - a(0, 1) * b(1, 0) - a(1, 0) * b(0, 1);
}

}  // namespace

SystemMatrices2::SystemMatrices2(const Eigen::Matrix2d& K_, double nu_,
                                 const Eigen::Matrix2d& D_, double delta_, double omega_)
    : K(K_), nu(nu_), D(D_), delta(delta_), omega(omega_) {
  if (!is_symmetric(K)) throw DomainError("SystemMatrices2: K must be symmetric");
  if (!is_symmetric(D)) throw DomainError("SystemMatrices2: D must be symmetric");
  if (!(delta >= 0)) throw DomainError("SystemMatrices2: delta must be >= 0");
  K(1, 0) = K(0, 1);
  D(1, 0) = D(0, 1);
}

SystemMatrices2 SystemMatrices2::from_general(const Eigen::Matrix2d& B, const Eigen::Matrix2d& A) {
  const Eigen::Matrix2d sym_b = (B + B.transpose()) / 2;
  const Eigen::Matrix2d sym_a = (A + A.transpose()) / 2;
  return SystemMatrices2(sym_a, (A(0, 1) - A(1, 0)) / 2, sym_b, 1.0, (B(0, 1) - B(1, 0)) / 2);
}

Quartic characteristic_quartic(const Eigen::Matrix2d& M, const Eigen::Matrix2d& B,
                               const Eigen::Matrix2d& C) {
  const double det_m = M.determinant();
  if (det_m == 0) throw DomainError("characteristic_quartic: singular mass matrix");
  Quartic q;
  q.a1 = cross_trace(M, B) / det_m;
  q.a2 = (cross_trace(M, C) + B.determinant()) / det_m;
  q.a3 = cross_trace(B, C) / det_m;
  q.a4 = C.determinant() / det_m;
  return q;
}

Quartic quartic_from_system(const SystemMatrices2& s) {
  const Eigen::Matrix2d dD = s.delta * s.D;
  const double tr_k = s.K.trace(), tr_d = dD.trace();
  Quartic q;
  q.a1 = tr_d;
  q.a2 = tr_k + dD.determinant() + s.omega * s.omega;
  q.a3 = tr_k * tr_d - (s.K * dD).trace() + 2 * s.omega * s.nu;
  q.a4 = s.K.determinant() + s.nu * s.nu;
  return q;
}

double nu_critical_undamped(const Eigen::Matrix2d& K) {
  const double half_tr = K.trace() / 2;
  const double r = half_tr * half_tr - K.determinant();
  if (r < 0) throw DomainError("nu_critical_undamped: (trK/2)^2 - detK < 0");
  return std::sqrt(r);
}

double damping_shape_defect(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D) {
  const double tr_d = D.trace();
  if (!(tr_d > 0)) throw DomainError("damping shape needs trD > 0");
  return (2 * (K * D).trace() - K.trace() * tr_d) / (2 * tr_d);
}

double nu_critical_damped_limit(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D) {
  const double nu0 = nu_critical_undamped(K);
  const double g = damping_shape_defect(K, D);
  const double r = nu0 * nu0 - g * g;
  if (r < 0) throw DomainError("nu_critical_damped_limit: stability window closed");
  return std::sqrt(r);
}

double nu_critical_damped_limit_approx(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D) {
  const double nu0 = nu_critical_undamped(K);
  if (nu0 == 0) throw DomainError("nu_critical_damped_limit_approx: nu_0 = 0");
  const double g = damping_shape_defect(K, D);
  return nu0 - g * g / (2 * nu0);
}

double nu_critical_finite_damping(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D) {
  if (K(0, 1) != 0 || K(1, 0) != 0)
    throw DomainError("nu_critical_finite_damping: requires k12 = 0");
  const double k11 = K(0, 0), k22 = K(1, 1);
  const double d11 = D(0, 0), d22 = D(1, 1), d12 = D(0, 1);
  const double t = d11 + d22;
  if (!(t > 0)) throw DomainError("nu_critical_finite_damping: trD must be positive");
  const double dk = k11 - k22;
  const double r = dk * dk / 4 -
                   ((d11 - d22) * (d11 - d22) * dk * dk -
                    4 * (k11 * d22 + k22 * d11) * (d11 * d22 - d12 * d12) * t) /
                       (4 * t * t);
  if (r < -1e-12 * dk * dk) throw DomainError("nu_critical_finite_damping: no stable nu");
  if (r < 0) return 0;
  return std::sqrt(r);
}

double nu_critical_bisected(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D, double delta,
                            double tol) {
  auto unstable = [&](double nu) {
    const auto q = quartic_from_system(SystemMatrices2(K, nu, D, delta, 0.0));
    return hurwitz_verdict(q, kBoundaryBand).unstable();
  };
  if (unstable(0.0)) throw NoBracket("nu_critical_bisected: unstable already at nu = 0");
  const double scale = std::max(1.0, K.cwiseAbs().maxCoeff());
  const double hi = expand_bracket(unstable, 0.0, 0.25 * scale);
  return bisect_boundary(unstable, 0.0, hi, tol);
}

void ZieglerParams::validate() const {
  if (!(m > 0 && l > 0 && c > 0)) throw DomainError("ZieglerParams: m, l, c must be positive");
  if (!(b >= 0)) throw DomainError("ZieglerParams: b must be >= 0");
}

Quartic ziegler_quartic(const ZieglerParams& p) {
  p.validate();
  const double m1 = 2 * p.m, m2 = p.m, a1 = p.l, a2 = p.l;
  const double b1 = p.b, b2 = p.b;
  Eigen::Matrix2d M, B, C;
  M << m1 * a1 * a1 + m2 * p.l * p.l, m2 * p.l * a2,
       m2 * p.l * a2, m2 * a2 * a2;
  B << b1 + b2, -b2,
       -b2, b2;
  C << -p.P * p.l + 2 * p.c, p.P * p.l - p.c,
       -p.c, p.c;
  return characteristic_quartic(M, B, C);
}

double ziegler_critical_load(const ZieglerParams& p) {
  p.validate();
  if (p.b == 0) return (3.5 - std::sqrt(2.0)) * p.c / p.l;
  return 41.0 / 28.0 * p.c / p.l + p.b * p.b / (2 * p.m * p.l * p.l * p.l);
}

double ziegler_critical_load_bisected(const ZieglerParams& p, double tol) {
  p.validate();
  auto unstable = [&](double P) {
    ZieglerParams q = p;
    q.P = P;
    return hurwitz_verdict(ziegler_quartic(q), kBoundaryBand).unstable();
  };
  const double hi = expand_bracket(unstable, 0.0, p.c / p.l);
  return bisect_boundary(unstable, 0.0, hi, tol);
}

void HultenParams::validate() const {
  if (!(w1 > 0 && w2 > 0)) throw DomainError("HultenParams: pulsations must be positive");
  if (!(eta1 >= 0 && eta2 >= 0)) throw DomainError("HultenParams: damping must be >= 0");
  if (!(mu >= 0)) throw DomainError("HultenParams: mu must be >= 0");
}

Quartic hulten_quartic(const HultenParams& p) {
  p.validate();
  Eigen::Matrix2d B, C;
  B << p.eta1 * p.w1, 0,
       0, p.eta2 * p.w2;
  C << p.w1 * p.w1, -p.mu * p.w2 * p.w2,
       p.mu * p.w1 * p.w1, p.w2 * p.w2;
  return characteristic_quartic(Eigen::Matrix2d::Identity(), B, C);
}

double hulten_critical_mu_undamped(double w1, double w2) {
  if (!(w1 > 0 && w2 > 0)) throw DomainError("hulten_critical_mu_undamped: pulsations must be positive");
  return std::abs(w1 * w1 - w2 * w2) / (2 * w1 * w2);
}

double hulten_critical_mu(const HultenParams& p, double tol) {
  p.validate();
  auto unstable = [&](double mu) {
    HultenParams q = p;
    q.mu = mu;
    return hurwitz_verdict(hulten_quartic(q), kBoundaryBand).unstable();
  };
  if (unstable(0.0)) throw NoBracket("hulten_critical_mu: unstable at mu = 0");
  const double hi = expand_bracket(unstable, 0.0, 0.25);
  return bisect_boundary(unstable, 0.0, hi, tol);
}

}  // namespace stabkit
