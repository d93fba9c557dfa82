#include "stabkit/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "stabkit/errors.hpp"
#include "stabkit/sweep.hpp"

namespace stabkit {

namespace {

// Fundamental matrix of X' = A(t) X from X(0) = I over [0, period].
template <int N, typename Field>
Eigen::Matrix<double, N, N> rk4_fundamental(Field&& A, double period, int steps) {
  using Mat = Eigen::Matrix<double, N, N>;
  Mat X = Mat::Identity();
  const double h = period / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Mat a0 = A(t), ah = A(t + h / 2), a1 = A(t + h);
    const Mat k1 = a0 * X;
    const Mat k2 = ah * (X + h / 2 * k1);
    const Mat k3 = ah * (X + h / 2 * k2);
    const Mat k4 = a1 * (X + h * k3);
    X += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return X;
}

}  // namespace

void RotorParams::validate() const {
  if (!(alpha >= 0)) throw DomainError("RotorParams: alpha must be >= 0");
  if (!(eps >= 0)) throw DomainError("RotorParams: eps must be >= 0");
  if (!(eta > 0)) throw DomainError("RotorParams: eta must be positive");
  if (!(kappa >= 0)) throw DomainError("RotorParams: kappa must be >= 0");
}

Eigen::Matrix4d monodromy_matrix(const RotorParams& p, int steps) {
  p.validate();
  if (steps < 1) throw DomainError("monodromy_matrix: steps must be positive");
  const double mu = p.damping();
  auto A = [&](double t) {
    const double k = 1 + 4 * p.eps * p.eta * p.eta * std::cos(2 * p.eta * t);
    Eigen::Matrix4d a;
    a << 0, 0, 1, 0,
         0, 0, 0, 1,
         -k, 0, -mu, -2 * p.alpha,
         0, -k, 2 * p.alpha, -mu;
    return a;
  };
  return rk4_fundamental<4>(A, std::numbers::pi / p.eta, steps);
}

FloquetResult monodromy(const RotorParams& p, int steps) {
  if (steps < 256) throw DomainError("monodromy: steps must be >= 256");
  const Eigen::Matrix4d phi = monodromy_matrix(p, steps);
  const Eigen::Matrix4d phi2 = monodromy_matrix(p, 2 * steps);
  // Multipliers at a double root are only O(sqrt) stable, so the step check
  // is made on the matrix itself.
  if (!phi2.allFinite() || !((phi - phi2).norm() <= 1e-6 * phi2.norm()))
    throw IntegrationError("monodromy: step halving changes the monodromy beyond 1e-6");

  FloquetResult r;
  r.monodromy = phi2;
  Eigen::EigenSolver<Eigen::Matrix4d> es(phi2, false);
  for (int i = 0; i < 4; ++i) r.multipliers[i] = es.eigenvalues()(i);
  r.max_modulus = 0;
  for (const auto& z : r.multipliers) r.max_modulus = std::max(r.max_modulus, std::abs(z));
  r.stable = r.max_modulus <= 1 + kMultiplierTol;
  const double expected = std::exp(-2 * p.damping() * std::numbers::pi / p.eta);
  r.liouville_error = std::abs(phi2.determinant() - expected) / expected;
  return r;
}

MathieuResult mathieu_monodromy(double a, double eps, int steps) {
  auto A = [&](double t) {
    Eigen::Matrix2d m;
    m << 0, 1, -(a + 4 * eps * std::cos(2 * t)), 0;
    return m;
  };
  const Eigen::Matrix2d phi = rk4_fundamental<2>(A, std::numbers::pi, 2 * steps);
  Eigen::EigenSolver<Eigen::Matrix2d> es(phi, false);
  MathieuResult r;
  r.multipliers = {es.eigenvalues()(0), es.eigenvalues()(1)};
  r.max_modulus = std::max(std::abs(r.multipliers[0]), std::abs(r.multipliers[1]));
  r.stable = r.max_modulus <= 1 + kMultiplierTol;
  return r;
}

ReductionCheck mathieu_reduction_check(const RotorParams& p, const std::vector<double>& etas,
                                       double band) {
  if (p.damping() != 0) throw DomainError("mathieu_reduction_check: requires mu = 0");
  ReductionCheck out;
  for (double eta : etas) {
    RotorParams q = p;
    q.eta = eta;
    const FloquetResult full = monodromy(q);
    const MathieuResult reduced = mathieu_monodromy((1 + p.alpha * p.alpha) / (eta * eta), p.eps);
    out.max_modulus_deviation =
        std::max(out.max_modulus_deviation, std::abs(full.max_modulus - reduced.max_modulus));
    auto ambiguous = [&](double m) { return m > 1 + kMultiplierTol && m <= 1 + band; };
    if (ambiguous(full.max_modulus) || ambiguous(reduced.max_modulus)) continue;
    ++out.compared;
    if ((full.max_modulus > 1 + kMultiplierTol) != (reduced.max_modulus > 1 + kMultiplierTol))
      ++out.disagreements;
  }
  return out;
}

double tongue_boundary_undamped_estimate(double alpha, double eps, int side) {
  return std::sqrt(1 + alpha * alpha) * (1 + side * eps);
}

double tongue_boundary_damped_estimate(double alpha, double eps, double mu, int side) {
  const double eta0 = std::sqrt(1 + alpha * alpha);
  const double lift = mu / (2 * eta0);
  const double r = (1 + alpha * alpha) * eps * eps - lift * lift;
  if (r < 0) throw NoBoundary("tongue_boundary_damped_estimate: tongue lifted off");
  return eta0 * (1 + side * std::sqrt(r));
}

double tongue_boundary(const RotorParams& p, int side, double tol) {
  p.validate();
  if (side != 1 && side != -1) throw DomainError("tongue_boundary: side must be +-1");
  if (!(p.eps > 0)) throw DomainError("tongue_boundary: eps must be positive");
  const double eta0 = std::sqrt(1 + p.alpha * p.alpha);
  auto unstable = [&](double eta) {
    RotorParams q = p;
    q.eta = eta;
    return !monodromy(q).stable;
  };

  // An unstable point inside the tongue, searched outward from its centre.
  const double reach = 2 * p.eps * eta0;  // relative
  double inside = eta0;
  if (!unstable(inside)) {
    bool found = false;
    for (int k = 1; k <= 40 && !found; ++k) {
      for (int s : {1, -1}) {
        const double eta = eta0 * (1 + s * reach * k / 40);
        if (unstable(eta)) {
          inside = eta;
          found = true;
          break;
        }
      }
    }
    if (!found) throw NoBoundary("tongue_boundary: no instability near the resonance");
  }
  const double outside = expand_bracket(unstable, inside, inside + side * eta0 * reach, 1.5, 12);
  return bisect_boundary(unstable, inside, outside, tol);
}

}  // namespace stabkit
