#include "stabkit/beck.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "stabkit/errors.hpp"
#include "stabkit/sweep.hpp"

namespace stabkit {

namespace {

constexpr int kGaussPoints = 16;

// Golub-Welsch nodes and weights on [-1, 1].
struct GaussRule {
  Eigen::VectorXd x, w;
};

const GaussRule& gauss_legendre() {
  static const GaussRule rule = [] {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(kGaussPoints, kGaussPoints);
    for (int k = 1; k < kGaussPoints; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1);
      J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule r;
    r.x = es.eigenvalues();
    r.w = 2 * es.eigenvectors().row(0).transpose().array().square();
    return r;
  }();
  return rule;
}

struct Projections {
  Eigen::MatrixXd M, P2;
};

Projections project(const Eigen::VectorXd& beta, const Eigen::VectorXd& scale, int panels) {
  const GaussRule& g = gauss_legendre();
  const int n = static_cast<int>(beta.size());
  const int nodes = panels * kGaussPoints;
  Eigen::MatrixXd phi(nodes, n), phi2(nodes, n);
  Eigen::VectorXd w(nodes);
  const double h = 1.0 / panels;
  for (int p = 0; p < panels; ++p) {
    for (int i = 0; i < kGaussPoints; ++i) {
      const int row = p * kGaussPoints + i;
      const double x = h * (p + 0.5 * (g.x(i) + 1));
      w(row) = 0.5 * h * g.w(i);
      for (int k = 0; k < n; ++k) {
        const auto [f, f2] = clamped_free_mode(beta(k), x);
        phi(row, k) = f * scale(k);
        phi2(row, k) = f2 * scale(k);
      }
    }
  }
  return {phi.transpose() * w.asDiagonal() * phi, phi.transpose() * w.asDiagonal() * phi2};
}

double relative_change(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1e-300, b.cwiseAbs().maxCoeff());
}

}  // namespace

void BeckParams::validate() const {
  if (!(q >= 0)) throw DomainError("BeckParams: q must be >= 0");
  if (!(d1 >= 0 && d2 >= 0)) throw DomainError("BeckParams: damping must be >= 0");
  if (n_modes < 8 || n_modes > 32) throw DomainError("BeckParams: n_modes must be in [8, 32]");
}

double clamped_free_root(int k) {
  if (k < 1) throw DomainError("clamped_free_root: k must be >= 1");
  // cos b + 1/cosh b changes sign once near (k - 1/2) pi.
  auto f = [](double b) { return std::cos(b) + 1 / std::cosh(b); };
  const double c = (k - 0.5) * std::numbers::pi;
  double lo = c - 0.5, hi = c + 0.5;
  double flo = f(lo);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * c; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> clamped_free_mode(double beta, double x) {
  // phi = cosh bx - cos bx - s (sinh bx - sin bx), s = (cosh b + cos b)/(sinh b + sin b),
  // with the growing exponentials scaled by e^-b.
  const double e = std::exp(-beta);
  const double den = (1 - e * e) / 2 + std::sin(beta) * e;
  const double s = ((1 + e * e) / 2 + std::cos(beta) * e) / den;
  const double grow = (std::sin(beta) - std::cos(beta) - e) * std::exp(beta * (x - 1)) / den;
  const double hyper = 0.5 * (grow + (1 + s) * std::exp(-beta * x));  // cosh bx - s sinh bx
  const double c = std::cos(beta * x), sn = std::sin(beta * x);
  return {hyper - c + s * sn, beta * beta * (hyper + c - s * sn)};
}

const GalerkinBasis& clamped_free_basis(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GalerkinBasis>> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return *it->second;
  if (n < 1) throw DomainError("clamped_free_basis: n must be positive");

  auto basis = std::make_unique<GalerkinBasis>();
  basis->n = n;
  basis->beta.resize(n);
  for (int k = 0; k < n; ++k) basis->beta(k) = clamped_free_root(k + 1);

  const int panels = 8 * n;
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  const Projections raw = project(basis->beta, ones, panels);
  const Eigen::VectorXd scale = raw.M.diagonal().cwiseSqrt().cwiseInverse();
  const Projections coarse = project(basis->beta, scale, panels);
  const Projections fine = project(basis->beta, scale, 2 * panels);
  basis->quadrature_change =
      std::max(relative_change(coarse.M, fine.M), relative_change(coarse.P2, fine.P2));
  if (basis->quadrature_change > 1e-10)
    throw QuadratureError("clamped_free_basis: quadrature not converged");
  basis->M = fine.M;
  basis->P2 = fine.P2;
  basis->P4 = fine.M * basis->beta.array().pow(4).matrix().asDiagonal();
  return *cache.emplace(n, std::move(basis)).first->second;
}

GalerkinSystem assemble(const BeckParams& p) {
  p.validate();
  const GalerkinBasis& b = clamped_free_basis(p.n_modes);
  GalerkinSystem s;
  s.params = p;
  s.M = b.M;
  s.Dmat = p.d1 * b.P4 + p.d2 * b.M;
  s.Kmat = b.P4 + p.q * b.P2;
  return s;
}

Eigen::VectorXcd beck_spectrum(const GalerkinSystem& s) {
  const auto n = s.M.rows();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(s.M);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  A.topRightCorner(n, n).setIdentity();
  A.bottomLeftCorner(n, n) = -lu.solve(s.Kmat);
  A.bottomRightCorner(n, n) = -lu.solve(s.Dmat);
  Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
  return es.eigenvalues();
}

namespace {

// Undamped problem: lambda^2 = -kappa with kappa an eigenvalue of M^-1 K.
// Flutter starts when two real kappa merge into a complex pair.
Eigen::VectorXcd undamped_kappa(const BeckParams& p) {
  const GalerkinSystem s = assemble(p);
  Eigen::EigenSolver<Eigen::MatrixXd> es(Eigen::PartialPivLU<Eigen::MatrixXd>(s.M).solve(s.Kmat),
                                         false);
  return es.eigenvalues();
}

bool undamped_flutter(const BeckParams& p) {
  const Eigen::VectorXcd k = undamped_kappa(p);
  const double scale = k.cwiseAbs().maxCoeff();
  return k.imag().cwiseAbs().maxCoeff() > 1e-12 * scale;
}

double max_growth(const BeckParams& p) { return beck_spectrum(assemble(p)).real().maxCoeff(); }

}  // namespace

FlutterPoint flutter_load(double d1, double d2, int n_modes, double ceiling, double tol) {
  BeckParams p{0, d1, d2, n_modes};
  p.validate();
  const bool damped = d1 > 0 || d2 > 0;
  auto unstable = [&](double q) {
    BeckParams r = p;
    r.q = q;
    return damped ? max_growth(r) > 0 : undamped_flutter(r);
  };

  const double step = 0.25;
  double lo = 0, hi = -1;
  for (double q = step; q <= ceiling + 1e-12; q += step) {
    if (unstable(q)) {
      hi = q;
      break;
    }
    lo = q;
  }
  if (hi < 0) throw NoFlutter("flutter_load: no flutter below the search ceiling");
  const double q_cr = bisect_boundary(unstable, lo, hi, tol);

  // Frequency of the critical pair just past the boundary.
  FlutterPoint out{q_cr, 0};
  BeckParams at = p;
  at.q = std::min(hi, q_cr + 4 * tol);
  if (damped) {
    const Eigen::VectorXcd ev = beck_spectrum(assemble(at));
    Eigen::Index k;
    ev.real().maxCoeff(&k);
    out.omega_cr = std::abs(ev(k).imag());
  } else {
    const Eigen::VectorXcd kap = undamped_kappa(at);
    Eigen::Index k;
    kap.imag().cwiseAbs().maxCoeff(&k);
    out.omega_cr = std::abs(std::sqrt(-kap(k)).imag());
  }
  return out;
}

double be12_surface(double d1, double d2) {
  const double den = 14.34 * d1 + 0.091 * d2;
  if (den == 0) throw DomainError("be12_surface: 14.34 d1 + 0.091 d2 = 0");
  return kBeckUndampedLoad - 1902 * d1 * d1 / (den * den) + 12.68 * d1 * d2 + 0.053 * d2 * d2;
}

}  // namespace stabkit
