#include "stabkit/gyro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "stabkit/circulatory.hpp"
#include "stabkit/sweep.hpp"

namespace stabkit {

namespace {

using cd = std::complex<double>;
constexpr cd I1{0, 1};

double sym_defect(const Eigen::MatrixXd& a) { return (a - a.transpose()).cwiseAbs().maxCoeff(); }
double skew_defect(const Eigen::MatrixXd& a) { return (a + a.transpose()).cwiseAbs().maxCoeff(); }

double matrix_scale(const Eigen::MatrixXd& a) { return std::max(1.0, a.cwiseAbs().maxCoeff()); }

cd form(const Eigen::VectorXcd& x, const Eigen::MatrixXd& a, const Eigen::VectorXcd& y) {
  return x.dot(a.cast<cd>() * y);  // x^H A y
}

// Pencil -w^2 I + i w W G + K at a purely imaginary eigenvalue i w.
Eigen::MatrixXcd pencil(const GyroSystem& s, double w, double W) {
  const int m = s.dim();
  Eigen::MatrixXcd L = (s.K - w * w * Eigen::MatrixXd::Identity(m, m)).cast<cd>();
  L += (I1 * (w * W)) * s.G.cast<cd>();
  return L;
}

void fix_phase(Eigen::VectorXcd& u) {
  Eigen::Index k;
  u.cwiseAbs().maxCoeff(&k);
  const cd z = u(k);
  if (std::abs(z) > 0) u *= std::conj(z) / std::abs(z);
}

// Smallest distance between two eigenvalues in the open upper half plane,
// together with their mean imaginary part.
struct Gap {
  double gap;
  double frequency;
};

Gap imaginary_gap(const GyroSystem& s) {
  const Eigen::VectorXcd ev = spectrum(s);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<cd> upper;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i).imag() > 1e-9 * scale) upper.push_back(ev(i));
  Gap best{std::numeric_limits<double>::max(), 0};
  for (std::size_t i = 0; i < upper.size(); ++i)
    for (std::size_t j = i + 1; j < upper.size(); ++j) {
      const double g = std::abs(upper[i] - upper[j]);
      if (g < best.gap) best = {g, 0.5 * (upper[i].imag() + upper[j].imag())};
    }
  return best;
}

// Largest |Re| among the two eigenvalues nearest to i w.
double pair_offset(const GyroSystem& s, double w) {
  const Eigen::VectorXcd ev = spectrum(s);
  std::vector<cd> v(ev.data(), ev.data() + ev.size());
  std::sort(v.begin(), v.end(), [&](cd a, cd b) { return std::abs(a - I1 * w) < std::abs(b - I1 * w); });
  return std::max(std::abs(v[0].real()), std::abs(v[1].real()));
}

}  // namespace

GyroSystem::GyroSystem(Eigen::MatrixXd K_, Eigen::MatrixXd D_, Eigen::MatrixXd G_,
                       Eigen::MatrixXd N_, double omega_, double delta_, double nu_)
    : K(std::move(K_)), D(std::move(D_)), G(std::move(G_)), N(std::move(N_)),
      omega(omega_), delta(delta_), nu(nu_) {
  const auto m = K.rows();
  if (m < 2 || K.cols() != m) throw DomainError("GyroSystem: K must be square with m >= 2");
  for (const auto* a : {&D, &G, &N})
    if (a->rows() != m || a->cols() != m) throw DomainError("GyroSystem: dimension mismatch");
  if (sym_defect(K) > 1e-12 * matrix_scale(K)) throw DomainError("GyroSystem: K must be symmetric");
  if (sym_defect(D) > 1e-12 * matrix_scale(D)) throw DomainError("GyroSystem: D must be symmetric");
  if (skew_defect(G) > 1e-12 * matrix_scale(G)) throw DomainError("GyroSystem: G must be skew");
  if (skew_defect(N) > 1e-12 * matrix_scale(N)) throw DomainError("GyroSystem: N must be skew");
}

GyroSystem GyroSystem::two_dof(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D,
                               double omega, double delta, double nu) {
  return GyroSystem(K, D, unit_skew(), unit_skew(), omega, delta, nu);
}

GyroSystem GyroSystem::with(double omega_, double delta_, double nu_) const {
  GyroSystem s = *this;
  s.omega = omega_;
  s.delta = delta_;
  s.nu = nu_;
  return s;
}

bool GyroSystem::canonical_two_dof() const {
  return dim() == 2 && G == Eigen::MatrixXd(unit_skew()) && N == Eigen::MatrixXd(unit_skew());
}

Eigen::MatrixXd first_order_matrix(const GyroSystem& s) {
  const int m = s.dim();
  const Eigen::MatrixXd Id = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd C(2 * m, 2 * m);
  C.topLeftCorner(m, m) = -0.5 * s.omega * s.G;
  C.topRightCorner(m, m) = Id;
  C.bottomLeftCorner(m, m) = 0.5 * s.delta * s.omega * s.D * s.G +
                             0.25 * s.omega * s.omega * s.G * s.G - s.K - s.nu * s.N;
  C.bottomRightCorner(m, m) = -s.delta * s.D - 0.5 * s.omega * s.G;
  return C;
}

Eigen::VectorXcd spectrum(const GyroSystem& s) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(first_order_matrix(s), false);
  if (solver.info() != Eigen::Success) throw DomainError("spectrum: eigenvalue iteration failed");
  return solver.eigenvalues();
}

double spectral_abscissa(const GyroSystem& s) { return spectrum(s).real().maxCoeff(); }

bool gyro_unstable(const GyroSystem& s) {
  if (s.canonical_two_dof() && s.delta >= 0) {
    const SystemMatrices2 sm(s.K, s.nu, s.D, s.delta, s.omega);
    return hurwitz_verdict(quartic_from_system(sm), kBoundaryBand).unstable();
  }
  const Eigen::VectorXcd ev = spectrum(s);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  return ev.real().maxCoeff() > 1e-12 * scale;
}

void update_krein_coefficients(KreinCollisionData& d) {
  const GyroSystem& s = d.system;
  const double w0 = d.collision_frequency, W0 = d.collision_speed;
  const Eigen::VectorXcd& u0 = d.u0;
  const Eigen::VectorXcd& u1 = d.u1;

  const cd u0u0 = u0.squaredNorm();
  const cd denom = W0 * (w0 * w0 * u1.squaredNorm() - form(u1, s.K, u1) -
                         I1 * (w0 * W0) * form(u1, s.G, u1) - u0u0);
  const cd mu2 = -2.0 * w0 * w0 * u0u0 / denom;
  d.mu2 = mu2.real();
  d.mu = std::sqrt(std::abs(d.mu2));

  d.d1 = form(u0, s.D, u0).real();
  d.d2 = (form(u0, s.D, u1) - form(u1, s.D, u0)).imag();
  d.n1 = form(u0, s.N, u0).imag();
  d.n2 = (form(u0, s.N, u1) - form(u1, s.N, u0)).real();
  const cd uNu = form(u0, s.N, u0);
  d.gamma_star = std::abs(uNu) > 0 ? (-I1 * w0 * form(u0, s.D, u0) / uNu).real()
                                   : std::numeric_limits<double>::quiet_NaN();
}

KreinCollisionData regauge_chain(const KreinCollisionData& data, std::complex<double> c) {
  KreinCollisionData out = data;
  out.u1 = data.u1 + c * data.u0;
  update_krein_coefficients(out);
  return out;
}

KreinCollisionData find_krein_collision(const GyroSystem& sys, double lo, double hi,
                                        int scan_points) {
  if (!(lo < hi) || scan_points < 3) throw DomainError("find_krein_collision: bad scan interval");
  const GyroSystem base = sys.with(0, 0, 0);
  auto gap_at = [&](double W) { return imaginary_gap(base.with(W, 0, 0)).gap; };

  std::vector<double> grid(scan_points), gaps(scan_points);
  for (int i = 0; i < scan_points; ++i) {
    grid[i] = lo + (hi - lo) * i / (scan_points - 1);
    gaps[i] = gap_at(grid[i]);
  }
  const auto k = static_cast<int>(std::min_element(gaps.begin(), gaps.end()) - gaps.begin());
  if (gaps[k] == std::numeric_limits<double>::max())
    throw NoCollision("find_krein_collision: no imaginary eigenvalue pair in range");

  // Golden-section refinement of the gap minimum.
  double a = grid[std::max(k - 1, 0)], b = grid[std::min(k + 1, scan_points - 1)];
  const double phi = (std::sqrt(5.0) - 1) / 2;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = gap_at(x1), f2 = gap_at(x2);
  while (b - a > 1e-10 * std::max(1.0, std::abs(a))) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = gap_at(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = gap_at(x2);
    }
  }
  const double W0 = 0.5 * (a + b);
  const Gap g0 = imaginary_gap(base.with(W0, 0, 0));
  const double w0 = g0.frequency;
  const double kscale = std::max(1.0, base.K.cwiseAbs().maxCoeff());
  if (!(g0.gap < 1e-3 * std::sqrt(kscale)) || !(w0 > 0))
    throw NoCollision("find_krein_collision: imaginary eigenvalues do not meet in range");

  // A Krein collision separates an on-axis side from an off-axis side.
  const double h = 1e-4 * std::max(1.0, W0);
  const double off_lo = pair_offset(base.with(W0 - h, 0, 0), w0);
  const double off_hi = pair_offset(base.with(W0 + h, 0, 0), w0);
  const double threshold = 1e-7 * std::sqrt(kscale);
  if ((off_lo > threshold) == (off_hi > threshold))
    throw NoCollision("find_krein_collision: eigenvalues pass without leaving the axis");

  KreinCollisionData d(base.with(W0, 0, 0));
  d.collision_speed = W0;
  d.collision_frequency = w0;

  const Eigen::MatrixXcd L0 = pencil(d.system, w0, W0);
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(L0, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const int m = base.dim();
  const double smax = sv(0);
  if (!(sv(m - 1) < 1e-6 * smax) || !(sv(m - 2) > 1e-6 * smax))
    throw DegenerateChain("find_krein_collision: collision is not a simple Jordan block");

  d.u0 = svd.matrixV().col(m - 1);
  d.u0.normalize();
  fix_phase(d.u0);
  const Eigen::VectorXcd rhs =
      -(2.0 * I1 * w0 * d.u0 + W0 * (base.G.cast<cd>() * d.u0));
  // Pseudo-inverse on the range; the result is orthogonal to u0.
  Eigen::VectorXcd u1 = Eigen::VectorXcd::Zero(m);
  for (int j = 0; j < m - 1; ++j)
    u1 += svd.matrixV().col(j) * (svd.matrixU().col(j).dot(rhs) / sv(j));
  u1 -= d.u0 * d.u0.dot(u1);
  d.u1 = u1;

  d.null_residual = (L0 * d.u0).norm();
  d.chain_residual = (L0 * d.u1 - rhs).norm();
  if (d.chain_residual > 1e-6 * smax * std::max(1.0, d.u1.norm()))
    throw DegenerateChain("find_krein_collision: second chain equation not solvable");

  update_krein_coefficients(d);
  return d;
}

KreinCollisionData find_krein_collision(const GyroSystem& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.K);
  const double kmax = es.eigenvalues().cwiseAbs().maxCoeff();
  return find_krein_collision(s, 0.0, 4 * std::sqrt(kmax) + 1);
}

std::pair<std::complex<double>, std::complex<double>> krein_splitting(
    const KreinCollisionData& d, double omega) {
  const cd root = std::sqrt(cd(d.mu2 * (omega - d.collision_speed), 0));
  const cd base = I1 * d.collision_frequency;
  return {base + I1 * root, base - I1 * root};
}

ImaginaryMode unperturbed_mode(const KreinCollisionData& d, double omega, int branch) {
  if (branch != 1 && branch != -1) throw DomainError("unperturbed_mode: branch must be +-1");
  const GyroSystem s = d.system.with(omega, 0, 0);
  const auto pred = krein_splitting(d, omega);
  const cd target = branch > 0 ? pred.first : pred.second;
  const Eigen::VectorXcd ev = spectrum(s);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < ev.size(); ++i)
    if (std::abs(ev(i) - target) < std::abs(ev(best) - target)) best = i;
  ImaginaryMode mode;
  mode.frequency = ev(best).imag();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil(s, mode.frequency, omega), Eigen::ComputeFullV);
  mode.u = svd.matrixV().col(s.dim() - 1);
  mode.u.normalize();
  fix_phase(mode.u);
  return mode;
}

std::complex<double> eigenvalue_increment(const KreinCollisionData& d, double omega,
                                          double delta, double nu, int branch) {
  if (delta == 0 && nu == 0) return 0.0;
  const ImaginaryMode mode = unperturbed_mode(d, omega, branch);
  const double w = mode.frequency;
  const auto& u = mode.u;
  const GyroSystem& s = d.system;
  const cd num = w * w * form(u, s.D, u) * delta - I1 * w * form(u, s.N, u) * nu;
  const cd den = form(u, s.K, u) + w * w * u.squaredNorm();
  return -num / den;
}

double gamma_neutral(const KreinCollisionData& d, double omega, int branch) {
  const ImaginaryMode mode = unperturbed_mode(d, omega, branch);
  const auto& u = mode.u;
  return (-I1 * mode.frequency * form(u, d.system.D, u) / form(u, d.system.N, u)).real();
}

namespace {

double surface_denominator(const KreinCollisionData& d) {
  const double a = d.collision_frequency * d.d2, b = d.gamma_star * d.n2;
  const double den = a - b - d.d1;
  if (std::abs(den) <= 1e-8 * (std::abs(a) + std::abs(b) + std::abs(d.d1)))
    throw DegenerateSurface("omega_cr_surface: w0 d2 - gamma_* n2 - d1 vanishes");
  return den;
}

}  // namespace

double omega_cr_ray(const KreinCollisionData& d, double gamma) {
  const double den = surface_denominator(d);
  const double t = gamma - d.gamma_star;
  return d.collision_speed + d.n1 * d.n1 * t * t / (d.mu2 * den * den);
}

double omega_cr_surface(const KreinCollisionData& d, double delta, double nu) {
  if (!(delta > 0)) throw DomainError("omega_cr_surface: delta must be positive");
  const double den = surface_denominator(d);
  const double t = nu - d.gamma_star * delta;
  return d.collision_speed + d.n1 * d.n1 * t * t / (d.mu2 * den * den * delta * delta);
}

TwoDofCollision krein_collision_two_dof(const Eigen::Matrix2d& K) {
  const double det = K.determinant(), tr = K.trace();
  if (!(det > 0) || !(tr < 0))
    throw NoCollision("krein_collision_two_dof: needs detK > 0 and trK < 0");
  return {std::sqrt(-tr + 2 * std::sqrt(det)), std::pow(det, 0.25)};
}

double gamma_star_two_dof(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D) {
  const auto c = krein_collision_two_dof(K);
  const double W0 = c.collision_speed, w0 = c.collision_frequency;
  return ((K * D).trace() + (W0 * W0 - w0 * w0) * D.trace()) / (2 * W0);
}

double omega_cr_two_dof(const Eigen::Matrix2d& K, const Eigen::Matrix2d& D, double delta,
                        double nu) {
  if (!(delta > 0)) throw DomainError("omega_cr_two_dof: delta must be positive");
  const auto c = krein_collision_two_dof(K);
  const double W0 = c.collision_speed, w0 = c.collision_frequency;
  const double trd = D.trace();
  if (trd == 0) throw DegenerateSurface("omega_cr_two_dof: trD = 0");
  const double t = nu - gamma_star_two_dof(K, D) * delta;
  return W0 + W0 * 2 * t * t / (w0 * trd * w0 * trd * delta * delta);
}

double omega_cr_bisected(const GyroSystem& s, double lo, double hi, double tol) {
  auto unstable = [&](double W) { return gyro_unstable(s.with(W, s.delta, s.nu)); };
  if (!unstable(lo)) throw NoBracket("omega_cr_bisected: lower end is not unstable");
  hi = expand_bracket(unstable, lo, hi, 1.5, 80);
  return bisect_boundary(unstable, lo, hi, tol);
}

Quartic maxwell_bloch_quartic(const MaxwellBlochParams& p) {
  const SystemMatrices2 s(p.kappa * Eigen::Matrix2d::Identity(), p.nu, Eigen::Matrix2d::Identity(),
                          p.delta, p.omega);
  return quartic_from_system(s);
}

StabilityVerdict maxwell_bloch_verdict(const MaxwellBlochParams& p) {
  return hurwitz_verdict(maxwell_bloch_quartic(p));
}

double maxwell_bloch_margin(const MaxwellBlochParams& p) {
  return p.delta * p.delta * p.kappa + p.delta * p.omega * p.nu - p.nu * p.nu;
}

bool maxwell_bloch_stable_closed_form(const MaxwellBlochParams& p) {
  if (p.nu == 0) return maxwell_bloch_verdict(p).asymptotically_stable();
  return p.delta > 0 && maxwell_bloch_margin(p) > 0;
}

std::pair<double, double> maxwell_bloch_boundary_nu(double omega, double delta, double kappa) {
  const double r = omega * omega + 4 * kappa;
  if (r < 0) throw DomainError("maxwell_bloch_boundary_nu: Omega^2 + 4 kappa < 0");
  const double s = std::sqrt(r);
  return {(omega - s) * delta / 2, (omega + s) * delta / 2};
}

std::pair<double, double> hauger_omega_cr(double delta, double nu, double kappa) {
  if (!(kappa < 0)) throw DomainError("hauger_omega_cr: kappa must be negative");
  if (!(delta > 0)) throw DomainError("hauger_omega_cr: delta must be positive");
  const double r = std::sqrt(-kappa);
  const double up = (nu - delta * r) / delta, down = (nu + delta * r) / delta;
  return {2 * r + up * up / r, -2 * r - down * down / r};
}

MaxwellBlochParams hauger_parameters(double I, double I0, double b, double r, double mgs,
                                     double eta, double T, double k) {
  if (I == 0 || k == 0 || T == 0) throw DomainError("hauger_parameters: I, k and T must be nonzero");
  const double w = -T / k;
  return {I0 / I, b / (I * w), (1 - eta) * T / (I * w * w), (r - mgs) / (I * w * w)};
}

}  // namespace stabkit
