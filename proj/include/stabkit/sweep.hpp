#pragma once

// Parameter sweeps, boundary bisection and directional (ray) limits.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "stabkit/errors.hpp"

namespace stabkit {

inline constexpr double kBisectTol = 1e-12;

/// Bisects a predicate that differs at `lo` and `hi` down to an absolute
/// bracket width `tol`; returns the bracket midpoint.
template <typename Predicate>
double bisect_boundary(Predicate&& f, double lo, double hi, double tol = kBisectTol) {
  const bool f_lo = f(lo);
  if (f_lo == static_cast<bool>(f(hi)))
    throw NoBracket("bisect_boundary: predicate equal at both ends of [" +
                    std::to_string(lo) + ", " + std::to_string(hi) + "]");
  for (int it = 0; it < 400 && std::abs(hi - lo) > tol; ++it) {
    const double mid = lo + (hi - lo) / 2;
    if (mid == lo || mid == hi) break;
    if (static_cast<bool>(f(mid)) == f_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + (hi - lo) / 2;
}

/// Moves `hi` away from `lo` geometrically (hi <- lo + growth (hi - lo))
/// until f(hi) != f(lo); returns the new hi. Throws NoBracket after
/// `max_steps` expansions.
template <typename Predicate>
double expand_bracket(Predicate&& f, double lo, double hi, double growth = 2.0,
                      int max_steps = 60) {
  const bool f_lo = f(lo);
  for (int k = 0; k < max_steps; ++k) {
    if (static_cast<bool>(f(hi)) != f_lo) return hi;
    hi = lo + growth * (hi - lo);
  }
  throw NoBracket("expand_bracket: no sign change found");
}

struct RayLimit {
  Eigen::VectorXd direction;
  std::vector<double> magnitudes;  // strictly decreasing towards 0
  std::vector<double> values;
  double extrapolated_limit = 0;
  double convergence_order = 1;
  double residual = 0;
  bool order_measured = false;
};

/// Richardson extrapolation of v(h) = L + C h^p from the three smallest
/// magnitudes. p is measured from the data when the differences allow it and
/// otherwise taken as 1.
RayLimit extrapolate_ray(Eigen::VectorXd direction, std::vector<double> magnitudes,
                         std::vector<double> values, double noise_floor = 1e-10);

/// Evaluates `critical(direction, magnitude)` along the ray and extrapolates
/// to magnitude 0.
template <typename Critical>
RayLimit ray_limit(Critical&& critical, const Eigen::VectorXd& direction,
                   const std::vector<double>& magnitudes, double noise_floor = 1e-10) {
  if (magnitudes.size() < 3) throw DomainError("ray_limit: need at least 3 magnitudes");
  for (std::size_t i = 0; i < magnitudes.size(); ++i) {
    if (!(magnitudes[i] > 0) || (i > 0 && !(magnitudes[i] < magnitudes[i - 1])))
      throw DomainError("ray_limit: magnitudes must decrease strictly towards 0");
  }
  std::vector<double> values;
  values.reserve(magnitudes.size());
  for (double h : magnitudes) values.push_back(critical(direction, h));
  return extrapolate_ray(direction, magnitudes, std::move(values), noise_floor);
}

struct Axis {
  std::string name;
  double lo = 0;
  double hi = 1;
  int count = 2;
  bool log_spaced = false;

  double value(int i) const;
  void validate() const;
};

/// Dense grid of scalar results, row-major with the last axis fastest.
struct SweepGrid {
  std::vector<Axis> axes;
  std::string function_id;
  std::vector<double> values;

  std::size_t size() const;
  std::vector<double> point(std::size_t flat_index) const;
};

/// Thread count from STABKIT_THREADS, else the hardware concurrency.
int default_thread_count();

/// Runs `f(std::span<const double>) -> double` on every grid point. Points
/// are evaluated data-parallel; results are stored by index so the output
/// does not depend on the thread count.
SweepGrid run_sweep(std::vector<Axis> axes, std::string function_id,
                    const std::function<double(std::span<const double>)>& f,
                    int threads = 0);

/// Applies `f(i)` for i in [0, n) on `threads` workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f, int threads = 0);

}  // namespace stabkit
