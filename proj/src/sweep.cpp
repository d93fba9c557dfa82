#include "stabkit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>

namespace stabkit {

namespace {

struct Extrapolation {
  double limit;
  double order;
  bool measured;
};

// v(h) = L + C h^p through three points h1 > h2 > h3.
Extrapolation richardson3(double h1, double h2, double h3, double v1, double v2, double v3) {
  const double d12 = v1 - v2, d23 = v2 - v3;
  double p = 1;
  bool measured = false;
  if (d23 != 0 && d12 != 0 && (d12 > 0) == (d23 > 0)) {
    const double r = d12 / d23;
    auto g = [&](double q) {
      return (std::pow(h1, q) - std::pow(h2, q)) / (std::pow(h2, q) - std::pow(h3, q)) - r;
    };
    double lo = 0.05, hi = 12;
    double glo = g(lo), ghi = g(hi);
    if (std::isfinite(glo) && std::isfinite(ghi) && (glo > 0) != (ghi > 0)) {
      for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((gm > 0) == (glo > 0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      p = 0.5 * (lo + hi);
      measured = true;
    }
  }
  const double w2 = std::pow(h2, p), w3 = std::pow(h3, p);
  const double c = d23 / (w2 - w3);
  return {v3 - c * w3, p, measured};
}

}  // namespace

RayLimit extrapolate_ray(Eigen::VectorXd direction, std::vector<double> magnitudes,
                         std::vector<double> values, double noise_floor) {
  const std::size_t n = magnitudes.size();
  if (n < 3 || values.size() != n)
    throw DomainError("extrapolate_ray: need >= 3 matching magnitudes and values");
  RayLimit out;
  out.direction = std::move(direction);
  const auto e = richardson3(magnitudes[n - 3], magnitudes[n - 2], magnitudes[n - 1],
                             values[n - 3], values[n - 2], values[n - 1]);
  out.extrapolated_limit = e.limit;
  out.convergence_order = e.order;
  out.order_measured = e.measured;

  double spread;
  if (n >= 4) {
    const auto prev = richardson3(magnitudes[n - 4], magnitudes[n - 3], magnitudes[n - 2],
                                  values[n - 4], values[n - 3], values[n - 2]);
    spread = std::abs(prev.limit - e.limit);
  } else {
    spread = std::abs(values[n - 1] - e.limit);
  }
  out.residual = std::max(spread, noise_floor);
  out.magnitudes = std::move(magnitudes);
  out.values = std::move(values);
  return out;
}

double Axis::value(int i) const {
  const double t = static_cast<double>(i) / (count - 1);
  if (log_spaced) return std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  return lo + t * (hi - lo);
}

void Axis::validate() const {
  if (count < 2) throw DomainError("axis " + name + ": count must be >= 2");
  if (!(lo < hi)) throw DomainError("axis " + name + ": need lo < hi");
  if (log_spaced && !(lo > 0)) throw DomainError("axis " + name + ": log axis needs lo > 0");
}

std::size_t SweepGrid::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

std::vector<double> SweepGrid::point(std::size_t flat_index) const {
  std::vector<double> x(axes.size());
  for (std::size_t k = axes.size(); k-- > 0;) {
    const auto c = static_cast<std::size_t>(axes[k].count);
    x[k] = axes[k].value(static_cast<int>(flat_index % c));
    flat_index /= c;
  }
  return x;
}

int default_thread_count() {
  if (const char* env = std::getenv("STABKIT_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f, int threads) {
  if (threads <= 0) threads = default_thread_count();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

SweepGrid run_sweep(std::vector<Axis> axes, std::string function_id,
                    const std::function<double(std::span<const double>)>& f, int threads) {
  if (axes.empty()) throw DomainError("run_sweep: no axes");
  for (const auto& a : axes) a.validate();
  SweepGrid grid{std::move(axes), std::move(function_id), {}};
  grid.values.assign(grid.size(), 0.0);
  parallel_for(
      grid.values.size(),
      [&](std::size_t i) {
        const auto x = grid.point(i);
        grid.values[i] = f(std::span<const double>(x));
      },
      threads);
  return grid;
}

}  // namespace stabkit
