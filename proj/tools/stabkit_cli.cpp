// stabkit command-line front end. Every subcommand writes its table as CSV
// (to --out or stdout) and a JSON metadata sidecar; errors are reported as a
// JSON record on stderr with exit status 2 (configuration) or 1 (computation).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stabkit/baroclinic.hpp"
#include "stabkit/beck.hpp"
#include "stabkit/circulatory.hpp"
#include "stabkit/errors.hpp"
#include "stabkit/floquet.hpp"
#include "stabkit/gyro.hpp"
#include "stabkit/io.hpp"
#include "stabkit/quartic.hpp"
#include "stabkit/sweep.hpp"
#include "stabkit/umbrella.hpp"

using namespace stabkit;
using nlohmann::json;

namespace {

// Invalid configuration detected after CLI11 parsing (exit status 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Context {
  std::string out;   // CSV path, empty for stdout
  std::string meta;  // sidecar path
  json tolerances = json::object();
  json outputs = json::object();
  std::function<void()> action;
  CLI::App* active = nullptr;
};

std::string fmt(double x) { return format_double(x); }

void require_positive(const char* name, double x) {
  if (!(x > 0)) throw ConfigError(std::string(name) + " must be positive");
}

void require_count(const char* name, int n, int lo = 2) {
  if (n < lo) throw ConfigError(std::string(name) + " must be >= " + std::to_string(lo));
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : std::exp(a + (b - a) * i / (n - 1));
  return v;
}

// Opens the CSV destination, hands a writer to `fill` and records the
// output in the sidecar.
void write_table(Context& ctx, std::vector<std::string> header,
                 const std::function<void(CsvWriter&)>& fill) {
  std::ofstream file;
  if (!ctx.out.empty()) {
    file.open(ctx.out);
    if (!file) throw DomainError("cannot open " + ctx.out);
  }
  std::ostream& os = ctx.out.empty() ? std::cout : file;
  CsvWriter w(os, header);
  fill(w);
  os.flush();
  ctx.outputs["csv"] = ctx.out.empty() ? "-" : ctx.out;
  ctx.outputs["rows"] = w.rows();
  ctx.outputs["columns"] = header;
}

json inputs_of(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? json(r.front()) : json(r);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

Eigen::Matrix2d sym2(double a11, double a12, double a22) {
  Eigen::Matrix2d m;
  m << a11, a12, a12, a22;
  return m;
}

int label_code(StabilityLabel l) { return static_cast<int>(l); }

// ---------------------------------------------------------------- verdict

void add_verdict(CLI::App& app, Context& ctx) {
  struct Opt {
    double a1 = 0, a2 = 0, a3 = 0, a4 = 0, tol = kDefaultBand;
    int random = 0;
    std::uint64_t seed = 1;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("verdict", "Stability verdict of a monic quartic");
  sub->add_option("--a1", o->a1);
  sub->add_option("--a2", o->a2);
  sub->add_option("--a3", o->a3);
  sub->add_option("--a4", o->a4);
  sub->add_option("--tol", o->tol, "relative indeterminacy band");
  sub->add_option("--random", o->random, "classify N random quartics with coefficients in [-10, 10]");
  sub->add_option("--seed", o->seed);
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      if (!(o->tol >= 0)) throw ConfigError("--tol must be >= 0");
      ctx.tolerances["band"] = o->tol;
      if (o->random > 0) {
        std::mt19937_64 rng(o->seed);
        std::uniform_real_distribution<double> u(-10, 10);
        write_table(ctx,
                    {"a1", "a2", "a3", "a4", "label", "left_count", "imag_count", "right_count",
                     "boundary_resolved", "oracle_label"},
                    [&](CsvWriter& w) {
                      for (int i = 0; i < o->random; ++i) {
                        Quartic q;
                        q.a1 = u(rng);
                        q.a2 = u(rng);
                        q.a3 = u(rng);
                        q.a4 = u(rng);
                        const auto v = hurwitz_verdict(q, o->tol);
                        const auto r = root_oracle(q, 1e-8);
                        w << q.a1 << q.a2 << q.a3 << q.a4 << to_string(v.label) << v.left_count
                          << v.imag_count << v.right_count << int(v.boundary_resolved)
                          << to_string(r.label);
                        w.end_row();
                      }
                    });
        return;
      }
      const Quartic q{o->a1, o->a2, o->a3, o->a4};
      const auto v = hurwitz_verdict(q, o->tol);
      std::cout << to_string(v.label) << " left_count=" << v.left_count
                << " imag_count=" << v.imag_count << " right_count=" << v.right_count
                << " repeated_imag=" << int(v.has_repeated_imag_root)
                << " boundary_resolved=" << int(v.boundary_resolved) << " H=" << fmt(marginal_H(q))
                << '\n';
      ctx.outputs["label"] = std::string(to_string(v.label));
      ctx.outputs["census"] = {v.left_count, v.imag_count, v.right_count};
    };
  });
}

// --------------------------------------------------------- bottema-limit

void add_bottema_limit(CLI::App& app, Context& ctx) {
  struct Opt {
    double k11 = 1, k12 = 0, k22 = 4, d11 = 1, d12 = 0, d22 = 0;
    std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5};
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("bottema-limit",
                                 "Critical circulatory parameter of the 2-DoF system as damping vanishes");
  sub->add_option("--k11", o->k11);
  sub->add_option("--k12", o->k12);
  sub->add_option("--k22", o->k22);
  sub->add_option("--d11", o->d11);
  sub->add_option("--d12", o->d12);
  sub->add_option("--d22", o->d22);
  sub->add_option("--deltas", o->deltas, "damping magnitudes, strictly decreasing")->delimiter(',');
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      for (double d : o->deltas) require_positive("--deltas", d);
      const auto K = sym2(o->k11, o->k12, o->k22), D = sym2(o->d11, o->d12, o->d22);
      const double nu0 = nu_critical_undamped(K);
      const double limit = nu_critical_damped_limit(K, D);
      ctx.tolerances["bisection"] = kBisectTol;
      std::vector<double> bisected;
      write_table(ctx, {"delta", "nu_cr_bisected", "nu_cr_limit", "nu0"}, [&](CsvWriter& w) {
        for (double d : o->deltas) {
          bisected.push_back(nu_critical_bisected(K, D, d));
          w << d << bisected.back() << limit << nu0;
          w.end_row();
        }
      });
      if (o->deltas.size() >= 3) {
        const auto ray = extrapolate_ray(Eigen::VectorXd::Ones(1), o->deltas, bisected);
        ctx.outputs["ray_limit"] = {{"extrapolated", ray.extrapolated_limit},
                                    {"order", ray.convergence_order},
                                    {"residual", ray.residual}};
        std::cerr << "nu0=" << fmt(nu0) << " nu_cr_limit=" << fmt(limit)
                  << " extrapolated=" << fmt(ray.extrapolated_limit) << '\n';
      }
    };
  });
}

// ------------------------------------------------------------- ziegler

void add_ziegler(CLI::App& app, Context& ctx) {
  struct Opt {
    double m = 1, l = 1, c = 1, b = 0, b_max = 0;
    int count = 0;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("ziegler", "Critical follower load of the double pendulum");
  sub->add_option("--m", o->m);
  sub->add_option("--l", o->l);
  sub->add_option("--c", o->c);
  sub->add_option("--b", o->b, "joint damping");
  sub->add_option("--b-max", o->b_max, "tabulate b over [0, b-max]");
  sub->add_option("--count", o->count, "number of b samples for the table");
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      ctx.tolerances["bisection"] = kBisectTol;
      ZieglerParams p{o->m, o->l, o->c, o->b, 0};
      p.validate();
      if (o->count > 0) {
        require_count("--count", o->count);
        require_positive("--b-max", o->b_max);
        ZieglerParams und = p;
        und.b = 0;
        const double p_und = ziegler_critical_load(und);
        write_table(ctx, {"b", "P_cr_analytic", "P_cr_bisected", "P_undamped"}, [&](CsvWriter& w) {
          for (double b : linspace(0, o->b_max, o->count)) {
            ZieglerParams q = p;
            q.b = b;
            w << b << ziegler_critical_load(q) << ziegler_critical_load_bisected(q) << p_und;
            w.end_row();
          }
        });
        return;
      }
      const double analytic = ziegler_critical_load(p);
      const double bisected = ziegler_critical_load_bisected(p);
      char line[128];
      std::snprintf(line, sizeof line, "P_cr=%.10f bisected=%.10f", analytic, bisected);
      std::cout << line << '\n';
      ctx.outputs["P_cr_analytic"] = analytic;
      ctx.outputs["P_cr_bisected"] = bisected;
    };
  });
}

// -------------------------------------------------------------- hulten

void add_hulten(CLI::App& app, Context& ctx) {
  struct Opt {
    double w1 = 1, w2 = 2, eta1 = 0, eta2 = 0, eta_max = 0;
    int grid = 0;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("hulten", "Friction-induced flutter of the drum-brake model");
  sub->add_option("--w1", o->w1);
  sub->add_option("--w2", o->w2);
  sub->add_option("--eta1", o->eta1);
  sub->add_option("--eta2", o->eta2);
  sub->add_option("--eta-max", o->eta_max, "tabulate over [0, eta-max]^2");
  sub->add_option("--grid", o->grid);
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      ctx.tolerances["bisection"] = kBisectTol;
      HultenParams p{o->w1, o->w2, o->eta1, o->eta2, 0};
      p.validate();
      const double mu0 = hulten_critical_mu_undamped(o->w1, o->w2);
      if (o->grid > 0) {
        require_count("--grid", o->grid);
        require_positive("--eta-max", o->eta_max);
        const auto etas = linspace(0, o->eta_max, o->grid);
        std::vector<double> mu(etas.size() * etas.size());
        parallel_for(mu.size(), [&](std::size_t k) {
          HultenParams q = p;
          q.eta1 = etas[k / etas.size()];
          q.eta2 = etas[k % etas.size()];
          mu[k] = hulten_critical_mu(q);
        });
        write_table(ctx, {"eta1", "eta2", "mu_cr", "mu_cr_undamped"}, [&](CsvWriter& w) {
          for (std::size_t k = 0; k < mu.size(); ++k) {
            w << etas[k / etas.size()] << etas[k % etas.size()] << mu[k] << mu0;
            w.end_row();
          }
        });
        return;
      }
      const double mu = hulten_critical_mu(p);
      std::cout << "mu_cr=" << fmt(mu) << " mu_cr_undamped=" << fmt(mu0) << '\n';
      ctx.outputs["mu_cr"] = mu;
      ctx.outputs["mu_cr_undamped"] = mu0;
    };
  });
}

// ------------------------------------------------ gyroscopic subcommands

struct GyroOpt {
  double k11 = -1, k12 = 0, k22 = -4, d11 = 1, d12 = 0, d22 = 1;

  void add(CLI::App* sub) {
    sub->add_option("--k11", k11);
    sub->add_option("--k12", k12);
    sub->add_option("--k22", k22);
    sub->add_option("--d11", d11);
    sub->add_option("--d12", d12);
    sub->add_option("--d22", d22);
  }
  GyroSystem system() const {
    return GyroSystem::two_dof(sym2(k11, k12, k22), sym2(d11, d12, d22));
  }
};

void add_gyro_spectrum(CLI::App& app, Context& ctx) {
  struct Opt : GyroOpt {
    double omega = 0, delta = 0, nu = 0, omega_lo = 0, omega_hi = 0;
    int count = 0;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("gyro-spectrum", "Spectrum of a 2-DoF gyroscopic system");
  o->add(sub);
  sub->add_option("--omega", o->omega);
  sub->add_option("--delta", o->delta);
  sub->add_option("--nu", o->nu);
  sub->add_option("--omega-lo", o->omega_lo);
  sub->add_option("--omega-hi", o->omega_hi);
  sub->add_option("--count", o->count, "tabulate the spectrum over [omega-lo, omega-hi]");
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      const GyroSystem base = o->system();
      auto sorted = [](const Eigen::VectorXcd& ev) {
        std::vector<std::complex<double>> v(ev.data(), ev.data() + ev.size());
        std::sort(v.begin(), v.end(), [](auto a, auto b) {
          return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
        });
        return v;
      };
      std::vector<double> omegas{o->omega};
      if (o->count > 0) {
        require_count("--count", o->count);
        if (!(o->omega_lo < o->omega_hi)) throw ConfigError("--omega-lo must be < --omega-hi");
        omegas = linspace(o->omega_lo, o->omega_hi, o->count);
      }
      write_table(ctx, {"Omega", "re1", "im1", "re2", "im2", "re3", "im3", "re4", "im4"},
                  [&](CsvWriter& w) {
                    for (double W : omegas) {
                      w << W;
                      for (auto z : sorted(spectrum(base.with(W, o->delta, o->nu))))
                        w << z.real() << z.imag();
                      w.end_row();
                    }
                  });
      try {
        const auto k = find_krein_collision(base);
        ctx.outputs["krein_collision"] = {{"Omega0", k.collision_speed},
                                          {"omega0", k.collision_frequency},
                                          {"mu", k.mu},
                                          {"gamma_star", k.gamma_star}};
      } catch (const NoCollision&) {
        ctx.outputs["krein_collision"] = nullptr;
      }
    };
  });
}

void add_gyro_umbrella(CLI::App& app, Context& ctx) {
  struct Opt : GyroOpt {
    std::vector<double> deltas{1e-3};
    std::vector<double> gammas{0.5, 1, 1.5, 2, 3};
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand(
      "gyro-umbrella", "Critical gyroscopic parameter near the Krein collision, expansion vs bisection");
  o->add(sub);
  sub->add_option("--deltas", o->deltas)->delimiter(',');
  sub->add_option("--gammas", o->gammas, "ray slopes nu / delta")->delimiter(',');
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      for (double d : o->deltas) require_positive("--deltas", d);
      const GyroSystem base = o->system();
      const auto k = find_krein_collision(base);
      ctx.tolerances["bisection"] = kBisectTol;
      ctx.outputs["krein_collision"] = {{"Omega0", k.collision_speed},
                                        {"omega0", k.collision_frequency},
                                        {"mu", k.mu},
                                        {"gamma_star", k.gamma_star}};
      std::vector<std::pair<double, double>> pts;
      for (double d : o->deltas)
        for (double g : o->gammas) pts.emplace_back(d, g * d);
      std::vector<double> bis(pts.size());
      parallel_for(pts.size(), [&](std::size_t i) {
        bis[i] = omega_cr_bisected(base.with(0, pts[i].first, pts[i].second), 0.0,
                                   k.collision_speed + 1);
      });
      write_table(ctx, {"delta", "nu", "Omega_cr_analytic", "Omega_cr_bisected"},
                  [&](CsvWriter& w) {
                    for (std::size_t i = 0; i < pts.size(); ++i) {
                      w << pts[i].first << pts[i].second
                        << omega_cr_surface(k, pts[i].first, pts[i].second) << bis[i];
                      w.end_row();
                    }
                  });
    };
  });
}

void add_maxwell_bloch(CLI::App& app, Context& ctx) {
  struct Opt {
    double omega = 0, nu = 0, delta = 1, kappa = 1;
    double omega_lo = -4, omega_hi = 4, nu_lo = -4, nu_hi = 4;
    int grid = 0;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("maxwell-bloch", "Stability of the modified Maxwell-Bloch equation");
  sub->add_option("--omega", o->omega);
  sub->add_option("--nu", o->nu);
  sub->add_option("--delta", o->delta);
  sub->add_option("--kappa", o->kappa);
  sub->add_option("--omega-lo", o->omega_lo);
  sub->add_option("--omega-hi", o->omega_hi);
  sub->add_option("--nu-lo", o->nu_lo);
  sub->add_option("--nu-hi", o->nu_hi);
  sub->add_option("--grid", o->grid, "tabulate verdicts on a grid x grid (Omega, nu) mesh");
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      ctx.tolerances["band"] = kDefaultBand;
      if (o->grid > 0) {
        require_count("--grid", o->grid);
        const auto W = linspace(o->omega_lo, o->omega_hi, o->grid);
        const auto N = linspace(o->nu_lo, o->nu_hi, o->grid);
        write_table(ctx, {"Omega", "nu", "delta", "kappa", "label", "closed_form_stable"},
                    [&](CsvWriter& w) {
                      for (double om : W)
                        for (double nu : N) {
                          const MaxwellBlochParams p{om, o->delta, nu, o->kappa};
                          w << om << nu << o->delta << o->kappa
                            << to_string(maxwell_bloch_verdict(p).label)
                            << int(maxwell_bloch_stable_closed_form(p));
                          w.end_row();
                        }
                    });
        return;
      }
      const MaxwellBlochParams p{o->omega, o->delta, o->nu, o->kappa};
      const auto v = maxwell_bloch_verdict(p);
      std::cout << to_string(v.label) << " closed_form_stable="
                << int(maxwell_bloch_stable_closed_form(p))
                << " margin=" << fmt(maxwell_bloch_margin(p)) << '\n';
      ctx.outputs["label"] = std::string(to_string(v.label));
    };
  });
}

// ------------------------------------------------------------- floquet

void add_floquet(CLI::App& app, Context& ctx) {
  struct Opt {
    double alpha = 1, eps = 0.05, kappa = 0, eta_lo = 1.2, eta_hi = 1.7;
    int count = 101, steps = kDefaultFloquetSteps;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("floquet", "Floquet multipliers of the parametrically excited rotor");
  sub->add_option("--alpha", o->alpha);
  sub->add_option("--eps", o->eps);
  sub->add_option("--kappa", o->kappa, "damping scale, mu = 2 eps kappa");
  sub->add_option("--eta-lo", o->eta_lo);
  sub->add_option("--eta-hi", o->eta_hi);
  sub->add_option("--count", o->count);
  sub->add_option("--steps", o->steps, "RK4 steps per period");
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      require_count("--count", o->count);
      require_positive("--eta-lo", o->eta_lo);
      if (!(o->eta_lo < o->eta_hi)) throw ConfigError("--eta-lo must be < --eta-hi");
      if (o->steps < 256) throw ConfigError("--steps must be >= 256");
      RotorParams p{o->alpha, o->eps, 1, o->kappa};
      p.validate();
      ctx.tolerances["multiplier"] = kMultiplierTol;
      ctx.tolerances["step_halving"] = 1e-6;
      const double mu = p.damping();
      double lo = NAN, hi = NAN;
      if (mu == 0) {
        lo = tongue_boundary_undamped_estimate(o->alpha, o->eps, -1);
        hi = tongue_boundary_undamped_estimate(o->alpha, o->eps, 1);
      } else {
        try {
          lo = tongue_boundary_damped_estimate(o->alpha, o->eps, mu, -1);
          hi = tongue_boundary_damped_estimate(o->alpha, o->eps, mu, 1);
        } catch (const NoBoundary&) {
        }
      }
      const auto etas = linspace(o->eta_lo, o->eta_hi, o->count);
      std::vector<FloquetResult> res(etas.size());
      parallel_for(etas.size(), [&](std::size_t i) {
        RotorParams q = p;
        q.eta = etas[i];
        res[i] = monodromy(q, o->steps);
      });
      write_table(ctx, {"eta", "max_modulus", "stable", "eta_b_analytic_lo", "eta_b_analytic_hi"},
                  [&](CsvWriter& w) {
                    for (std::size_t i = 0; i < etas.size(); ++i) {
                      w << etas[i] << res[i].max_modulus << int(res[i].stable) << lo << hi;
                      w.end_row();
                    }
                  });
      if (o->eps > 0) {
        try {
          ctx.outputs["eta_b_bisected"] = {tongue_boundary(p, -1), tongue_boundary(p, 1)};
        } catch (const NoBoundary&) {
          ctx.outputs["eta_b_bisected"] = nullptr;
        }
      }
    };
  });
}

// ---------------------------------------------------------------- beck

void add_beck(CLI::App& app, Context& ctx) {
  struct Opt {
    double d1 = 0, d2 = 0, d1_lo = 1e-4, d1_hi = 1e-2, d2_lo = 0, d2_hi = 0.5;
    int n_modes = 12, grid = 0;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("beck", "Flutter load of the damped Beck column");
  sub->add_option("--d1", o->d1, "internal damping");
  sub->add_option("--d2", o->d2, "external damping");
  sub->add_option("--n-modes", o->n_modes);
  sub->add_option("--d1-lo", o->d1_lo);
  sub->add_option("--d1-hi", o->d1_hi);
  sub->add_option("--d2-lo", o->d2_lo);
  sub->add_option("--d2-hi", o->d2_hi);
  sub->add_option("--grid", o->grid, "tabulate a grid x grid mesh (d1 log-spaced)");
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      if (o->n_modes < 8 || o->n_modes > 32) throw ConfigError("--n-modes must be in [8, 32]");
      ctx.tolerances["bisection"] = 1e-10;
      ctx.tolerances["quadrature"] = 1e-10;
      auto be12 = [](double d1, double d2) {
        try {
          return be12_surface(d1, d2);
        } catch (const DomainError&) {
          return double(NAN);
        }
      };
      if (o->grid > 0) {
        require_count("--grid", o->grid);
        require_positive("--d1-lo", o->d1_lo);
        if (!(o->d1_lo < o->d1_hi) || !(o->d2_lo < o->d2_hi)) throw ConfigError("empty range");
        const auto D1 = logspace(o->d1_lo, o->d1_hi, o->grid);
        const auto D2 = linspace(o->d2_lo, o->d2_hi, o->grid);
        std::vector<double> q(D1.size() * D2.size());
        parallel_for(q.size(), [&](std::size_t k) {
          q[k] = flutter_load(D1[k / D2.size()], D2[k % D2.size()], o->n_modes).q_cr;
        });
        write_table(ctx, {"d1", "d2", "q_cr_numeric", "q_cr_be12"}, [&](CsvWriter& w) {
          for (std::size_t k = 0; k < q.size(); ++k) {
            const double d1 = D1[k / D2.size()], d2 = D2[k % D2.size()];
            w << d1 << d2 << q[k] << be12(d1, d2);
            w.end_row();
          }
        });
        return;
      }
      const auto f = flutter_load(o->d1, o->d2, o->n_modes);
      write_table(ctx, {"d1", "d2", "q_cr_numeric", "q_cr_be12", "omega_cr"}, [&](CsvWriter& w) {
        w << o->d1 << o->d2 << f.q_cr << be12(o->d1, o->d2) << f.omega_cr;
        w.end_row();
      });
    };
  });
}

// ---------------------------------------------------------- baroclinic

void add_baroclinic(CLI::App& app, Context& ctx) {
  struct Opt {
    double F = 10, beta = 1, r = 0, alpha = 1, lo = 0.1, hi = 2, U_lo = 0, U_hi = 0.2;
    int m = 1, count = 50;
    std::string mode = "thresholds";
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("baroclinic", "Two-layer baroclinic instability thresholds");
  sub->add_option("--mode", o->mode)->check(CLI::IsMember({"thresholds", "portrait"}));
  sub->add_option("--F", o->F);
  sub->add_option("--beta", o->beta);
  sub->add_option("--r", o->r, "Ekman dissipation (portrait mode)");
  sub->add_option("--alpha", o->alpha, "zonal wavenumber (portrait mode)");
  sub->add_option("--m", o->m);
  sub->add_option("--alpha-lo", o->lo);
  sub->add_option("--alpha-hi", o->hi);
  sub->add_option("--U-lo", o->U_lo);
  sub->add_option("--U-hi", o->U_hi);
  sub->add_option("--count", o->count);
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      require_count("--count", o->count);
      ctx.tolerances["growth"] = kGrowthTol;
      BaroclinicParams p{o->F, o->beta, o->r, o->alpha, o->m, 0, 0};
      p.validate();
      if (o->mode == "portrait") {
        const auto rows = merging_portrait(p, o->U_lo, o->U_hi, o->count);
        write_table(ctx, {"U", "re_c1", "im_c1", "re_c2", "im_c2"}, [&](CsvWriter& w) {
          for (const auto& row : rows) {
            w << row.U << row.roots.c1.real() << row.roots.c1.imag() << row.roots.c2.real()
              << row.roots.c2.imag();
            w.end_row();
          }
        });
        return;
      }
      auto safe = [](auto f) {
        try {
          return f();
        } catch (const DomainError&) {
          return double(NAN);
        }
      };
      write_table(ctx, {"alpha", "U_cI", "U_cR"}, [&](CsvWriter& w) {
        for (double a : linspace(o->lo, o->hi, o->count)) {
          BaroclinicParams q = p;
          q.alpha = a;
          w << a << safe([&] { return inviscid_threshold(q); })
            << safe([&] { return vanishing_viscosity_threshold(q); });
          w.end_row();
        }
      });
    };
  });
}

// ----------------------------------------------------- umbrella-sample

void add_umbrella_sample(CLI::App& app, Context& ctx) {
  struct Opt {
    int grid = 100;
    double x1_lo = -1, x1_hi = 1, x2_lo = 0, x2_hi = 2;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("umbrella-sample",
                                 "Umbrella surface and its image on the marginal quartic surface");
  sub->add_option("--grid", o->grid);
  sub->add_option("--x1-lo", o->x1_lo);
  sub->add_option("--x1-hi", o->x1_hi);
  sub->add_option("--x2-lo", o->x2_lo);
  sub->add_option("--x2-hi", o->x2_hi);
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      require_count("--grid", o->grid);
      const auto X1 = linspace(o->x1_lo, o->x1_hi, o->grid);
      const auto X2 = linspace(o->x2_lo, o->x2_hi, o->grid);
      write_table(ctx, {"x1", "x2", "y1", "y2", "y3", "a1", "a2", "a3", "residual"},
                  [&](CsvWriter& w) {
                    for (double x1 : X1)
                      for (double x2 : X2) {
                        const auto y = umbrella_map(x1, x2);
                        double res = std::abs(umbrella_residual(y.y1, y.y2, y.y3));
                        double a1 = NAN, a2 = NAN, a3 = NAN;
                        if (y.y3 * y.y3 / 4 + y.y1 * y.y2 >= 0) {
                          const auto b = bottema_from_whitney(y.y1, y.y2, y.y3);
                          a1 = b.a1;
                          a2 = b.a2;
                          a3 = b.a3;
                          const double scale =
                              std::max({1.0, a1 * a1, a3 * a3, std::abs(a1 * a2 * a3)});
                          res = std::max(res, std::abs(bottema_residual(a1, a2, a3)) / scale);
                        }
                        w << x1 << x2 << y.y1 << y.y2 << y.y3 << a1 << a2 << a3 << res;
                        w.end_row();
                      }
                  });
    };
  });
}

// --------------------------------------------------------------- sweep

// Grid functions available to `sweep`, keyed by id, with the axis names they
// expect (in order) and the scalar parameters they accept.
struct SweepFunction {
  std::vector<std::string> axes;
  std::map<std::string, double> params;
  std::function<double(std::span<const double>, const std::map<std::string, double>&)> eval;
};

std::map<std::string, SweepFunction> sweep_functions() {
  std::map<std::string, SweepFunction> f;
  f["quartic"] = {{"a1", "a2", "a3"}, {{"a4", 1.0}}, [](auto x, const auto& p) {
                    return double(label_code(
                        hurwitz_verdict(Quartic{x[0], x[1], x[2], p.at("a4")}).label));
                  }};
  f["ziegler"] = {{"b", "P"}, {{"m", 1.0}, {"l", 1.0}, {"c", 1.0}}, [](auto x, const auto& p) {
                    const ZieglerParams z{p.at("m"), p.at("l"), p.at("c"), x[0], x[1]};
                    return double(label_code(hurwitz_verdict(ziegler_quartic(z)).label));
                  }};
  f["maxwell-bloch"] = {{"Omega", "nu", "kappa"}, {{"delta", 1.0}}, [](auto x, const auto& p) {
                          const MaxwellBlochParams m{x[0], p.at("delta"), x[1], x[2]};
                          return double(label_code(maxwell_bloch_verdict(m).label));
                        }};
  f["gyro"] = {{"Omega", "delta", "nu"},
               {{"k11", -1.0}, {"k12", 0.0}, {"k22", -4.0}, {"d11", 1.0}, {"d12", 0.0}, {"d22", 1.0}},
               [](auto x, const auto& p) {
                 const auto s = GyroSystem::two_dof(sym2(p.at("k11"), p.at("k12"), p.at("k22")),
                                                    sym2(p.at("d11"), p.at("d12"), p.at("d22")),
                                                    x[0], x[1], x[2]);
                 return spectral_abscissa(s);
               }};
  f["floquet"] = {{"eta", "kappa"}, {{"alpha", 1.0}, {"eps", 0.05}}, [](auto x, const auto& p) {
                    return monodromy(RotorParams{p.at("alpha"), p.at("eps"), x[0], x[1]}).max_modulus;
                  }};
  f["baroclinic"] = {{"U", "r"}, {{"F", 10.0}, {"beta", 1.0}, {"alpha", 1.0}, {"m", 1.0}},
                     [](auto x, const auto& p) {
                       const BaroclinicParams b{p.at("F"), p.at("beta"), x[1], p.at("alpha"),
                                                int(p.at("m")), x[0], 0};
                       return dispersion(b).growth1;
                     }};
  return f;
}

Axis parse_axis(const std::string& spec) {
  // name:lo:hi:count[:log]
  std::vector<std::string> parts;
  std::stringstream ss(spec);
  for (std::string s; std::getline(ss, s, ':');) parts.push_back(s);
  if (parts.size() != 4 && parts.size() != 5)
    throw ConfigError("axis '" + spec + "' is not name:lo:hi:count[:log]");
  Axis a;
  a.name = parts[0];
  try {
    a.lo = std::stod(parts[1]);
    a.hi = std::stod(parts[2]);
    a.count = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError("axis '" + spec + "' has a malformed number");
  }
  if (parts.size() == 5) {
    if (parts[4] != "log") throw ConfigError("axis '" + spec + "': unknown spacing " + parts[4]);
    a.log_spaced = true;
  }
  try {
    a.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return a;
}

void add_sweep(CLI::App& app, Context& ctx) {
  struct Opt {
    std::string function;
    std::vector<std::string> axes, set;
    int threads = 0;
  };
  auto o = std::make_shared<Opt>();
  auto* sub = app.add_subcommand("sweep", "Evaluate a stability function on a parameter grid");
  sub->add_option("--function", o->function)
      ->required()
      ->check(CLI::IsMember({"quartic", "ziegler", "maxwell-bloch", "gyro", "floquet", "baroclinic"}));
  sub->add_option("--axis", o->axes, "name:lo:hi:count[:log], one per function axis")->required();
  sub->add_option("--set", o->set, "scalar parameter key=value");
  sub->add_option("--threads", o->threads, "worker threads (default: STABKIT_THREADS or all cores)");
  sub->callback([&ctx, sub, o] {
    ctx.active = sub;
    ctx.action = [&ctx, o] {
      auto fns = sweep_functions();
      SweepFunction fn = fns.at(o->function);
      for (const auto& kv : o->set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
        const std::string key = kv.substr(0, eq);
        if (!fn.params.count(key))
          throw ConfigError("unknown parameter '" + key + "' for " + o->function);
        try {
          fn.params[key] = std::stod(kv.substr(eq + 1));
        } catch (const std::exception&) {
          throw ConfigError("malformed value in --set " + kv);
        }
      }
      if (o->axes.size() != fn.axes.size())
        throw ConfigError(o->function + " needs " + std::to_string(fn.axes.size()) + " axes");
      std::vector<Axis> axes;
      for (std::size_t i = 0; i < o->axes.size(); ++i) {
        axes.push_back(parse_axis(o->axes[i]));
        if (axes.back().name != fn.axes[i])
          throw ConfigError("axis " + std::to_string(i + 1) + " of " + o->function + " must be " +
                            fn.axes[i]);
      }
      const auto params = fn.params;
      const auto grid = run_sweep(
          axes, o->function,
          [&](std::span<const double> x) { return fn.eval(x, params); }, o->threads);
      std::vector<std::string> header = fn.axes;
      header.push_back("value");
      write_table(ctx, header, [&](CsvWriter& w) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
          for (double x : grid.point(k)) w << x;
          w << grid.values[k];
          w.end_row();
        }
      });
      json ax = json::array();
      for (const auto& a : axes)
        ax.push_back({{"name", a.name}, {"lo", a.lo}, {"hi", a.hi}, {"count", a.count},
                      {"log", a.log_spaced}});
      ctx.outputs["axes"] = ax;
      ctx.outputs["params"] = params;
      ctx.outputs["threads"] = o->threads > 0 ? o->threads : default_thread_count();
    };
  });
}

void error_record(int status, const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}, {"status", status}}.dump()
            << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stabkit: stability analysis of non-conservative linear systems"};
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Context ctx;
  app.add_option("--out", ctx.out, "CSV output path (default: stdout)");
  app.add_option("--meta", ctx.meta, "metadata sidecar path (default: <out>.json)");

  add_verdict(app, ctx);
  add_bottema_limit(app, ctx);
  add_ziegler(app, ctx);
  add_hulten(app, ctx);
  add_gyro_spectrum(app, ctx);
  add_gyro_umbrella(app, ctx);
  add_maxwell_bloch(app, ctx);
  add_floquet(app, ctx);
  add_beck(app, ctx);
  add_baroclinic(app, ctx);
  add_umbrella_sample(app, ctx);
  add_sweep(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_record(2, e.get_name(), e.what());
    return 2;
  }

  const std::string name = ctx.active->get_name();
  const auto start = std::chrono::steady_clock::now();
  try {
    ctx.action();
  } catch (const ConfigError& e) {
    error_record(2, "ConfigError", e.what());
    return 2;
  } catch (const Error& e) {
    error_record(1, e.kind(), e.what());
    return 1;
  } catch (const std::exception& e) {
    error_record(1, "InternalError", e.what());
    return 1;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::string meta = ctx.meta;
  if (meta.empty()) meta = ctx.out.empty() ? "stabkit-" + name + ".json" : ctx.out + ".json";
  json sidecar = make_sidecar(name, inputs_of(ctx.active), ctx.tolerances, seconds);
  sidecar["outputs"] = ctx.outputs;
  if (!ctx.out.empty()) sidecar["global"] = {{"out", ctx.out}};
  try {
    write_json_file(meta, sidecar);
  } catch (const Error& e) {
    error_record(1, e.kind(), e.what());
    return 1;
  }
  return 0;
}
