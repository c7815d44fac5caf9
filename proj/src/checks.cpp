#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "gmom/diagnostics.hpp"
#include "gmom/dynamics.hpp"
#include "gmom/harness.hpp"
#include "gmom/rng.hpp"

namespace gmom {

namespace {

struct CheckContext {
  std::ostream& os;
  int failures = 0;

  /** One line per check; positive slack means the invariant holds with room
   * to spare. */
  void report(const std::string& name, double slack, bool pass) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", slack);
    os << "check " << name << ": slack=" << buf
       << (pass ? " [PASS]" : " [FAIL]") << "\n";
    if (!pass) ++failures;
  }

  /** Convention used by most checks: slack is already oriented so that
   * nonnegative (up to -tol) means pass. */
  void expect_slack(const std::string& name, double slack, double tol = 0.0) {
    report(name, slack, slack >= -tol);
  }
};

std::vector<MirrorMap> test_maps() {
  return {MirrorMap::euclidean(1.3), MirrorMap::euclidean_ball(1.1, 0.8),
          MirrorMap::entropy_simplex(0.7), MirrorMap::squared_p_norm(1.2, 1.5)};
}

Vector interior_point(const MirrorMap& map, Rng& rng, int dim) {
  if (map.geometry() == Geometry::EntropySimplex) {
    Vector u = rng.uniform_vector(dim, -1.0, 1.0);
    Vector w = (u.array() - u.maxCoeff()).exp().matrix();
    return w / w.sum();
  }
  Vector x = rng.uniform_vector(dim, -1.0, 1.0);
  if (map.geometry() == Geometry::EuclideanBall) {
    double limit = 0.8 * map.radius();
    double n = x.norm();
    if (n > limit) x *= limit / n;
  }
  return x;
}

void check_spaces(CheckContext& ctx) {
  const int dim = 4;
  Rng rng(11);

  double worst_three_point = 0.0;
  double worst_lower = std::numeric_limits<double>::infinity();
  double worst_upper = std::numeric_limits<double>::infinity();
  double worst_feasible = 0.0;
  double worst_deriv = 0.0;
  double worst_roundtrip = 0.0;

  for (const MirrorMap& map : test_maps()) {
    double m = map.modulus();
    for (int trial = 0; trial < 40; ++trial) {
      Vector z = rng.uniform_vector(dim, -2.0, 2.0);
      Vector w = rng.uniform_vector(dim, -2.0, 2.0);
      Vector gw = map.conjugate_grad(w);
      double res = map.conjugate_value(z) - map.conjugate_value(w) -
                   gw.dot(z - w) - map.bregman_dual(z, w);
      worst_three_point = std::max(worst_three_point, std::abs(res));

      Vector gz = map.conjugate_grad(z);
      double d = map.bregman_dual(z, w);
      double pn = map.primal_norm(gz - gw);
      double dn = map.dual_norm(z - w);
      worst_lower = std::min(worst_lower, d - 0.5 * m * pn * pn);
      worst_upper = std::min(worst_upper, dn * dn / (2.0 * m) - d);

      if (map.geometry() == Geometry::EntropySimplex) {
        worst_feasible = std::max(worst_feasible, std::abs(gz.sum() - 1.0));
        worst_feasible = std::max(worst_feasible, -gz.minCoeff());
      } else if (map.geometry() == Geometry::EuclideanBall) {
        worst_feasible = std::max(worst_feasible, gz.norm() - map.radius());
      }

      Vector dir = rng.uniform_vector(dim, -1.0, 1.0);
      double eps = 1e-6;
      double fd = (map.conjugate_value(z + eps * dir) -
                   map.conjugate_value(z - eps * dir)) /
                  (2.0 * eps);
      double exact = gz.dot(dir);
      worst_deriv = std::max(
          worst_deriv, std::abs(fd - exact) / (1.0 + std::abs(exact)));

      Vector x = interior_point(map, rng, dim);
      Vector back = map.conjugate_grad(map.primal_to_dual(x));
      worst_roundtrip =
          std::max(worst_roundtrip, (back - x).lpNorm<Eigen::Infinity>());
    }
  }

  ctx.expect_slack("spaces/three_point_identity", 1e-10 - worst_three_point);
  ctx.expect_slack("spaces/bregman_lower_sandwich", worst_lower, 1e-10);
  ctx.expect_slack("spaces/bregman_upper_sandwich", worst_upper, 1e-10);
  ctx.expect_slack("spaces/conjugate_grad_feasible", 1e-12 - worst_feasible);
  ctx.expect_slack("spaces/conjugate_grad_matches_value", 1e-6 - worst_deriv);
  ctx.expect_slack("spaces/primal_dual_round_trip", 1e-9 - worst_roundtrip);
}

void check_objectives(CheckContext& ctx) {
  Rng rng(13);
  std::vector<Objective> objs;
  objs.push_back(make_quadratic(5, 100.0));
  objs.push_back(make_logistic(40, 5, 3));
  objs.push_back(make_nonconvex_2d(NonconvexKind::DoubleWell));
  objs.push_back(make_nonconvex_2d(NonconvexKind::StyblinskiTang));

  double worst_fd = 0.0;
  double worst_smooth = 0.0;
  double worst_weak = std::numeric_limits<double>::infinity();
  double worst_opt = 0.0;

  for (const Objective& f : objs) {
    auto draw = [&]() {
      Vector x(f.dim);
      if (f.box) {
        for (int i = 0; i < f.dim; ++i) {
          x[i] = rng.uniform(0.8 * f.box->first[i], 0.8 * f.box->second[i]);
        }
      } else {
        x = rng.uniform_vector(f.dim, -1.5, 1.5);
      }
      return x;
    };

    for (int trial = 0; trial < 10; ++trial) {
      Vector x = draw();
      Vector g = f.gradient(x);
      Vector fd = finite_difference_gradient(f, x, 1e-6);
      worst_fd = std::max(worst_fd, (g - fd).norm() / (1.0 + g.norm()));
    }

    for (int trial = 0; trial < 100; ++trial) {
      Vector x = draw();
      Vector y = draw();
      double dx = (x - y).norm();
      if (dx < 1e-12) continue;
      double dg = (f.gradient(x) - f.gradient(y)).norm();
      worst_smooth = std::max(worst_smooth, dg / (f.smoothness * dx));

      double lin = f.value(y) - f.value(x) - f.gradient(x).dot(y - x);
      double scale = std::max(1.0, std::abs(f.value(x)));
      worst_weak = std::min(
          worst_weak, (lin + 0.5 * f.weak_convexity * dx * dx) / scale);
    }

    if (f.optimum_value && f.optimum_point) {
      double scale = std::max(1.0, std::abs(*f.optimum_value));
      worst_opt = std::max(
          worst_opt, std::abs(f.value(*f.optimum_point) - *f.optimum_value) /
                         scale);
      worst_opt = std::max(worst_opt, f.gradient(*f.optimum_point).norm());
    }
  }

  ctx.expect_slack("objectives/gradient_matches_finite_difference",
                   1e-5 - worst_fd);
  ctx.expect_slack("objectives/gradient_lipschitz_within_L",
                   1.0 + 1e-9 - worst_smooth);
  ctx.expect_slack("objectives/weak_convexity_inequality", worst_weak, 1e-9);
  ctx.expect_slack("objectives/optimum_consistent", 1e-7 - worst_opt);
}

void check_schedules(CheckContext& ctx) {
  std::vector<ScheduleParams> sets = {
      {1.0, 0.5, 1.0, 1.0, 1.0},  {0.0, 0.25, 1.0, 1.0, 1.0},
      {2.0, 0.7, 2.0, 5.0, 1.0},  {0.7, 0.3, 1.0, 1.0, 1.0},
      {1.6, 0.25, 1.0, 1.0, 1.0},
  };

  double worst_rec = 0.0;
  double worst_theta = 0.0;
  double worst_b = std::numeric_limits<double>::infinity();
  for (const ScheduleParams& params : sets) {
    Schedule s = build_schedule(params, 400);
    double r = params.c * params.mu / params.L;
    // a[0] is the free normalization; the recurrence binds from k = 1.
    for (int k = 1; k <= 400; ++k) {
      if (std::isfinite(s.A[k])) {
        double target = r / s.H[k];
        double got = s.a[k] * s.a[k] / (s.A[k] * s.A[k]);
        worst_rec = std::max(worst_rec, std::abs(got - target) / target);
        worst_b = std::min(worst_b, s.B[k] - s.B[k - 1]);
      }
      worst_theta = std::max(worst_theta, s.ratio(k) - s.ratio(k - 1));
    }
  }
  ctx.expect_slack("schedules/recurrence_relative_error", 1e-10 - worst_rec);
  ctx.expect_slack("schedules/theta_nonincreasing", 1e-12 - worst_theta);
  ctx.expect_slack("schedules/B_strictly_increasing", worst_b);

  {
    Schedule s = build_schedule({1.0, 0.5, 1.0, 100.0, 1.0}, 3000);
    GrowthReport g = asymptotic_growth_check(s);
    ctx.expect_slack("schedules/growth_lambda1_linear",
                     0.1 - std::abs(g.fitted - g.predicted));
  }
  {
    Schedule s = build_schedule({0.0, 0.25, 1.0, 1.0, 1.0}, 300);
    GrowthReport g = asymptotic_growth_check(s);
    ctx.expect_slack("schedules/growth_lambda0_geometric",
                     1e-6 - std::abs(g.fitted - g.predicted));
  }
  {
    Schedule s = build_schedule({2.0, 0.7, 2.0, 5.0, 1.0}, 300);
    GrowthReport g = asymptotic_growth_check(s);
    ctx.expect_slack("schedules/growth_lambda2_flat",
                     0.05 - std::abs(g.fitted - g.predicted));
  }
  {
    Schedule s = build_schedule({0.0, 0.5, 11.0, 11.0, 1.0}, 300);
    double margin = descent_condition_margin(s, 11.0, 0.5, 300);
    ctx.expect_slack("schedules/descent_margin_constant_H", margin);
  }
  {
    Schedule s = build_schedule({1.0, 0.5, 1.0, 1.0, 1.0}, 200);
    double margin = descent_condition_margin(s, 1.0, 0.0, 200);
    ctx.report("schedules/descent_margin_goes_negative_lambda1", margin,
               margin < 0.0);
  }
}

Trace run_quadratic(Method method, double lambda, double c, int iters,
                    bool track, std::uint64_t seed = 7, int dim = 5,
                    double kappa = 10.0, double map_mu = 1.0) {
  Rng rng(seed);
  ProblemInstance prob =
      make_problem(make_quadratic(dim, kappa), MirrorMap::euclidean(map_mu),
                   rng.uniform_vector(dim, -1.0, 1.0));
  RunConfig rc;
  rc.method = method;
  rc.lambda = lambda;
  rc.c = c;
  rc.iters = iters;
  rc.track_ck = track;
  rc.history_cap = iters + 1;
  return run(rc, prob);
}

void check_discrete(CheckContext& ctx) {
  {
    double worst = 0.0;
    for (Method m : {Method::GmdF, Method::Gmd, Method::GmdB}) {
      ProblemInstance prob = make_problem(
          make_quadratic(3, 10.0), MirrorMap::euclidean(1.0), Vector::Zero(3));
      RunConfig rc;
      rc.method = m;
      rc.iters = 20;
      Trace tr = run(rc, prob);
      worst = std::max(worst, tr.y.lpNorm<Eigen::Infinity>());
      worst = std::max(worst, tr.x.lpNorm<Eigen::Infinity>());
    }
    ctx.expect_slack("discrete/optimum_is_fixed_point", 1e-14 - worst);
  }

  {
    Trace a = run_quadratic(Method::GmdF, 1.0, 0.5, 100, false);
    Trace b = run_quadratic(Method::Gmd, 1.0, 0.5, 100, false);
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
      worst = std::max(worst,
                       (a.y_hist[k] - b.y_hist[k]).lpNorm<Eigen::Infinity>());
      worst = std::max(worst,
                       (a.z_hist[k] - b.z_hist[k]).lpNorm<Eigen::Infinity>());
    }
    ctx.expect_slack("discrete/gmd_f_equals_gmd_at_lambda1", 1e-12 - worst);
  }

  {
    Trace a = run_quadratic(Method::GmdB, 1.0, 1.0, 100, false);
    Trace b = run_quadratic(Method::Gmd, 1.0, 1.0, 100, false);
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
      worst = std::max(worst,
                       (a.y_hist[k] - b.y_hist[k]).lpNorm<Eigen::Infinity>());
    }
    ctx.expect_slack("discrete/gmd_b_equals_gmd_at_c1", 1e-10 - worst);
  }

  {
    Trace tr = run_quadratic(Method::Gmd, 1.0, 0.5, 200, false);
    const Schedule& s = *tr.schedule;
    const MirrorMap& map = *tr.map;
    Vector acc = s.a[0] * map.conjugate_grad(tr.z_hist[0]);
    double worst = 0.0;
    for (int k = 1; k <= 200; ++k) {
      acc += s.a[k] * map.conjugate_grad(tr.z_hist[k]);
      Vector avg = acc / s.A[k];
      worst = std::max(
          worst, (tr.y_hist[k] - avg).lpNorm<Eigen::Infinity>() /
                     (1.0 + tr.y_hist[k].lpNorm<Eigen::Infinity>()));
    }
    ctx.expect_slack("discrete/gmd_average_identity", 1e-9 - worst);
  }

  {
    Rng rng(19);
    Vector u = rng.uniform_vector(6, -1.0, 1.0);
    Vector w = (u.array() - u.maxCoeff()).exp().matrix();
    ProblemInstance prob =
        make_problem(make_quadratic(6, 50.0), MirrorMap::entropy_simplex(1.0),
                     w / w.sum());
    RunConfig rc;
    rc.method = Method::GmdF;
    rc.iters = 500;
    rc.history_cap = 501;
    Trace tr = run(rc, prob);
    double worst = 0.0;
    for (const Vector& y : tr.y_hist) {
      worst = std::max(worst, std::abs(y.sum() - 1.0));
      worst = std::max(worst, -y.minCoeff());
    }
    ctx.expect_slack("discrete/entropy_iterates_stay_on_simplex",
                     1e-9 - worst);
  }

  {
    Rng rng(23);
    Vector x0 = rng.uniform_vector(4, -0.4, 0.4);
    ProblemInstance prob = make_problem(
        make_quadratic(4, 10.0), MirrorMap::euclidean_ball(1.0, 0.9), x0);
    RunConfig rc;
    rc.method = Method::GmdF;
    rc.iters = 300;
    rc.history_cap = 301;
    Trace tr = run(rc, prob);
    double worst = 0.0;
    for (const Vector& y : tr.y_hist) {
      worst = std::max(worst, y.norm() - 0.9);
    }
    ctx.expect_slack("discrete/ball_iterates_stay_inside", 1e-9 - worst);
  }

  {
    // 1-D quadratic with lambda = 0 matches the two-term momentum recurrence
    // x_{k+1} = x_k - alpha grad f(x_k) + beta (x_k - x_{k-1}) from step 2 on
    // (step 1 predates the constant-ratio regime).
    double q = 1.7, L = 2.0, c = 0.3, mu = 1.0;
    Objective f;
    f.name = "scalar_quadratic";
    f.dim = 1;
    f.value = [q](const Vector& x) { return 0.5 * q * x[0] * x[0]; };
    f.gradient = [q](const Vector& x) {
      Vector g(1);
      g[0] = q * x[0];
      return g;
    };
    f.smoothness = L;
    f.weak_convexity = 0.0;
    f.optimum_value = 0.0;
    f.optimum_point = Vector::Zero(1);

    Vector x0(1);
    x0[0] = 1.0;
    ProblemInstance prob =
        make_problem(std::move(f), MirrorMap::euclidean(mu), x0);
    RunConfig rc;
    rc.method = Method::Gmd;
    rc.lambda = 0.0;
    rc.c = c;
    rc.iters = 100;
    rc.history_cap = 101;
    Trace tr = run(rc, prob);

    double theta = std::sqrt(c * mu / L);
    double alpha = theta * theta / mu;
    double beta = (1.0 - theta) * (1.0 - theta * theta * q / mu);
    double worst = 0.0;
    for (int k = 2; k < 100; ++k) {
      double xk = tr.x_hist[k][0];
      double res = tr.x_hist[k + 1][0] - xk + alpha * q * xk -
                   beta * (xk - tr.x_hist[k - 1][0]);
      worst = std::max(worst, std::abs(res));
    }
    ctx.expect_slack("discrete/lambda0_heavy_ball_recurrence", 1e-9 - worst);
  }

  {
    Trace tr = run_quadratic(Method::GmdF, 1.0, 0.5, 0, false);
    ctx.report("discrete/zero_budget_records_initial_row",
               static_cast<double>(tr.steps()), tr.steps() == 0);
  }

  {
    Trace a = run_quadratic(Method::Gmd, 0.7, 0.4, 50, true);
    Trace b = run_quadratic(Method::Gmd, 0.7, 0.4, 50, true);
    double worst = 0.0;
    for (int k = 0; k <= 50; ++k) {
      worst = std::max(worst, std::abs(a.f_y[k] - b.f_y[k]));
      worst = std::max(worst, std::abs(a.c_f[k] - b.c_f[k]));
    }
    ctx.report("discrete/identical_configs_identical_traces", -worst,
               worst == 0.0);
  }
}

void check_continuous(CheckContext& ctx) {
  {
    ContinuousRun cr;
    cr.kind = DynamicsKind::Hd;
    cr.map = MirrorMap::euclidean(1.0);
    cr.objective = make_quadratic(1, 1.0);
    cr.dt = 1e-3;
    cr.T = 10.0;
    cr.z0 = Vector::Zero(1);
    Vector x0(1);
    x0[0] = 1.0;
    cr.x0 = x0;
    Trajectory traj = integrate(cr);

    double worst = 0.0;
    for (int i = 0; i < traj.samples(); ++i) {
      worst = std::max(worst, std::abs(traj.x[i][0] - std::cos(traj.t[i])));
      worst = std::max(worst, std::abs(traj.z[i][0] + std::sin(traj.t[i])));
    }
    ctx.expect_slack("continuous/oscillator_matches_closed_form",
                     1e-9 - worst);

    std::vector<double> energy = hamiltonian_energy(traj);
    double drift = 0.0;
    for (double e : energy) drift = std::max(drift, std::abs(e - energy[0]));
    ctx.expect_slack("continuous/hamiltonian_energy_conserved", 1e-9 - drift);
  }

  Rng rng(29);
  Vector x0 = rng.uniform_vector(3, -1.0, 1.0);

  auto make_mod = [&](double exponent, double scale, const TimeScale& ts,
                      double dt, double mu) {
    ContinuousRun cr;
    cr.kind = DynamicsKind::Mod;
    cr.h = HPower{exponent, scale};
    cr.map = MirrorMap::euclidean(mu);
    cr.objective = make_quadratic(3, 10.0);
    cr.ts = ts;
    cr.dt = dt;
    cr.T = 10.0;
    cr.z0 = mu * x0;
    return cr;
  };

  auto cf_drift = [](const Trajectory& traj) {
    std::vector<double> cf = conserved_cf(traj);
    double drift = 0.0;
    for (double v : cf) drift = std::max(drift, std::abs(v - cf[0]));
    return drift;
  };

  {
    Trajectory traj =
        integrate(make_mod(1.0, 1.0, TimeScale::polynomial(2.0), 1e-3, 1.0));
    double scale = std::max(1.0, std::abs(traj.f_x[0]));
    ctx.expect_slack("continuous/momentum_invariant_drift_poly",
                     1e-5 * scale - cf_drift(traj));
  }

  {
    Trajectory traj =
        integrate(make_mod(0.0, 1.0, TimeScale::exponential(0.5), 1e-3, 1.0));
    double scale = std::max(1.0, std::abs(traj.f_x[0]));
    std::vector<int> checkpoints;
    for (int j = 1; j <= 20; ++j) {
      checkpoints.push_back(j * (traj.samples() - 1) / 20);
    }
    std::vector<double> c = conserved_c(traj, checkpoints);
    double worst = 0.0;
    for (double v : c) worst = std::max(worst, std::abs(v));
    ctx.expect_slack("continuous/dual_history_invariant_stays_zero",
                     1e-4 * scale - worst);
  }

  {
    double coarse = cf_drift(
        integrate(make_mod(1.0, 1.0, TimeScale::polynomial(2.0), 0.02, 1.0)));
    double fine = cf_drift(
        integrate(make_mod(1.0, 1.0, TimeScale::polynomial(2.0), 0.01, 1.0)));
    double ratio = coarse / fine;
    ctx.expect_slack("continuous/halving_dt_cuts_drift_8x", ratio - 8.0);
  }

  {
    ContinuousRun mod = make_mod(1.0, 1.0, TimeScale::polynomial(2.0), 1e-3, 1.0);
    ContinuousRun ad = mod;
    ad.kind = DynamicsKind::Ad;
    Trajectory tm = integrate(mod);
    Trajectory ta = integrate(ad);
    double worst = 0.0;
    for (int i = 0; i < tm.samples(); ++i) {
      worst = std::max(worst, (tm.x[i] - ta.x[i]).lpNorm<Eigen::Infinity>());
      worst = std::max(worst, (tm.z[i] - ta.z[i]).lpNorm<Eigen::Infinity>());
    }
    ctx.expect_slack("continuous/averaged_flow_is_unit_momentum_flow",
                     1e-14 - worst);
  }

  {
    // Momentum flow with constant weight and exponential time scale follows
    // the damped oscillator x'' = -eta x' - (eta^2/mu) grad f(x).
    double eta = 0.7, mu = 2.0;
    ContinuousRun cr;
    cr.kind = DynamicsKind::Mod;
    cr.h = HPower{0.0, 1.0};
    cr.map = MirrorMap::euclidean(mu);
    cr.objective = make_quadratic(2, 4.0);
    cr.ts = TimeScale::exponential(eta);
    cr.dt = 1e-3;
    cr.T = 5.0;
    Vector w0 = rng.uniform_vector(2, -1.0, 1.0);
    cr.z0 = mu * w0;
    Trajectory traj = integrate(cr);

    Vector xr = w0;
    Vector ur = Vector::Zero(2);
    double dt = cr.dt;
    auto acc = [&](const Vector& x, const Vector& u) {
      return Vector(-eta * u - (eta * eta / mu) * cr.objective.gradient(x));
    };
    double worst = 0.0;
    for (int i = 0; i + 1 < traj.samples(); ++i) {
      Vector k1x = ur, k1u = acc(xr, ur);
      Vector k2x = ur + 0.5 * dt * k1u, k2u = acc(xr + 0.5 * dt * k1x, k2x);
      Vector k3x = ur + 0.5 * dt * k2u, k3u = acc(xr + 0.5 * dt * k2x, k3x);
      Vector k4x = ur + dt * k3u, k4u = acc(xr + dt * k3x, k4x);
      xr += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      ur += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      worst = std::max(worst, (traj.x[i + 1] - xr).lpNorm<Eigen::Infinity>());
    }
    ctx.expect_slack("continuous/exponential_flow_is_damped_oscillator",
                     1e-6 - worst);
  }

  {
    // Momentum flow with alpha = t^p, weight h = alpha^(2/p)/p, and map
    // modulus p follows the inertial ODE x'' + ((p+1)/t) x' + grad f(x) = 0.
    double p = 2.0;
    ContinuousRun cr;
    cr.kind = DynamicsKind::Mod;
    cr.h = HPower{2.0 / p, 1.0 / p};
    cr.map = MirrorMap::euclidean(p);
    cr.objective = make_quadratic(2, 4.0);
    cr.ts = TimeScale::polynomial(p, 0.0);
    cr.dt = 1e-3;
    cr.t0 = 1.0;
    cr.T = 5.0;
    Vector w0 = rng.uniform_vector(2, -1.0, 1.0);
    cr.z0 = p * w0;
    Trajectory traj = integrate(cr);

    Vector xr = w0;
    Vector ur = Vector::Zero(2);
    double dt = cr.dt;
    auto acc = [&](double t, const Vector& x, const Vector& u) {
      return Vector(-((p + 1.0) / t) * u - cr.objective.gradient(x));
    };
    double worst = 0.0;
    for (int i = 0; i + 1 < traj.samples(); ++i) {
      double t = traj.t[i];
      Vector k1x = ur, k1u = acc(t, xr, ur);
      Vector k2x = ur + 0.5 * dt * k1u,
             k2u = acc(t + 0.5 * dt, xr + 0.5 * dt * k1x, k2x);
      Vector k3x = ur + 0.5 * dt * k2u,
             k3u = acc(t + 0.5 * dt, xr + 0.5 * dt * k2x, k3x);
      Vector k4x = ur + dt * k3u, k4u = acc(t + dt, xr + dt * k3x, k4x);
      xr += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      ur += dt / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      worst = std::max(worst, (traj.x[i + 1] - xr).lpNorm<Eigen::Infinity>());
    }
    ctx.expect_slack("continuous/polynomial_flow_is_inertial_ode",
                     1e-6 - worst);
  }

  {
    ContinuousRun cr;
    cr.kind = DynamicsKind::Hd;
    cr.map = MirrorMap::euclidean(2.0);
    cr.objective = make_quadratic(3, 10.0);
    cr.dt = 1e-3;
    cr.T = 20.0;
    cr.z0 = Vector::Zero(3);
    cr.x0 = rng.uniform_vector(3, -1.0, 1.0);
    Trajectory traj = integrate(cr);
    AvgGradientReport rep = avg_gradient_bound_check(traj, 0.5, 0.0);
    ctx.report("continuous/averaged_gradient_bound", 1.01 - rep.max_ratio,
               rep.holds);
  }
}

void check_diagnostics(CheckContext& ctx) {
  Trace gmd_quad = run_quadratic(Method::Gmd, 1.0, 0.5, 300, true);
  Trace gmdb_quad = run_quadratic(Method::GmdB, 0.0, 0.25, 300, true);

  Rng rng(31);
  Vector u = rng.uniform_vector(5, -1.0, 1.0);
  Vector w = (u.array() - u.maxCoeff()).exp().matrix();
  ProblemInstance ent_prob = make_problem(
      make_quadratic(5, 20.0), MirrorMap::entropy_simplex(1.0), w / w.sum());
  RunConfig rc;
  rc.method = Method::GmdF;
  rc.iters = 120;
  rc.track_ck = true;
  rc.history_cap = 121;
  Trace gmdf_ent = run(rc, ent_prob);

  Vector dw0(2);
  dw0[0] = 1.3;
  dw0[1] = -1.1;
  ProblemInstance dw_prob =
      make_problem(make_nonconvex_2d(NonconvexKind::DoubleWell),
                   MirrorMap::euclidean(11.0), dw0);
  RunConfig dw_rc;
  dw_rc.method = Method::Gmd;
  dw_rc.lambda = 0.0;
  dw_rc.c = 0.5;
  dw_rc.iters = 300;
  dw_rc.track_ck = true;
  dw_rc.history_cap = 301;
  Trace dw_gmd = run(dw_rc, dw_prob);
  dw_rc.method = Method::GmdB;
  Trace dw_gmdb = run(dw_rc, dw_prob);

  {
    double worst = 0.0;
    for (const Trace* tr : {&gmd_quad, &gmdb_quad, &gmdf_ent}) {
      int k = std::min(100, tr->steps());
      worst = std::max(worst, std::abs(structural_identity_residual(*tr, k)) /
                                  problem_scale(*tr));
    }
    ctx.expect_slack("diagnostics/structural_identity", 1e-8 - worst);
  }

  {
    Trace tr = run_quadratic(Method::GmdF, 1.0, 1.0, 500, false);
    double scale = problem_scale(tr);
    double worst = -std::numeric_limits<double>::infinity();
    for (size_t k = 1; k < tr.c_f.size(); ++k) {
      worst = std::max(worst, tr.c_f[k] - tr.c_f[k - 1]);
    }
    for (size_t k = 1; k < gmdf_ent.c_f.size(); ++k) {
      worst = std::max(worst, gmdf_ent.c_f[k] - gmdf_ent.c_f[k - 1]);
    }
    ctx.expect_slack("diagnostics/run_invariant_never_increases",
                     1e-8 * scale - worst);
  }

  {
    int k = gmdf_ent.steps();
    double online = gmdf_ent.c_f[k];
    double recomputed =
        compute_ckf(gmdf_ent.objective, *gmdf_ent.map, *gmdf_ent.schedule,
                    gmdf_ent.y_hist[k], gmdf_ent.x_hist, gmdf_ent.z_hist[k]);
    ctx.expect_slack("diagnostics/run_invariant_recompute_agrees",
                     1e-8 * problem_scale(gmdf_ent) -
                         std::abs(online - recomputed));
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    double scale = 1.0;
    for (const Trace* tr : {&gmd_quad, &gmdb_quad, &dw_gmd, &dw_gmdb}) {
      scale = std::max(scale, problem_scale(*tr));
      for (int k = 1; k <= tr->steps(); ++k) {
        worst = std::min(worst, error_increment_bound_check(*tr, k).slack);
      }
    }
    ctx.expect_slack("diagnostics/increment_error_bounds", worst,
                     1e-8 * scale);
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 2; k <= gmd_quad.steps(); ++k) {
      worst =
          std::min(worst, extrapolation_distance_bound_check(gmd_quad, k).slack);
    }
    ctx.expect_slack("diagnostics/extrapolation_distance_bound", worst,
                     1e-10 * problem_scale(gmd_quad));
  }

  {
    double worst = std::numeric_limits<double>::infinity();
    for (int i : {10, 50, 100}) {
      worst = std::min(worst, bregman_gradient_lower_bound_check(gmd_quad, i)
                                  .slack);
    }
    ctx.expect_slack("diagnostics/bregman_gradient_lower_bound", worst,
                     1e-12 * problem_scale(gmd_quad));
  }

  {
    Rng prng(37);
    double worst = std::numeric_limits<double>::infinity();
    double at_min = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
      double a = prng.uniform(0.1, 3.0);
      double b = prng.uniform(0.1, 3.0);
      Vector delta = prng.uniform_vector(4, -2.0, 2.0);
      Vector z = prng.uniform_vector(4, -2.0, 2.0);
      worst = std::min(worst, shifted_quadratic_pair_gap(a, b, z, delta));
      Vector zmin = -(a / (a + b)) * delta;
      at_min = std::max(at_min,
                        std::abs(shifted_quadratic_pair_gap(a, b, zmin, delta)));
    }
    ctx.expect_slack("diagnostics/shifted_pair_gap_nonnegative", worst, 1e-12);
    ctx.expect_slack("diagnostics/shifted_pair_gap_zero_at_minimizer",
                     1e-12 - at_min);
  }

  {
    double worst = std::min(energy_budget_check(gmd_quad, 0.0, 300).slack,
                            energy_budget_check(gmdb_quad, 0.0, 300).slack);
    ctx.expect_slack("diagnostics/energy_budget_within_initial_gap", worst,
                     1e-8 * problem_scale(gmd_quad));
  }

  {
    Trace tr = run_quadratic(Method::GmdF, 0.0, 0.5, 500, false);
    AveragedBoundReport rep = averaged_bound_check(tr);
    ctx.report("diagnostics/averaged_iterate_explicit_bound", rep.worst_slack,
               rep.explicit_bound && rep.holds);
  }

  {
    std::vector<double> series(201, 0.0);
    for (int k = 1; k <= 200; ++k) {
      series[k] = 1.0 / (static_cast<double>(k) * k);
    }
    auto fit = fit_loglog(series, 20, 200);
    double err = fit ? std::abs(fit->slope + 2.0) : 1.0;
    ctx.expect_slack("diagnostics/loglog_fit_recovers_exponent", 0.02 - err);
  }
}

}  // namespace

int run_checks(const std::string& suite, std::ostream& os) {
  CheckContext ctx{os};
  bool all = suite == "all";
  bool matched = false;

  auto want = [&](const char* name) {
    bool hit = all || suite == name;
    matched = matched || hit;
    return hit;
  };

  if (want("spaces")) check_spaces(ctx);
  if (want("objectives")) check_objectives(ctx);
  if (want("schedules")) check_schedules(ctx);
  if (want("discrete")) check_discrete(ctx);
  if (want("continuous")) check_continuous(ctx);
  if (want("diagnostics")) check_diagnostics(ctx);

  if (!matched) {
    throw ConfigError("unknown check suite: " + suite +
                      " (expected spaces | objectives | schedules | discrete "
                      "| continuous | diagnostics | all)");
  }
  os << (ctx.failures == 0 ? "all checks passed\n"
                           : std::to_string(ctx.failures) + " check(s) failed\n");
  return ctx.failures;
}

}  // namespace gmom
