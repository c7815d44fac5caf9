#include "gmom/methods.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gmom/errors.hpp"

namespace gmom {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_finite_step(const Vector& v, const char* what, int k,
                         const IterateState& prev,
                         const ProblemInstance& problem) {
  if (!v.allFinite()) {
    throw DivergenceError(std::string("iteration ") + std::to_string(k) +
                              ": non-finite " + what,
                          k, prev.x, problem.objective.value(prev.x));
  }
}

void require_in_box(const Vector& x, int k, const IterateState& prev,
                    const ProblemInstance& problem) {
  if (!problem.objective.in_box(x)) {
    throw DivergenceError(
        std::string("iteration ") + std::to_string(k) +
            ": iterate left the objective's documented box, the smoothness "
            "constant no longer applies",
        k, prev.x, problem.objective.value(prev.x));
  }
}

/** Unit-norm steepest-ascent direction for <g, .> under the p-norm, the
 * closed form used by the gradient-step corrector: components
 * sign(g_i)|g_i|^(q-1) scaled to unit p-norm, q the dual exponent. */
Vector pnorm_ascent_direction(const Vector& g, double p) {
  double q = dual_exponent(p);
  double gq = lp_norm(g, q);
  if (gq == 0.0) return Vector::Zero(g.size());
  Vector d(g.size());
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    d[i] = std::copysign(std::pow(std::abs(g[i]) / gq, q - 1.0), g[i]);
  }
  return d;
}

// Dual-history conserved quantity at index k (same formula as the
// diagnostics module; duplicated here so the run loop can fill the optional
// C/E columns without a circular dependency).
double ck_from_history(const MirrorMap& map, const Schedule& s,
                       const std::vector<double>& f_y,
                       const std::vector<Vector>& z_hist, int k) {
  if (!std::isfinite(s.B[k])) return kNaN;
  double acc = s.B[k] * f_y[k];
  for (int i = 0; i <= k; ++i) {
    acc -= s.b[i] * f_y[i];
    acc += s.a[i] * map.bregman_dual(z_hist[k], z_hist[i]);
  }
  return acc;
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::GmdF:
      return "gmd_f";
    case Method::Gmd:
      return "gmd";
    case Method::GmdB:
      return "gmd_b";
    case Method::Baseline:
      return "baseline_gd";
  }
  return "unknown";
}

ProblemInstance make_problem(Objective objective, MirrorMap mirror,
                             Vector x0) {
  if (objective.dim != static_cast<int>(x0.size())) {
    throw ConfigError("make_problem: x0 dimension does not match objective");
  }
  Vector z0 = mirror.primal_to_dual(x0);
  Vector back = mirror.conjugate_grad(z0);
  if ((back - x0).lpNorm<Eigen::Infinity>() >
      1e-12 * (1.0 + x0.lpNorm<Eigen::Infinity>())) {
    throw ConfigError(
        "make_problem: x0 is not reproduced by the conjugate gradient of its "
        "dual point; pick a starting point in the map's domain interior");
  }
  return ProblemInstance{std::move(objective), std::move(mirror),
                         std::move(x0), std::move(z0)};
}

IterateState init_state(const ProblemInstance& problem, const Schedule& s) {
  IterateState st;
  st.k = 0;
  st.x = problem.x0;
  st.y = problem.x0;
  st.z = problem.z0;
  st.v = problem.mirror.conjugate_grad(problem.z0);
  st.dual_avg = st.v;
  st.xhat_num = Vector::Zero(problem.x0.size());
  st.xhat_den = s.H[0];
  st.last_gradient = Vector::Zero(problem.x0.size());
  return st;
}

static void advance(IterateState& s, const Schedule& sch,
                    const ProblemInstance& problem, Method method) {
  const int k = s.k + 1;
  if (k > sch.k_max) throw ConfigError("step: schedule does not cover index");
  const double theta = sch.ratio(k);

  // All mixing weights are ratios (A[k-1]/A[k] = 1 - theta exactly), so the
  // stepper stays finite even when the raw geometric coefficients of a
  // lambda = 0 schedule saturate the double range.
  Vector x;
  switch (method) {
    case Method::GmdF: {
      double rho = sch.H[k - 1] / sch.H[k];
      x = (rho * s.y + theta * s.v) / (rho + theta);
      break;
    }
    case Method::Gmd:
      x = (1.0 - theta) * s.y + theta * s.v;
      break;
    case Method::GmdB:
      x = s.y + theta * (s.v - s.dual_avg);
      break;
    default:
      throw ConfigError("step: unsupported method");
  }
  require_finite_step(x, "extrapolated point x", k, s, problem);
  require_in_box(x, k, s, problem);

  Vector g = problem.objective.gradient(x);
  require_finite_step(g, "gradient", k, s, problem);

  Vector z = s.z - sch.H[k] * theta * g;
  require_finite_step(z, "dual iterate z", k, s, problem);
  Vector v_new = problem.mirror.conjugate_grad(z);

  Vector y;
  if (method == Method::GmdB) {
    const double L = problem.objective.smoothness;
    NormedSpace space = problem.mirror.space();
    if (space.kind == NormKind::L2) {
      y = x - g / L;
    } else {
      double gdual = problem.mirror.dual_norm(g);
      y = x - (gdual / L) * pnorm_ascent_direction(g, space.p);
    }
  } else {
    y = x + theta * (v_new - s.v);
  }
  require_finite_step(y, "corrected point y", k, s, problem);
  require_in_box(y, k, s, problem);

  s.xhat_num += (theta * sch.H[k] - sch.h[k]) * x;
  s.xhat_den += theta * sch.H[k];
  s.dual_avg = (1.0 - theta) * s.dual_avg + theta * v_new;
  s.x = std::move(x);
  s.y = std::move(y);
  s.z = std::move(z);
  s.v = std::move(v_new);
  s.last_gradient = std::move(g);
  s.k = k;
}

void gmd_f_step(IterateState& s, const Schedule& sch,
                const ProblemInstance& p) {
  advance(s, sch, p, Method::GmdF);
}

void gmd_step(IterateState& s, const Schedule& sch, const ProblemInstance& p) {
  advance(s, sch, p, Method::Gmd);
}

void gmd_b_step(IterateState& s, const Schedule& sch,
                const ProblemInstance& p) {
  advance(s, sch, p, Method::GmdB);
}

Vector averaged_iterate(const IterateState& s, const Schedule& sch) {
  return (sch.H[s.k] * s.y + s.xhat_num) / s.xhat_den;
}

void validate_method_geometry(Method method, const MirrorMap& map) {
  if (method == Method::GmdB) {
    NormKind kind = map.space().kind;
    if (kind == NormKind::L1 || kind == NormKind::LInf) {
      throw UnsupportedGeometryError(
          "gmd_b needs a norm with a unique closed-form steepest-descent "
          "direction; the l1/max-norm geometry of " +
          std::string(geometry_name(map.geometry())) + " is not supported");
    }
  }
  if ((method == Method::Gmd || method == Method::GmdB) &&
      !map.unconstrained()) {
    throw ConfigError(std::string(method_name(method)) +
                      " requires an unconstrained mirror map (X ≡ E)");
  }
}

Trace run(const RunConfig& config, const ProblemInstance& problem) {
  if (config.method == Method::Baseline) {
    throw ConfigError("run: the gradient-descent baseline lives in the "
                      "harness (baseline_gd), not the momentum stepper");
  }
  validate_method_geometry(config.method, problem.mirror);
  if (config.method == Method::GmdF && config.lambda > 1.0) {
    throw ConfigError("gmd_f carries averaged-iterate guarantees only for "
                      "lambda in [0, 1]");
  }
  if (config.iters < 0) throw ConfigError("run: iteration budget must be >= 0");
  if (config.history_cap < 0) {
    throw ConfigError("run: history cap must be >= 0");
  }

  const Objective& f = problem.objective;
  const MirrorMap& map = problem.mirror;
  ScheduleParams sp;
  sp.lambda = config.lambda;
  sp.c = config.c;
  sp.mu = map.modulus();
  sp.L = f.smoothness;
  Schedule sch = build_schedule(sp, config.iters);

  IterateState st = init_state(problem, sch);

  Trace tr;
  tr.method = config.method;
  tr.schedule = sch;
  tr.map = map;
  tr.objective = f;
  tr.x0 = problem.x0;
  tr.history_cap = config.history_cap;
  tr.ck_tracked = config.track_ck;

  const int n = config.iters;
  tr.f_y.reserve(n + 1);
  tr.f_x.reserve(n + 1);
  tr.grad_dual.reserve(n + 1);
  tr.min_grad_sq.reserve(n + 1);
  tr.gap.reserve(n + 1);
  tr.c_f.reserve(n + 1);

  const bool has_opt = f.optimum_value.has_value();
  const double f_opt = has_opt ? *f.optimum_value : 0.0;

  double f0 = f.value(st.x);
  Vector g0 = f.gradient(st.x);
  if (!std::isfinite(f0) || !g0.allFinite()) {
    throw DivergenceError("iteration 0: non-finite objective at x0", 0, st.x,
                          f0);
  }
  double g0n = map.dual_norm(g0);

  // Online accumulators for the dual-averaging conserved quantity:
  // sum_h_fx = sum h_i f(x_i), sum_inner = sum H_i (a_i/A_i) <g_i, x_i>.
  double sum_h_fx = 0.0;
  double sum_inner = 0.0;

  auto record = [&](int k, double fy, double fx, double gnorm,
                    const Vector& xhat) {
    tr.f_y.push_back(fy);
    tr.f_x.push_back(fx);
    tr.grad_dual.push_back(gnorm);
    double gsq = gnorm * gnorm;
    tr.min_grad_sq.push_back(
        k == 0 ? gsq : std::min(tr.min_grad_sq.back(), gsq));
    if (has_opt) {
      double ref = config.method == Method::GmdF ? f.value(xhat) : fy;
      tr.gap.push_back(ref - f_opt);
    } else {
      tr.gap.push_back(kNaN);
    }
    tr.c_f.push_back(sch.H[k] * fy - sum_h_fx + sum_inner +
                     map.conjugate_value(st.z));
    if (k <= config.history_cap) {
      tr.x_hist.push_back(st.x);
      tr.y_hist.push_back(st.y);
      tr.z_hist.push_back(st.z);
    }
    if (config.track_ck) {
      if (k <= config.history_cap) {
        // O(k) per index; opt-in cost documented in RunConfig.
        double ck = ck_from_history(map, sch, tr.f_y, tr.z_hist, k);
        tr.e.push_back(k == 0 ? kNaN : ck - tr.c.back());
        tr.c.push_back(ck);
      } else {
        tr.ck_truncated = true;
      }
    }
  };

  record(0, f0, f0, g0n, st.x);

  for (int k = 1; k <= n; ++k) {
    advance(st, sch, problem, config.method);
    double fx = f.value(st.x);
    double fy = f.value(st.y);
    if (!std::isfinite(fx) || !std::isfinite(fy)) {
      throw DivergenceError(
          "iteration " + std::to_string(k) + ": non-finite objective value",
          k, st.x, fx);
    }
    sum_h_fx += sch.h[k] * fx;
    sum_inner += sch.H[k] * sch.ratio(k) * st.last_gradient.dot(st.x);
    double gnorm = map.dual_norm(st.last_gradient);
    Vector xhat = config.method == Method::GmdF && has_opt
                      ? averaged_iterate(st, sch)
                      : st.y;
    record(k, fy, fx, gnorm, xhat);
  }

  tr.x = st.x;
  tr.y = st.y;
  tr.z = st.z;
  tr.xhat = averaged_iterate(st, sch);
  return tr;
}

Vector averaged_iterate(const Trace& tr, int k) {
  if (!tr.schedule || !tr.has_history(k)) {
    throw ConfigError("averaged_iterate: index beyond the stored history");
  }
  const Schedule& sch = *tr.schedule;
  Vector num = sch.H[k] * tr.y_hist[k];
  double den = sch.H[0];
  for (int i = 1; i <= k; ++i) {
    double w = sch.ratio(i) * sch.H[i];
    num += (w - sch.h[i]) * tr.x_hist[i];
    den += w;
  }
  return num / den;
}

}  // namespace gmom
