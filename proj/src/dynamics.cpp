#include "gmom/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gmom/errors.hpp"

namespace gmom {

TimeScale TimeScale::exponential(double eta) {
  if (!(eta > 0.0)) throw ConfigError("time scale: eta must be positive");
  TimeScale ts;
  ts.kind = Kind::Exponential;
  ts.eta = eta;
  return ts;
}

TimeScale TimeScale::polynomial(double power, double offset) {
  if (!(power > 0.0)) throw ConfigError("time scale: power must be positive");
  if (!(offset >= 0.0)) throw ConfigError("time scale: offset must be >= 0");
  TimeScale ts;
  ts.kind = Kind::Polynomial;
  ts.power = power;
  ts.offset = offset;
  return ts;
}

double TimeScale::alpha(double t) const {
  if (kind == Kind::Exponential) return std::exp(eta * t);
  return std::pow(offset + t, power);
}

double TimeScale::alpha_dot(double t) const {
  if (kind == Kind::Exponential) return eta * std::exp(eta * t);
  return power * std::pow(offset + t, power - 1.0);
}

namespace {

/** Composite quadrature weights over n uniform intervals: Simpson's rule,
 * with a 3/8 block absorbing an odd interval count (both fourth order, so
 * the quadrature error matches the integrator's). */
std::vector<double> quadrature_weights(int n, double dt) {
  std::vector<double> w(n + 1, 0.0);
  if (n == 0) return w;
  if (n == 1) {
    w[0] = w[1] = 0.5 * dt;
    return w;
  }
  int even_end = (n % 2 == 0) ? n : n - 3;
  if (even_end >= 2) {
    w[0] += dt / 3.0;
    w[even_end] += dt / 3.0;
    for (int i = 1; i < even_end; ++i) {
      w[i] += (i % 2 == 1 ? 4.0 : 2.0) * dt / 3.0;
    }
  }
  if (n % 2 == 1) {
    double c = 3.0 * dt / 8.0;
    w[n - 3] += c;
    w[n - 2] += 3.0 * c;
    w[n - 1] += 3.0 * c;
    w[n] += c;
  }
  return w;
}

}  // namespace

Trajectory integrate(const ContinuousRun& run) {
  if (!(run.dt > 0.0)) throw ConfigError("integrate: dt must be positive");
  if (!(run.T >= run.dt)) throw ConfigError("integrate: T must be >= dt");
  const int d = static_cast<int>(run.z0.size());
  if (run.objective.dim != d) {
    throw ConfigError("integrate: z0 dimension does not match objective");
  }
  if (!(run.ts.alpha(run.t0) > 0.0)) {
    throw ConfigError("integrate: time scale must be positive at the start");
  }

  const HPower h = run.kind == DynamicsKind::Ad ? HPower{1.0, 1.0} : run.h;
  const MirrorMap& map = run.map;
  const Objective& f = run.objective;
  const TimeScale& ts = run.ts;
  const DynamicsKind kind = run.kind;

  // Flat state layout: [x | z | int_f_dh | int_inner | int_beta_f | int_grad].
  const int nstate = 3 * d + 3;
  Vector state = Vector::Zero(nstate);
  state.segment(0, d) = run.x0 ? *run.x0 : map.conjugate_grad(run.z0);
  state.segment(d, d) = run.z0;

  double f_at_sample = 0.0;
  auto rhs = [&](double t, const Vector& s, bool capture_f) -> Vector {
    Vector xs = s.segment(0, d);
    Vector zs = s.segment(d, d);
    Vector v = map.conjugate_grad(zs);
    Vector g = f.gradient(xs);
    double fx = f.value(xs);
    if (capture_f) f_at_sample = fx;

    Vector ds = Vector::Zero(nstate);
    if (kind == DynamicsKind::Hd) {
      ds.segment(0, d) = v;
      ds.segment(d, d) = -g;
    } else {
      double alpha = ts.alpha(t);
      double alpha_dot = ts.alpha_dot(t);
      double rate = alpha_dot / alpha;
      double hval = h.scale * std::pow(alpha, h.exponent);
      double hslope = h.scale * h.exponent * std::pow(alpha, h.exponent - 1.0);
      double beta_dot =
          h.scale * (1.0 + h.exponent) * std::pow(alpha, h.exponent) * alpha_dot;
      ds.segment(0, d) = rate * (v - xs);
      ds.segment(d, d) = -hval * rate * g;
      ds[2 * d] = fx * hslope * alpha_dot;
      ds[2 * d + 1] = hval * rate * g.dot(xs);
      ds[2 * d + 2] = beta_dot * fx;
    }
    ds.segment(2 * d + 3, d) = g;
    return ds;
  };

  const int steps = static_cast<int>(std::llround(run.T / run.dt));
  const double dt = run.dt;

  Trajectory traj;
  traj.kind = kind;
  traj.h = h;
  traj.map = map;
  traj.objective = f;
  traj.ts = ts;
  traj.dt = dt;
  traj.t.reserve(steps + 1);

  auto push_sample = [&](double t, const Vector& s, double fx) {
    traj.t.push_back(t);
    traj.x.push_back(s.segment(0, d));
    traj.z.push_back(s.segment(d, d));
    traj.f_x.push_back(fx);
    traj.int_f_dh.push_back(s[2 * d]);
    traj.int_inner.push_back(s[2 * d + 1]);
    traj.int_beta_f.push_back(s[2 * d + 2]);
    traj.int_grad.push_back(s.segment(2 * d + 3, d));
  };

  for (int i = 0; i < steps; ++i) {
    double t = run.t0 + i * dt;
    try {
      Vector k1 = rhs(t, state, true);
      push_sample(t, state, f_at_sample);
      Vector k2 = rhs(t + 0.5 * dt, state + 0.5 * dt * k1, false);
      Vector k3 = rhs(t + 0.5 * dt, state + 0.5 * dt * k2, false);
      Vector k4 = rhs(t + dt, state + dt * k3, false);
      state += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const ConfigError&) {
      state.setConstant(std::numeric_limits<double>::quiet_NaN());
    }
    if (!state.allFinite()) {
      Vector last_x = traj.x.empty() ? Vector::Zero(d) : traj.x.back();
      double last_f = traj.f_x.empty() ? 0.0 : traj.f_x.back();
      throw DivergenceError(
          "integration diverged at t = " + std::to_string(t + dt), i + 1,
          last_x, last_f);
    }
  }
  double t_end = run.t0 + steps * dt;
  push_sample(t_end, state, f.value(state.segment(0, d)));
  return traj;
}

std::vector<double> conserved_cf(const Trajectory& traj) {
  if (traj.kind == DynamicsKind::Hd) {
    throw ConfigError("conserved_cf applies to the time-rescaled dynamics; "
                      "use hamiltonian_energy for hd");
  }
  const MirrorMap& map = *traj.map;
  std::vector<double> out(traj.samples());
  for (int i = 0; i < traj.samples(); ++i) {
    double hval =
        traj.h.scale * std::pow(traj.ts.alpha(traj.t[i]), traj.h.exponent);
    out[i] = hval * traj.f_x[i] - traj.int_f_dh[i] + traj.int_inner[i] +
             map.conjugate_value(traj.z[i]);
  }
  return out;
}

std::vector<double> hamiltonian_energy(const Trajectory& traj) {
  const MirrorMap& map = *traj.map;
  std::vector<double> out(traj.samples());
  for (int i = 0; i < traj.samples(); ++i) {
    out[i] = traj.f_x[i] + map.conjugate_value(traj.z[i]);
  }
  return out;
}

std::vector<double> conserved_c(const Trajectory& traj,
                                const std::vector<int>& checkpoints) {
  if (traj.kind == DynamicsKind::Hd) {
    throw ConfigError("conserved_c applies to the time-rescaled dynamics");
  }
  const MirrorMap& map = *traj.map;
  auto beta = [&](double t) {
    return traj.h.scale * std::pow(traj.ts.alpha(t), 1.0 + traj.h.exponent);
  };
  const double alpha0 = traj.ts.alpha(traj.t[0]);
  const double beta0_f0 = beta(traj.t[0]) * traj.f_x[0];

  std::vector<double> out;
  out.reserve(checkpoints.size());
  for (int idx : checkpoints) {
    if (idx < 0 || idx >= traj.samples()) {
      throw ConfigError("conserved_c: checkpoint index out of range");
    }
    double value = beta(traj.t[idx]) * traj.f_x[idx] - beta0_f0 -
                   traj.int_beta_f[idx] +
                   alpha0 * map.bregman_dual(traj.z[idx], traj.z[0]);
    std::vector<double> w = quadrature_weights(idx, traj.dt);
    double inner = 0.0;
    for (int j = 0; j <= idx; ++j) {
      inner += w[j] * map.bregman_dual(traj.z[idx], traj.z[j]) *
               traj.ts.alpha_dot(traj.t[j]);
    }
    out.push_back(value + inner);
  }
  return out;
}

AvgGradientReport avg_gradient_bound_check(const Trajectory& traj,
                                           double mu_star, double f_opt,
                                           double tol) {
  if (traj.kind != DynamicsKind::Hd) {
    throw ConfigError("avg_gradient_bound_check requires the hd dynamics");
  }
  if (!(mu_star > 0.0)) {
    throw ConfigError("avg_gradient_bound_check: mu_star must be positive");
  }
  const MirrorMap& map = *traj.map;
  const Vector& z0 = traj.z[0];
  if (z0.lpNorm<Eigen::Infinity>() > 1e-14) {
    throw ConfigError("avg_gradient_bound_check requires z0 = 0");
  }
  if (std::abs(map.conjugate_value(Vector::Zero(z0.size()))) > 1e-14) {
    throw ConfigError("avg_gradient_bound_check requires psi*(0) = 0");
  }
  AvgGradientReport rep;
  rep.bound = std::sqrt(2.0 * std::max(0.0, traj.f_x[0] - f_opt) / mu_star);
  for (int i = 1; i < traj.samples(); ++i) {
    double zn = map.dual_norm(traj.z[i]);
    double ratio = rep.bound > 0.0
                       ? zn / rep.bound
                       : (zn == 0.0 ? 0.0
                                    : std::numeric_limits<double>::infinity());
    rep.max_ratio = std::max(rep.max_ratio, ratio);
  }
  rep.holds = rep.max_ratio <= 1.0 + tol;
  return rep;
}

}  // namespace gmom
