#include "gmom/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gmom/errors.hpp"

namespace gmom {

namespace {

const Schedule& schedule_of(const Trace& tr, const char* op) {
  if (!tr.schedule) {
    throw ConfigError(std::string(op) + ": trace carries no schedule");
  }
  return *tr.schedule;
}

const MirrorMap& map_of(const Trace& tr, const char* op) {
  if (!tr.map) {
    throw ConfigError(std::string(op) + ": trace carries no mirror map");
  }
  return *tr.map;
}

void require_history(const Trace& tr, int k, const char* op) {
  if (k < 0 || !tr.has_history(k)) {
    throw ConfigError(std::string(op) +
                      ": index outside the stored iterate history");
  }
}

/** The dual-history diagnostics weight by raw B values, which a geometric
 * (lambda = 0) schedule pushes past the double range after a few hundred
 * indices; reject those indices instead of returning NaN arithmetic. */
void require_finite_weights(const Schedule& s, int k, const char* op) {
  if (!std::isfinite(s.B[k])) {
    throw ConfigError(std::string(op) +
                      ": index beyond the finite range of the geometric "
                      "schedule coefficients");
  }
}

/** G_i = sum_{j=0..i} a_j D(z_i, z_j) for i = 0..k. */
std::vector<double> bregman_sums(const MirrorMap& map, const Schedule& s,
                                 const std::vector<Vector>& z_hist, int k) {
  std::vector<double> G(k + 1, 0.0);
  for (int i = 0; i <= k; ++i) {
    double acc = 0.0;
    for (int j = 0; j <= i; ++j) {
      acc += s.a[j] * map.bregman_dual(z_hist[i], z_hist[j]);
    }
    G[i] = acc;
  }
  return G;
}

}  // namespace

double problem_scale(const Trace& tr) {
  double f0 = tr.f_y.empty() ? 0.0 : tr.f_y[0];
  double s = std::max(1.0, std::abs(f0));
  if (tr.objective.optimum_value) {
    s = std::max(s, f0 - *tr.objective.optimum_value);
  }
  return s;
}

double compute_ckf(const Objective& f, const MirrorMap& map, const Schedule& s,
                   const Vector& y_k, const std::vector<Vector>& x_hist,
                   const Vector& z_k) {
  const int k = static_cast<int>(x_hist.size()) - 1;
  if (k < 0 || k > s.k_max) throw ConfigError("compute_ckf: bad history length");
  double acc = s.H[k] * f.value(y_k) + map.conjugate_value(z_k);
  for (int i = 1; i <= k; ++i) {
    acc -= s.h[i] * f.value(x_hist[i]);
    acc += s.H[i] * s.ratio(i) * f.gradient(x_hist[i]).dot(x_hist[i]);
  }
  return acc;
}

double compute_ck(const MirrorMap& map, const Schedule& s,
                  const std::vector<double>& f_y,
                  const std::vector<Vector>& z_hist, int k) {
  if (k < 0 || k > s.k_max || k >= static_cast<int>(z_hist.size()) ||
      k >= static_cast<int>(f_y.size())) {
    throw ConfigError("compute_ck: index outside the stored history");
  }
  require_finite_weights(s, k, "compute_ck");
  double acc = s.B[k] * f_y[k];
  for (int i = 0; i <= k; ++i) {
    acc -= s.b[i] * f_y[i];
    acc += s.a[i] * map.bregman_dual(z_hist[k], z_hist[i]);
  }
  return acc;
}

double compute_ek(const MirrorMap& map, const Schedule& s,
                  const std::vector<double>& f_y,
                  const std::vector<Vector>& z_hist, int k) {
  if (k < 1) throw ConfigError("compute_ek: k must be >= 1");
  return compute_ck(map, s, f_y, z_hist, k) -
         compute_ck(map, s, f_y, z_hist, k - 1);
}

double structural_identity_residual(const Trace& tr, int k) {
  const Schedule& s = schedule_of(tr, "structural_identity_residual");
  const MirrorMap& map = map_of(tr, "structural_identity_residual");
  require_history(tr, k, "structural_identity_residual");
  require_finite_weights(s, k, "structural_identity_residual");

  std::vector<double> G = bregman_sums(map, s, tr.z_hist, k);
  // C_i assembled from the shared G_i so the identity check costs one pass.
  std::vector<double> C(k + 1), E(std::max(k + 1, 1));
  double bsum = 0.0;
  for (int i = 0; i <= k; ++i) {
    bsum += s.b[i] * tr.f_y[i];
    C[i] = s.B[i] * tr.f_y[i] - bsum + G[i];
    if (i >= 1) E[i] = C[i] - C[i - 1];
  }

  double lhs = bsum / s.B[k];
  double rhs = tr.f_y[0];
  for (int i = 1; i <= k; ++i) {
    rhs -= (1.0 / s.B[i - 1] - 1.0 / s.B[i]) * G[i];
    rhs += (1.0 / s.B[i - 1] - 1.0 / s.B[k]) * E[i];
  }
  return lhs - rhs;
}

CheckReport error_increment_bound_check(const Trace& tr, int k) {
  const Schedule& s = schedule_of(tr, "error_increment_bound_check");
  const MirrorMap& map = map_of(tr, "error_increment_bound_check");
  if (k < 1) throw ConfigError("error_increment_bound_check: k must be >= 1");
  require_history(tr, k, "error_increment_bound_check");

  // Both sides of the bound carry a factor B_{k-1}, which grows geometrically
  // for lambda = 0; compare E_k/B_{k-1} instead. Telescoping C_k - C_{k-1}
  // gives the cancellation-free closed form
  //   E_k/B_{k-1} = f(y_k) - f(y_{k-1})
  //     + (1/H_k) [psi*(z_k) - psi*(z_{k-1}) - <avg_{k-1}, z_k - z_{k-1}>],
  // with avg_i = (1/A_i) sum_{j<=i} a_j grad psi*(z_j), since
  // A_{k-1}/B_{k-1} = 1/H_k. The small differences are formed first, so the
  // value stays accurate where raw B-weighted sums would lose every digit.
  Vector avg = map.conjugate_grad(tr.z_hist[0]);
  for (int i = 1; i <= k - 1; ++i) {
    double theta = s.ratio(i);
    avg = (1.0 - theta) * avg + theta * map.conjugate_grad(tr.z_hist[i]);
  }
  double inv_h = 1.0 / s.H[k];
  double ek = tr.f_y[k] - tr.f_y[k - 1] +
              inv_h * (map.conjugate_value(tr.z_hist[k]) -
                       map.conjugate_value(tr.z_hist[k - 1]) -
                       avg.dot(tr.z_hist[k] - tr.z_hist[k - 1]));

  const double c = s.params.c;
  const double eps_h = tr.objective.weak_convexity;
  const double L = tr.objective.smoothness;
  double step_sq = map.primal_norm(tr.x_hist[k] - tr.y_hist[k - 1]);
  step_sq *= step_sq;

  double rhs;
  if (tr.method == Method::GmdB) {
    double gsq = tr.grad_dual[k] * tr.grad_dual[k];
    rhs = -(1.0 - c) / (2.0 * L) * gsq;
  } else {
    rhs = -(1.0 - c) * inv_h *
          map.bregman_dual(tr.z_hist[k - 1], tr.z_hist[k]);
  }
  rhs += 0.5 * eps_h * step_sq;

  return {ek, rhs, rhs - ek};
}

CheckReport extrapolation_distance_bound_check(const Trace& tr, int k) {
  if (tr.method != Method::Gmd) {
    throw ConfigError("extrapolation_distance_bound_check applies to gmd runs "
                      "(the corrector average identity drives the bound)");
  }
  const Schedule& s = schedule_of(tr, "extrapolation_distance_bound_check");
  const MirrorMap& map = map_of(tr, "extrapolation_distance_bound_check");
  if (k < 1) {
    throw ConfigError("extrapolation_distance_bound_check: k must be >= 1");
  }
  require_history(tr, k, "extrapolation_distance_bound_check");
  require_finite_weights(s, k, "extrapolation_distance_bound_check");

  double dist = map.primal_norm(tr.x_hist[k] - tr.y_hist[k - 1]);
  double lhs = 0.5 * dist * dist;
  double sum = 0.0;
  for (int i = 0; i <= k - 2; ++i) {
    sum += s.a[i] * map.bregman_dual(tr.z_hist[k - 1], tr.z_hist[i]);
  }
  double rhs = (1.0 / map.modulus()) *
               (s.a[k] * s.a[k] / (s.A[k] * s.A[k] * s.A[k - 1])) * sum;
  return {lhs, rhs, rhs - lhs};
}

CheckReport bregman_gradient_lower_bound_check(const Trace& tr, int i) {
  const Schedule& s = schedule_of(tr, "bregman_gradient_lower_bound_check");
  const MirrorMap& map = map_of(tr, "bregman_gradient_lower_bound_check");
  if (map.geometry() != Geometry::Euclidean) {
    throw ConfigError("bregman_gradient_lower_bound_check requires the "
                      "unconstrained Euclidean map");
  }
  if (i < 1) {
    throw ConfigError("bregman_gradient_lower_bound_check: i must be >= 1");
  }
  require_history(tr, i, "bregman_gradient_lower_bound_check");
  require_finite_weights(s, i, "bregman_gradient_lower_bound_check");

  double lhs = 0.0;
  for (int j = 0; j <= i; ++j) {
    lhs += s.a[j] * map.bregman_dual(tr.z_hist[i], tr.z_hist[j]);
  }

  auto gsq = [&](int j) { return tr.grad_dual[j] * tr.grad_dual[j]; };
  double ratio_i = s.ratio(i);
  double nu_ii = ratio_i * ratio_i * s.H[i] * s.H[i] *
                 (0.5 * s.a[i] + s.a[i] * s.a[i - 1] / (s.a[i] + s.a[i - 1]));
  double rhs = nu_ii * gsq(i);
  for (int j = 1; j <= i - 1; ++j) {
    double nu = (s.a[j - 1] * std::pow(s.a[j], 3) / (s.a[j - 1] + s.a[j])) *
                (s.H[j] * s.H[j]) / (s.A[j] * s.A[j]);
    rhs += nu * gsq(j);
  }
  rhs /= 2.0 * map.mu();

  return {lhs, rhs, lhs - rhs};
}

double shifted_quadratic_pair_gap(double a, double b, const Vector& z,
                                  const Vector& delta) {
  if (!(a > 0.0 && b > 0.0)) {
    throw ConfigError("shifted_quadratic_pair_gap: a and b must be positive");
  }
  return a * (z + delta).squaredNorm() + b * z.squaredNorm() -
         a * b / (a + b) * delta.squaredNorm();
}

CheckReport energy_budget_check(const Trace& tr, double c_prime, int k) {
  const Schedule& s = schedule_of(tr, "energy_budget_check");
  const MirrorMap& map = map_of(tr, "energy_budget_check");
  if (!tr.objective.optimum_value) {
    throw ConfigError("energy_budget_check needs a known optimum value");
  }
  if (k < 1) throw ConfigError("energy_budget_check: k must be >= 1");
  require_history(tr, k, "energy_budget_check");
  require_finite_weights(s, k, "energy_budget_check");

  const double c = s.params.c;
  const double L = tr.objective.smoothness;
  std::vector<double> G = bregman_sums(map, s, tr.z_hist, k);

  double lhs = 0.0;
  for (int i = 1; i <= k; ++i) {
    lhs += c_prime * (1.0 / s.B[i - 1] - 1.0 / s.B[i]) * G[i];
    lhs += c * (1.0 - c) / (2.0 * L) * (1.0 - s.B[i - 1] / s.B[k]) *
           tr.grad_dual[i] * tr.grad_dual[i];
  }
  double rhs = tr.f_y[0] - *tr.objective.optimum_value;
  return {lhs, rhs, rhs - lhs};
}

std::optional<RateFit> fit_loglog(const std::vector<double>& values, int k_lo,
                                  int k_hi) {
  k_lo = std::max(k_lo, 1);
  k_hi = std::min<int>(k_hi, static_cast<int>(values.size()) - 1);
  std::vector<double> xs, ys;
  for (int k = k_lo; k <= k_hi; ++k) {
    double v = values[k];
    if (std::isfinite(v) && v > 0.0) {
      xs.push_back(std::log(static_cast<double>(k)));
      ys.push_back(std::log(v));
    }
  }
  if (xs.size() < 2) return std::nullopt;

  double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.points = static_cast<int>(xs.size());
  double intercept = (sy - fit.slope * sx) / n;
  double rss = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double r = ys[i] - (intercept + fit.slope * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / n);
  return fit;
}

std::optional<RateFit> fit_rate(const Trace& tr, TraceColumn column,
                                double tail_fraction) {
  const std::vector<double>& vals =
      column == TraceColumn::Gap ? tr.gap : tr.min_grad_sq;
  int n = tr.steps();
  int k_lo = std::max(
      1, n - static_cast<int>(std::floor(tail_fraction * n)) + 1);
  return fit_loglog(vals, k_lo, n);
}

AveragedBoundReport averaged_bound_check(const Trace& tr) {
  const Schedule& s = schedule_of(tr, "averaged_bound_check");
  const MirrorMap& map = map_of(tr, "averaged_bound_check");
  if (tr.method != Method::GmdF) {
    throw ConfigError("averaged_bound_check applies to gmd_f runs (the gap "
                      "column must track the averaged iterate)");
  }
  if (!tr.objective.optimum_value || !tr.objective.optimum_point) {
    throw ConfigError("averaged_bound_check needs a known optimum");
  }
  const double lambda = s.params.lambda;
  const int n = tr.steps();
  AveragedBoundReport rep;

  if (lambda == 0.0) {
    rep.explicit_bound = true;
    double gap0 = tr.f_y[0] - *tr.objective.optimum_value;
    double numer =
        gap0 + map.bregman_primal(*tr.objective.optimum_point, tr.x0);
    double root = std::sqrt(s.params.c * s.params.mu / s.params.L);
    double worst = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= n; ++k) {
      double bound = numer / (1.0 + root * k);
      worst = std::min(worst, bound - tr.gap[k]);
    }
    rep.worst_slack = worst;
    rep.holds = worst >= -1e-9 * problem_scale(tr);
    return rep;
  }

  std::vector<double> k2gap(n + 1,
                            std::numeric_limits<double>::quiet_NaN());
  double worst_k = 0.0;
  for (int k = std::max(1, n / 2); k <= n; ++k) {
    k2gap[k] = static_cast<double>(k) * k * tr.gap[k];
    worst_k = std::max(worst_k, k2gap[k]);
  }
  rep.k2_constant = worst_k;
  auto fit = fit_loglog(k2gap, std::max(1, n / 2), n);
  rep.k2_slope = fit ? fit->slope : 0.0;
  rep.holds = rep.k2_slope <= 0.1;
  return rep;
}

}  // namespace gmom
