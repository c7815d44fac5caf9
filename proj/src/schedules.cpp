#include "gmom/schedules.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gmom {

namespace {

void validate_params(const ScheduleParams& p) {
  if (!(p.lambda >= 0.0 && p.lambda <= 2.0)) {
    throw ConfigError("schedule: lambda must lie in [0, 2]");
  }
  if (!(p.c > 0.0 && p.c <= 1.0)) {
    throw ConfigError("schedule: c must lie in (0, 1]");
  }
  if (!(p.mu > 0.0) || !(p.L > 0.0)) {
    throw ConfigError("schedule: mu and L must be positive");
  }
  if (!(p.a0 > 0.0)) throw ConfigError("schedule: a0 must be positive");
  if (p.lambda == 0.0 && p.c * p.mu / p.L >= 1.0) {
    throw ConfigError("λ=0 requires cμ/L < 1");
  }
}

// Unique positive root of g(a) = a^2 - r (A + a)^(2 - lambda) for fixed
// previous partial sum A > 0. g(0) < 0 and g is eventually increasing, so a
// sign-change bracket always exists; Newton iterates are clamped to it.
double next_coefficient(double r, double lambda, double A) {
  if (lambda == 2.0) return std::sqrt(r);
  // Geometric schedules overflow the double range at a few hundred indices;
  // saturate to infinity and let consumers work with ratios from there.
  if (!std::isfinite(A)) return std::numeric_limits<double>::infinity();
  if (lambda == 0.0) {
    double s = std::sqrt(r);
    return s * A / (1.0 - s);
  }
  auto g = [&](double a) { return a * a - r * std::pow(A + a, 2.0 - lambda); };
  auto dg = [&](double a) {
    return 2.0 * a - r * (2.0 - lambda) * std::pow(A + a, 1.0 - lambda);
  };
  double lo = 0.0;
  double hi = A + 1.0;
  while (g(hi) <= 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) {
      throw std::runtime_error("schedule root finder: bracket expansion failed");
    }
  }
  double a = hi;
  for (int iter = 0; iter < 200; ++iter) {
    double ga = g(a);
    if (ga > 0.0) {
      hi = a;
    } else {
      lo = a;
    }
    double d = dg(a);
    double step = d != 0.0 ? ga / d : 0.0;
    double next = a - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - a) <= 1e-14 * std::max(1.0, std::abs(next))) {
      return next;
    }
    a = next;
  }
  throw std::runtime_error("schedule root finder: no convergence in 200 steps");
}

struct FitLine {
  double slope = 0.0;
};

FitLine least_squares(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  return {denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom};
}

}  // namespace

Schedule build_schedule(const ScheduleParams& params, int k_max) {
  validate_params(params);
  if (k_max < 0) throw ConfigError("schedule: k_max must be >= 0");

  const double r = params.c * params.mu / params.L;
  const double lambda = params.lambda;

  // One lookahead index: B[k] = A[k] * H[k+1] needs the root at k_max + 1.
  std::vector<double> a(k_max + 2), A(k_max + 2), H(k_max + 2);
  a[0] = params.a0;
  A[0] = params.a0;
  H[0] = std::pow(A[0], lambda);
  for (int k = 1; k <= k_max + 1; ++k) {
    a[k] = next_coefficient(r, lambda, A[k - 1]);
    A[k] = A[k - 1] + a[k];
    H[k] = std::pow(A[k], lambda);
  }

  Schedule s;
  s.params = params;
  s.k_max = k_max;
  s.a.assign(a.begin(), a.begin() + k_max + 1);
  s.A.assign(A.begin(), A.begin() + k_max + 1);
  s.H.assign(H.begin(), H.begin() + k_max + 1);
  s.h.resize(k_max + 1);
  s.B.resize(k_max + 1);
  s.b.resize(k_max + 1);
  // Differences of two saturated entries would be NaN; the increment of a
  // sequence that has left the double range is itself off the range.
  auto increment = [](double cur, double prev) {
    double d = cur - prev;
    return std::isnan(d) && std::isinf(cur)
               ? std::numeric_limits<double>::infinity()
               : d;
  };
  s.h[0] = s.H[0];
  for (int k = 1; k <= k_max; ++k) s.h[k] = increment(s.H[k], s.H[k - 1]);
  for (int k = 0; k <= k_max; ++k) s.B[k] = A[k] * H[k + 1];
  s.b[0] = s.B[0];
  for (int k = 1; k <= k_max; ++k) s.b[k] = increment(s.B[k], s.B[k - 1]);
  return s;
}

GrowthReport asymptotic_growth_check(const Schedule& s) {
  const double lambda = s.params.lambda;
  const double r = s.params.c * s.params.mu / s.params.L;
  int k_max = s.k_max;
  int need = lambda > 0.0 ? static_cast<int>(std::ceil(100.0 / lambda)) : 100;
  if (k_max < need) {
    throw ConfigError("asymptotic_growth_check: schedule too short (need " +
                      std::to_string(need) + " indices)");
  }
  std::vector<double> xs, ys;
  for (int k = k_max / 2; k <= k_max; ++k) {
    if (!std::isfinite(s.a[k])) break;
    xs.push_back(lambda > 0.0 ? std::log(static_cast<double>(k))
                              : static_cast<double>(k));
    ys.push_back(std::log(s.a[k]));
  }
  if (xs.size() < 2) {
    throw ConfigError(
        "asymptotic_growth_check: tail half has left the double range");
  }
  double slope = least_squares(xs, ys).slope;
  if (lambda > 0.0) {
    return {slope, (2.0 - lambda) / lambda};
  }
  return {std::exp(slope), 1.0 / (1.0 - std::sqrt(r))};
}

double descent_condition_margin(const Schedule& s, double eps_H,
                                double c_prime, int k) {
  if (k < 1 || k > s.k_max) {
    throw ConfigError("descent_condition_margin: k out of range");
  }
  if (!(c_prime >= 0.0 && c_prime <= 1.0)) {
    throw ConfigError("descent_condition_margin: c_prime must lie in [0, 1]");
  }
  const double factor = s.params.c * eps_H / s.params.L;
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= k; ++i) {
    double lhs = (1.0 - c_prime) * (1.0 / s.B[i - 1] - 1.0 / s.B[i]);
    double rhs = factor * (1.0 / s.B[i] - 1.0 / s.B[k]);
    margin = std::min(margin, lhs - rhs);
  }
  return margin;
}

}  // namespace gmom
