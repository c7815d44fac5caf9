#pragma once

#include <cmath>
#include <vector>

#include "gmom/errors.hpp"

namespace gmom {

/** Parameters of the coefficient recurrence a_k^2/A_k^2 = c*mu/(L*H_k) with
 * A_k = sum_{i<=k} a_i and H_k = A_k^lambda.
 *
 * lambda interpolates the method family: 0 is the heavy-ball regime (H
 * constant, geometric growth), 1 the Nesterov regime (H = A, polynomial
 * growth), values up to 2 are allowed for gradient-norm results. */
struct ScheduleParams {
  double lambda = 1.0;
  double c = 0.5;
  double mu = 1.0;
  double L = 1.0;
  double a0 = 1.0;
};

/** Precomputed coefficient arrays for k = 0..k_max.
 *
 * Conventions: h[k] = H[k] - H[k-1] with h[0] = H[0]; B[k] = A[k]*H[k+1]
 * (so building B through index k_max requires one lookahead root beyond it);
 * b[k] = B[k] - B[k-1] with b[0] = B[0]. All entries are strictly positive
 * and A, B strictly increasing.
 *
 * lambda = 0 grows geometrically, so a, A, b, B leave the double range near
 * k ~ 700/log10(growth ratio); past that the arrays saturate to infinity.
 * The ratios a[k]/A[k] and A[k-1]/A[k] = 1 - a[k]/A[k] stay exact at every
 * index (the run loops use only those), while diagnostics that need raw B
 * values are limited to the finite prefix. */
struct Schedule {
  ScheduleParams params;
  int k_max = 0;
  std::vector<double> a, A, h, H, b, B;

  /** theta_k = a[k]/A[k]. Past the saturation point of a geometric schedule
   * the quotient is recovered from the defining relation theta_k^2 =
   * c*mu/(L*H[k]), which the ratio satisfies exactly at every k >= 1. */
  double ratio(int k) const {
    double theta = a[k] / A[k];
    if (std::isnan(theta)) {
      theta = std::sqrt(params.c * params.mu / (params.L * H[k]));
    }
    return theta;
  }
};

/** Build the schedule. a[0] = a0; for k >= 1, a[k] is the unique positive
 * root of a^2 = (c*mu/L) * (A[k-1] + a)^(2-lambda): closed form for
 * lambda in {0, 2}, safeguarded Newton with geometric bracket expansion
 * otherwise (relative tolerance 1e-14).
 *
 * Throws ConfigError for parameters out of range and when lambda = 0 with
 * c*mu/L >= 1 (the geometric recurrence then has no positive solution). */
Schedule build_schedule(const ScheduleParams& params, int k_max);

/** Empirical growth of a[k] against its predicted asymptotic law. */
struct GrowthReport {
  double fitted;     // exponent of k (lambda > 0) or consecutive ratio (lambda = 0)
  double predicted;  // (2 - lambda)/lambda, respectively (1 - sqrt(c*mu/L))^-1
};

/** Fit the tail half of the schedule: for lambda > 0 a least-squares slope of
 * log a[k] vs log k, for lambda = 0 a slope of log a[k] vs k exponentiated to
 * a per-step ratio. Requires k_max >= 100/lambda (lambda > 0) or >= 100. */
GrowthReport asymptotic_growth_check(const Schedule& s);

/** Margin of the schedule condition that lets the descent argument absorb
 * weak-convexity error: min over 1 <= i <= k of
 *   (1 - c_prime)(1/B[i-1] - 1/B[i]) - (c*eps_H/L)(1/B[i] - 1/B[k]).
 * Nonnegative means a run of length k can tolerate curvature defect eps_H. */
double descent_condition_margin(const Schedule& s, double eps_H,
                                double c_prime, int k);

}  // namespace gmom
