#pragma once

#include <optional>
#include <vector>

#include "gmom/objectives.hpp"
#include "gmom/spaces.hpp"

namespace gmom {

/** Monotone time reparametrization alpha_t with alpha bounded away from zero:
 * exponential alpha = exp(eta t) or polynomial alpha = (offset + t)^power. */
struct TimeScale {
  enum class Kind { Exponential, Polynomial };
  Kind kind = Kind::Polynomial;
  double eta = 1.0;
  double power = 1.0;
  double offset = 1.0;

  static TimeScale exponential(double eta);
  static TimeScale polynomial(double power, double offset = 1.0);

  double alpha(double t) const;
  double alpha_dot(double t) const;
};

/** Momentum weight h(alpha) = scale * alpha^exponent. The plain family uses
 * scale = 1 with exponent = lambda; the inertial-ODE correspondence test uses
 * exponent = 2/power with scale = 1/power. */
struct HPower {
  double exponent = 1.0;
  double scale = 1.0;
};

/** The three first-order systems in (x, z) phase space:
 *
 * Hd   x' = grad psi*(z),                    z' = -grad f(x)
 *      (time-invariant; conserves f(x) + psi*(z))
 * Ad   x' = (a'/a)(grad psi*(z) - x),        z' = -a' grad f(x)
 * Mod  x' = (a'/a)(grad psi*(z) - x),        z' = -h(a)(a'/a) grad f(x)
 *
 * where a = alpha_t. Ad is Mod with h(alpha) = alpha. */
enum class DynamicsKind { Hd, Ad, Mod };

struct ContinuousRun {
  DynamicsKind kind = DynamicsKind::Mod;
  HPower h;
  MirrorMap map = MirrorMap::euclidean(1.0);
  Objective objective;
  TimeScale ts;
  double dt = 1e-3;
  double t0 = 0.0;
  double T = 10.0;
  Vector z0;
  /** Defaults to grad psi*(z0); Hd admits an unrelated starting point. */
  std::optional<Vector> x0;
};

/** Fixed-step RK4 trajectory with every step stored. The integral
 * accumulators ride along as extra state dimensions, so they carry the
 * integrator's own fourth-order accuracy instead of a resampled quadrature:
 *
 *   int_f_dh[i]    = integral of f(x) d(h(alpha))          (conserved_cf)
 *   int_inner[i]   = integral of h(alpha)(a'/a)<grad f, x> (conserved_cf)
 *   int_beta_f[i]  = integral of beta' f(x), beta = alpha*h(alpha)
 *   int_grad[i]    = integral of grad f(x) dt              (gradient average)
 */
struct Trajectory {
  DynamicsKind kind = DynamicsKind::Mod;
  HPower h;
  std::optional<MirrorMap> map;
  Objective objective;
  TimeScale ts;
  double dt = 0.0;

  std::vector<double> t, f_x, int_f_dh, int_inner, int_beta_f;
  std::vector<Vector> x, z, int_grad;

  int samples() const { return static_cast<int>(t.size()); }
};

/** Integrate the system over [t0, t0 + T]. Throws DivergenceError (with the
 * failing timestamp's index) if the state leaves the finite range. */
Trajectory integrate(const ContinuousRun& run);

/** Conserved quantity of the momentum dynamics at every sample,
 * h(alpha_t) f(x_t) - int f d(h(alpha)) + int h(alpha)(a'/a)<grad f, x>
 * + psi*(z_t). Constant along exact Ad/Mod flows; the drift measures
 * integration error. Rejects Hd (use hamiltonian_energy). */
std::vector<double> conserved_cf(const Trajectory& traj);

/** f(x_t) + psi*(z_t), the invariant of the time-free system Hd. */
std::vector<double> hamiltonian_energy(const Trajectory& traj);

/** Dual-history conserved quantity at selected sample indices:
 * beta_t f(x_t) - beta_0 f(x_0) - int beta' f + alpha_0 D(z_t, z_0)
 * + int D(z_t, z_sigma) alpha'_sigma d sigma, with the inner integral by
 * composite Simpson over the stored samples (O(samples) per checkpoint).
 * Identically zero along exact flows. */
std::vector<double> conserved_c(const Trajectory& traj,
                                const std::vector<int>& checkpoints);

struct AvgGradientReport {
  bool holds = false;
  double max_ratio = 0.0;  // largest |z_t|_dual / bound over the trajectory
  double bound = 0.0;      // sqrt(2 (f(x0) - f_opt) / mu_star)
};

/** Check the averaged-gradient consequence of energy conservation for Hd
 * started at z0 = 0: |(1/t) int grad f|_dual <= sqrt(2(f(x0)-f_opt)/mu_star)/t
 * at every sample, where mu_star is the strong-convexity modulus of psi*
 * (1/mu for the Euclidean map). z_t itself equals -int grad f dt here. */
AvgGradientReport avg_gradient_bound_check(const Trajectory& traj,
                                           double mu_star, double f_opt,
                                           double tol = 0.01);

}  // namespace gmom
