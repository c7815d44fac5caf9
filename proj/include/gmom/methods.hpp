#pragma once

#include <optional>
#include <vector>

#include "gmom/objectives.hpp"
#include "gmom/schedules.hpp"
#include "gmom/spaces.hpp"

namespace gmom {

/** The three momentum iterations plus the plain gradient-descent baseline tag.
 *
 * All three share the dual update z_k = z_{k-1} - H_k (a_k/A_k) grad f(x_k)
 * and differ in how x_k extrapolates and how y_k corrects:
 *
 * GmdF  feasible variant; x_k mixes y_{k-1} with the mirrored dual point
 *       using H-ratio weights, y_k = x_k + (a_k/A_k)(v_k - v_{k-1}) where
 *       v_i = grad psi*(z_i). Works on constrained mirror maps.
 * Gmd   unconstrained variant; x_k = (A_{k-1}/A_k) y_{k-1} + (a_k/A_k) v_{k-1},
 *       same corrector. Carries gradient-norm guarantees.
 * GmdB  unconstrained variant replacing the corrector with a norm-adapted
 *       gradient step y_k = argmin_u <grad f(x_k), u - x_k> + (L/2)|u - x_k|^2.
 */
enum class Method { GmdF, Gmd, GmdB, Baseline };

const char* method_name(Method m);

/** Objective + mirror map + starting point, with z0 chosen so that
 * grad psi*(z0) = x0 (make_problem computes z0 and verifies the round trip). */
struct ProblemInstance {
  Objective objective;
  MirrorMap mirror;
  Vector x0;
  Vector z0;
};

ProblemInstance make_problem(Objective objective, MirrorMap mirror, Vector x0);

struct RunConfig {
  Method method = Method::GmdF;
  double lambda = 1.0;
  double c = 0.5;
  int iters = 1000;
  /** Track the dual-history conserved quantity C_k and its increments E_k.
   * Costs O(k) Bregman evaluations per iteration, hence opt-in. */
  bool track_ck = false;
  /** Iterate histories (x, y, z) are stored up to this index; past it the
   * history-based diagnostics are disabled rather than silently wrong. */
  int history_cap = 2000;
};

/** Mutable state of one run at index k. `v` caches grad psi*(z); `dual_avg`
 * is the weighted average (1/A_k) sum_{i<=k} a_i v_i, kept in normalized form
 * so geometric schedules (lambda = 0) never overflow; it drives GmdB's
 * extrapolation and equals y_k for Gmd. The xhat fields accumulate the
 * averaged iterate's numerator and normalizer. */
struct IterateState {
  int k = 0;
  Vector x, y, z, v;
  Vector dual_avg;
  Vector xhat_num;
  double xhat_den = 0.0;
  Vector last_gradient;
};

IterateState init_state(const ProblemInstance& problem, const Schedule& s);

/** Advance one iteration (state.k -> state.k + 1). Throw DivergenceError on
 * non-finite values or on leaving the objective's documented box. */
void gmd_f_step(IterateState& s, const Schedule& sch, const ProblemInstance& p);
void gmd_step(IterateState& s, const Schedule& sch, const ProblemInstance& p);
void gmd_b_step(IterateState& s, const Schedule& sch, const ProblemInstance& p);

/** The averaged point xhat_k = (H_k y_k + sum_i ((a_i/A_i)H_i - h_i) x_i)
 * / (H_0 + sum_i (a_i/A_i) H_i), a convex combination of feasible points. */
Vector averaged_iterate(const IterateState& s, const Schedule& sch);

/** Completed run: per-iteration columns (index 0..iters), capped histories,
 * and everything diagnostics need to re-derive the conserved quantities. */
struct Trace {
  Method method = Method::GmdF;
  std::optional<Schedule> schedule;
  std::optional<MirrorMap> map;
  Objective objective;
  Vector x0;

  std::vector<double> f_y, f_x, grad_dual, min_grad_sq, gap, c_f;
  std::vector<double> c, e;  // filled when C_k tracking is on
  bool ck_tracked = false;
  bool ck_truncated = false;

  std::vector<Vector> x_hist, y_hist, z_hist;
  int history_cap = 0;

  Vector x, y, z, xhat;  // final state

  int steps() const { return static_cast<int>(f_y.size()) - 1; }
  bool has_history(int k) const { return k < static_cast<int>(z_hist.size()); }
};

/** Reject method/geometry pairs outside a method's guarantees: gmd and gmd_b
 * need an unconstrained mirror map, gmd_b additionally a norm with a unique
 * closed-form steepest-descent direction. */
void validate_method_geometry(Method method, const MirrorMap& map);

/** Execute the configured method for the full budget, recording one row per
 * iteration (budget 0 still records the initial row). Identical inputs give
 * identical traces. Throws ConfigError for method/geometry mismatches and
 * DivergenceError (with the last finite state) when iterates blow up. */
Trace run(const RunConfig& config, const ProblemInstance& problem);

/** Recompute the averaged iterate at an arbitrary recorded index. */
Vector averaged_iterate(const Trace& tr, int k);

}  // namespace gmom
