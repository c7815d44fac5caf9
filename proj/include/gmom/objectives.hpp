#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "gmom/spaces.hpp"

namespace gmom {

/** Differentiable test objective with exact constants.
 *
 * `smoothness` is the gradient Lipschitz constant L measured primal-to-dual;
 * `weak_convexity` is the smallest eps >= 0 with
 * f(y) >= f(x) + <grad f(x), y - x> - (eps/2) |y - x|^2 (0 for convex f).
 * For nonconvex instances both constants are analytic bounds valid on `box`;
 * run loops treat leaving the box as divergence so the constants stay honest.
 */
struct Objective {
  std::string name;
  int dim = 0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  double smoothness = 0.0;
  double weak_convexity = 0.0;
  std::optional<double> optimum_value;
  std::optional<Vector> optimum_point;
  std::optional<std::pair<Vector, Vector>> box;

  bool in_box(const Vector& x) const {
    if (!box) return true;
    return (x.array() >= box->first.array()).all() &&
           (x.array() <= box->second.array()).all();
  }
};

/** f(x) = 1/2 <x, Q x> with diagonal Q, eigenvalues log-spaced ascending in
 * [L/kappa, L], L = 1. Convex, optimum 0 at the origin. The seed is accepted
 * for signature uniformity but unused: the eigenvalue layout is deterministic
 * so documented per-coordinate examples stay valid for every seed. */
Objective make_quadratic(int dim, double kappa, std::uint64_t seed = 0);

/** Ridge-regularized logistic loss on synthetic separable-plus-noise data.
 * The data matrix is generated from the seed and captured by the instance,
 * so L = opnorm(data)^2/(4 n) + ridge is exact. No closed-form optimum. */
Objective make_logistic(int n_samples, int dim, std::uint64_t seed,
                        double ridge = 1e-3);

enum class NonconvexKind { DoubleWell, StyblinskiTang };

/** Smooth nonconvex 2-D test functions on a stated box.
 *
 * double_well:       f(x) = (x1^2 - 1)^2/4 + x2^2/2 on [-2,2]^2, saddle at 0,
 *                    minima at (+-1, 0); max curvature on the box gives L = 11.
 * styblinski_tang:   f(x) = sum_i (x_i^4 - 16 x_i^2 + 5 x_i)/2 on [-5,5]^2,
 *                    global minimum at both coordinates = -2.903534027771177;
 *                    max curvature on the box gives L = 134.
 * Both report weak_convexity = L (a smooth function with |Hessian| <= L
 * satisfies the weak-convexity inequality with that constant). */
Objective make_nonconvex_2d(NonconvexKind kind);

/** Central-difference gradient, used as the test oracle for exact gradients. */
Vector finite_difference_gradient(const Objective& f, const Vector& x,
                                  double step);

}  // namespace gmom
