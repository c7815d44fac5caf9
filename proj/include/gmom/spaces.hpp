#pragma once

#include <Eigen/Core>

#include "gmom/errors.hpp"

namespace gmom {

using Vector = Eigen::VectorXd;

enum class NormKind { L2, L1, LInf, Lp };

/** A finite-dimensional normed space. `p` is only read when kind == Lp. */
struct NormedSpace {
  NormKind kind = NormKind::L2;
  double p = 2.0;

  double norm(const Vector& x) const;

  /** The dual space: L2 <-> L2, L1 <-> LInf, Lp <-> Lq with 1/p + 1/q = 1. */
  NormedSpace dual() const;
};

/** Holder conjugate exponent q = p / (p - 1). */
double dual_exponent(double p);

double lp_norm(const Vector& x, double p);

enum class Geometry { Euclidean, EuclideanBall, EntropySimplex, SquaredPNorm };

/** A strongly convex distance-generating function psi together with its
 * conjugate. All methods evaluate closed forms:
 *
 *   Euclidean:       psi(x) = mu/2 |x|_2^2 on all of R^n
 *   EuclideanBall:   psi(x) = mu/2 |x|_2^2 on { |x|_2 <= radius }
 *   EntropySimplex:  psi(x) = mu * sum_i x_i log x_i on the probability simplex
 *   SquaredPNorm:    psi(x) = mu/2 |x|_p^2 on all of R^n, p in (1, 2]
 *
 * `modulus()` is the strong-convexity constant of psi with respect to the
 * space's own norm (mu for the first three, mu*(p-1) for SquaredPNorm).
 */
class MirrorMap {
 public:
  static MirrorMap euclidean(double mu);
  static MirrorMap euclidean_ball(double mu, double radius);
  static MirrorMap entropy_simplex(double mu);
  static MirrorMap squared_p_norm(double mu, double p);

  Geometry geometry() const { return geometry_; }
  double mu() const { return mu_; }
  double radius() const { return radius_; }
  double p() const { return p_; }

  /** True when the domain of psi is the whole space. */
  bool unconstrained() const;

  NormedSpace space() const;
  double primal_norm(const Vector& x) const { return space().norm(x); }
  double dual_norm(const Vector& g) const { return space().dual().norm(g); }

  /** Strong-convexity modulus of psi w.r.t. the primal norm. */
  double modulus() const;

  /** psi(x). For constrained geometries x must lie in the domain. */
  double value(const Vector& x) const;

  /** Conjugate psi*(z) = sup_{x in dom psi} (<z, x> - psi(x)). */
  double conjugate_value(const Vector& z) const;

  /** grad psi*(z), the maximizer of the sup above; always lands in dom psi. */
  Vector conjugate_grad(const Vector& z) const;

  /** grad psi(x); the inverse of conjugate_grad on the domain interior. */
  Vector primal_to_dual(const Vector& x) const;

  /** Bregman divergence of the conjugate,
   * D(z, w) = psi*(z) - psi*(w) - <grad psi*(w), z - w>. */
  double bregman_dual(const Vector& z, const Vector& w) const;

  /** Bregman divergence of psi itself, D(x, y) with x, y in the domain. */
  double bregman_primal(const Vector& x, const Vector& y) const;

 private:
  MirrorMap(Geometry geometry, double mu, double radius, double p);

  Geometry geometry_;
  double mu_;
  double radius_;
  double p_;
};

const char* geometry_name(Geometry g);

}  // namespace gmom
