#include <cmath>

#include "doctest.h"
#include "gmom/errors.hpp"
#include "gmom/rng.hpp"
#include "gmom/spaces.hpp"

using namespace gmom;

namespace {

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

}  // namespace

// Reference values below were computed with an independent high-precision
// evaluation of the closed forms and frozen at 17 significant digits.

TEST_CASE("euclidean map closed forms") {
  MirrorMap map = MirrorMap::euclidean(2.0);
  CHECK(map.mu() == doctest::Approx(2.0));
  // modulus of psi = (mu/2)|x|^2 w.r.t. the primal norm
  CHECK(map.modulus() == doctest::Approx(2.0));
  CHECK(map.unconstrained());

  Vector z = vec2(4.0, -2.0);
  Vector g = map.conjugate_grad(z);
  CHECK(g[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(-1.0).epsilon(1e-15));
  // psi*(z) = |z|^2 / (2 mu)
  CHECK(map.conjugate_value(z) == doctest::Approx(5.0).epsilon(1e-15));
  // D(z, w) = |z - w|^2 / (2 mu)
  CHECK(map.bregman_dual(z, vec2(0.0, 0.0)) ==
        doctest::Approx(5.0).epsilon(1e-15));
  Vector x = vec2(2.0, -1.0);
  CHECK((map.primal_to_dual(x) - z).norm() == doctest::Approx(0.0));
}

TEST_CASE("entropy map frozen values") {
  MirrorMap ent1 = MirrorMap::entropy_simplex(1.0);
  CHECK(ent1.bregman_dual(vec3(0.3, -0.7, 1.1), vec3(0.0, 0.0, 0.0)) ==
        doctest::Approx(0.24715887613129284).epsilon(1e-14));
  CHECK(ent1.bregman_dual(vec3(1.0, 2.0, -0.5), vec3(0.5, -0.5, 0.25)) ==
        doctest::Approx(0.71836518916791636).epsilon(1e-14));

  MirrorMap ent2 = MirrorMap::entropy_simplex(2.0);
  CHECK(ent2.bregman_dual(vec3(-0.2, 0.4, 0.9), vec3(1.3, 0.1, -0.6)) ==
        doctest::Approx(0.38312903965969175).epsilon(1e-14));

  // psi*(0) = mu log(dim); gradient of the log-sum-exp is the softmax.
  CHECK(ent1.conjugate_value(vec2(0.0, 0.0)) ==
        doctest::Approx(0.69314718055994529).epsilon(1e-15));
  Vector g = ent1.conjugate_grad(vec2(std::log(2.0), 0.0));
  CHECK(g[0] == doctest::Approx(0.66666666666666663).epsilon(1e-15));
  CHECK(g[1] == doctest::Approx(0.33333333333333331).epsilon(1e-15));
}

TEST_CASE("ball map frozen values") {
  MirrorMap ball = MirrorMap::euclidean_ball(1.0, 1.0);
  CHECK_FALSE(ball.unconstrained());
  // outside the effective ball: psi*(z) = R|z| - mu R^2 / 2
  CHECK(ball.conjugate_value(vec2(2.0, 0.0)) ==
        doctest::Approx(1.5).epsilon(1e-15));
  // inside: quadratic regime
  CHECK(ball.conjugate_value(vec2(0.6, 0.8)) ==
        doctest::Approx(0.5).epsilon(1e-15));
  MirrorMap ball2 = MirrorMap::euclidean_ball(1.5, 2.0);
  CHECK(ball2.conjugate_value(vec2(3.0, -4.0)) ==
        doctest::Approx(7.0).epsilon(1e-15));

  // conjugate_grad clips to the radius
  Vector g = ball.conjugate_grad(vec2(10.0, 0.0));
  CHECK(g.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("p-norm map frozen values") {
  MirrorMap pn = MirrorMap::squared_p_norm(2.0, 1.5);
  Vector g = pn.conjugate_grad(vec3(1.0, -2.0, 0.5));
  CHECK(g[0] == doctest::Approx(0.23927227559463729).epsilon(1e-13));
  CHECK(g[1] == doctest::Approx(-0.95708910237854916).epsilon(1e-13));
  CHECK(g[2] == doctest::Approx(0.059818068898659323).epsilon(1e-13));

  MirrorMap pn2 = MirrorMap::squared_p_norm(1.0, 1.25);
  Vector g2 = pn2.conjugate_grad(vec2(0.3, 1.7));
  CHECK(g2[0] == doctest::Approx(0.0016485178819551402).epsilon(1e-12));
  CHECK(g2[1] == doctest::Approx(1.6998254570219167).epsilon(1e-13));

  // dual exponent of p = 1.5 is q = 3; |(1,1)|_3 = 2^(1/3)
  CHECK(dual_exponent(1.5) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(pn.dual_norm(vec2(1.0, 1.0)) ==
        doctest::Approx(1.2599210498948732).epsilon(1e-15));
}

TEST_CASE("bregman three point identity holds on all maps") {
  std::vector<MirrorMap> maps = {
      MirrorMap::euclidean(1.3), MirrorMap::euclidean_ball(1.1, 0.8),
      MirrorMap::entropy_simplex(0.7), MirrorMap::squared_p_norm(1.2, 1.5)};
  Rng rng(101);
  for (const MirrorMap& map : maps) {
    for (int trial = 0; trial < 25; ++trial) {
      Vector z = rng.uniform_vector(4, -2.0, 2.0);
      Vector w = rng.uniform_vector(4, -2.0, 2.0);
      double lhs = map.conjugate_value(z) - map.conjugate_value(w) -
                   map.conjugate_grad(w).dot(z - w);
      CHECK(lhs == doctest::Approx(map.bregman_dual(z, w)).epsilon(1e-10));
      CHECK(map.bregman_dual(z, w) >= -1e-12);
      CHECK(map.bregman_dual(z, z) == doctest::Approx(0.0));
    }
  }
}

TEST_CASE("conjugate gradient is feasible and inverts the primal map") {
  Rng rng(102);
  MirrorMap ent = MirrorMap::entropy_simplex(0.9);
  MirrorMap ball = MirrorMap::euclidean_ball(1.2, 0.7);
  for (int trial = 0; trial < 30; ++trial) {
    Vector z = rng.uniform_vector(5, -3.0, 3.0);
    Vector p = ent.conjugate_grad(z);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.minCoeff() >= 0.0);

    Vector b = ball.conjugate_grad(z);
    CHECK(b.norm() <= ball.radius() + 1e-12);
  }

  // Round trip through primal_to_dual on interior points.
  for (int trial = 0; trial < 30; ++trial) {
    Vector u = rng.uniform_vector(5, -1.0, 1.0);
    Vector simplex = (u.array() - u.maxCoeff()).exp().matrix();
    simplex /= simplex.sum();
    Vector back = ent.conjugate_grad(ent.primal_to_dual(simplex));
    CHECK((back - simplex).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
}

TEST_CASE("norm helpers") {
  CHECK(lp_norm(vec2(3.0, 4.0), 2.0) == doctest::Approx(5.0));
  CHECK(lp_norm(vec3(1.0, -1.0, 1.0), 1.0) == doctest::Approx(3.0));
  CHECK(std::isinf(dual_exponent(1.0)));
  CHECK(dual_exponent(2.0) == doctest::Approx(2.0));

  MirrorMap e = MirrorMap::euclidean(1.0);
  CHECK(e.primal_norm(vec2(3.0, 4.0)) == doctest::Approx(5.0));
  CHECK(e.dual_norm(vec2(3.0, 4.0)) == doctest::Approx(5.0));
}
