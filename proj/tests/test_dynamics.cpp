#include <cmath>

#include "doctest.h"
#include "gmom/dynamics.hpp"
#include "gmom/objectives.hpp"
#include "gmom/rng.hpp"

using namespace gmom;

namespace {

double cf_drift(const Trajectory& traj) {
  std::vector<double> cf = conserved_cf(traj);
  double drift = 0.0;
  for (double v : cf) drift = std::max(drift, std::abs(v - cf[0]));
  return drift;
}

ContinuousRun quad_mod(double exponent, double scale, const TimeScale& ts,
                       double dt, double T) {
  ContinuousRun cr;
  cr.kind = DynamicsKind::Mod;
  cr.h = HPower{exponent, scale};
  cr.map = MirrorMap::euclidean(1.0);
  cr.objective = make_quadratic(3, 10.0);
  cr.ts = ts;
  cr.dt = dt;
  cr.T = T;
  Rng rng(5);
  cr.z0 = rng.uniform_vector(3, -1.0, 1.0);
  return cr;
}

}  // namespace

TEST_CASE("time scale closed forms") {
  TimeScale e = TimeScale::exponential(0.5);
  CHECK(e.alpha(2.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  CHECK(e.alpha_dot(2.0) ==
        doctest::Approx(0.5 * std::exp(1.0)).epsilon(1e-15));

  TimeScale p = TimeScale::polynomial(2.0);
  CHECK(p.alpha(3.0) == doctest::Approx(16.0).epsilon(1e-15));
  CHECK(p.alpha_dot(3.0) == doctest::Approx(8.0).epsilon(1e-15));

  TimeScale shifted = TimeScale::polynomial(3.0, 0.0);
  CHECK(shifted.alpha(2.0) == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(shifted.alpha_dot(2.0) == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("hamiltonian flow on the unit oscillator matches cos/sin") {
  ContinuousRun cr;
  cr.kind = DynamicsKind::Hd;
  cr.map = MirrorMap::euclidean(1.0);
  cr.objective = make_quadratic(1, 1.0);
  cr.dt = 1e-3;
  cr.T = 10.0;
  cr.z0 = Vector::Zero(1);
  Vector x0(1);
  x0 << 1.0;
  cr.x0 = x0;
  Trajectory traj = integrate(cr);

  REQUIRE(traj.samples() == 10001);
  double worst = 0.0;
  for (int i = 0; i < traj.samples(); ++i) {
    worst = std::max(worst, std::abs(traj.x[i][0] - std::cos(traj.t[i])));
    worst = std::max(worst, std::abs(traj.z[i][0] + std::sin(traj.t[i])));
  }
  CHECK(worst <= 1e-9);

  std::vector<double> energy = hamiltonian_energy(traj);
  double drift = 0.0;
  for (double e : energy) drift = std::max(drift, std::abs(e - energy[0]));
  CHECK(drift <= 1e-9);
}

TEST_CASE("unit-weight momentum flow coincides with the averaged flow") {
  ContinuousRun mod = quad_mod(1.0, 1.0, TimeScale::polynomial(2.0), 1e-2, 5.0);
  ContinuousRun ad = mod;
  ad.kind = DynamicsKind::Ad;
  Trajectory tm = integrate(mod);
  Trajectory ta = integrate(ad);
  REQUIRE(tm.samples() == ta.samples());
  double worst = 0.0;
  for (int i = 0; i < tm.samples(); ++i) {
    worst = std::max(worst, (tm.x[i] - ta.x[i]).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (tm.z[i] - ta.z[i]).lpNorm<Eigen::Infinity>());
  }
  CHECK(worst <= 1e-14);
}

TEST_CASE("momentum invariant drifts at integrator order only") {
  Trajectory traj =
      integrate(quad_mod(1.0, 1.0, TimeScale::polynomial(2.0), 1e-3, 10.0));
  double scale = std::max(1.0, std::abs(traj.f_x[0]));
  CHECK(cf_drift(traj) <= 1e-5 * scale);

  // Fourth-order integrator: halving dt shrinks the drift by >= 8x
  // (asymptotically 16x) while both drifts stay above the roundoff floor.
  double coarse =
      cf_drift(integrate(quad_mod(1.0, 1.0, TimeScale::polynomial(2.0), 0.02, 10.0)));
  double fine =
      cf_drift(integrate(quad_mod(1.0, 1.0, TimeScale::polynomial(2.0), 0.01, 10.0)));
  CHECK(coarse / fine >= 8.0);
}

TEST_CASE("dual-history invariant stays near zero at checkpoints") {
  Trajectory traj =
      integrate(quad_mod(0.0, 1.0, TimeScale::exponential(0.5), 1e-3, 10.0));
  double scale = std::max(1.0, std::abs(traj.f_x[0]));
  std::vector<int> checkpoints;
  for (int j = 1; j <= 20; ++j)
    checkpoints.push_back(j * (traj.samples() - 1) / 20);
  std::vector<double> c = conserved_c(traj, checkpoints);
  REQUIRE(c.size() == 20);
  for (double v : c) CHECK(std::abs(v) <= 1e-4 * scale);
}

TEST_CASE("trajectory bookkeeping") {
  ContinuousRun cr = quad_mod(1.0, 1.0, TimeScale::polynomial(2.0), 0.1, 2.0);
  cr.t0 = 1.0;
  Trajectory traj = integrate(cr);
  CHECK(traj.samples() == 21);
  CHECK(traj.t.front() == doctest::Approx(1.0));
  CHECK(traj.t.back() == doctest::Approx(3.0));
  // x0 defaults to grad psi*(z0)
  CHECK((traj.x[0] - cr.map.conjugate_grad(cr.z0)).norm() <= 1e-15);
}

TEST_CASE("averaged gradient norm obeys the energy bound") {
  ContinuousRun cr;
  cr.kind = DynamicsKind::Hd;
  cr.map = MirrorMap::euclidean(2.0);
  cr.objective = make_quadratic(3, 10.0);
  cr.dt = 1e-3;
  cr.T = 20.0;
  cr.z0 = Vector::Zero(3);
  Rng rng(6);
  cr.x0 = rng.uniform_vector(3, -1.0, 1.0);
  Trajectory traj = integrate(cr);

  // psi* of the mu=2 Euclidean map is (1/2)-strongly convex.
  AvgGradientReport rep = avg_gradient_bound_check(traj, 0.5, 0.0);
  CHECK(rep.holds);
  CHECK(rep.max_ratio <= 1.01);
  CHECK(rep.bound ==
        doctest::Approx(std::sqrt(2.0 * traj.f_x[0] / 0.5)).epsilon(1e-12));
}
