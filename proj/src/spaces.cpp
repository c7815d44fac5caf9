#include "gmom/spaces.hpp"

#include <algorithm>
#include <cmath>

namespace gmom {

namespace {

constexpr double kInteriorFloor = 1e-300;

void require_same_size(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw ConfigError(std::string(op) + ": dimension mismatch (" +
                      std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
}

void require_finite(const Vector& z, const char* op) {
  if (!z.allFinite()) {
    throw ConfigError(std::string(op) + ": non-finite input vector");
  }
}

}  // namespace

double lp_norm(const Vector& x, double p) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    acc += std::pow(std::abs(x[i]), p);
  }
  return std::pow(acc, 1.0 / p);
}

double dual_exponent(double p) { return p / (p - 1.0); }

double NormedSpace::norm(const Vector& x) const {
  switch (kind) {
    case NormKind::L2:
      return x.norm();
    case NormKind::L1:
      return x.lpNorm<1>();
    case NormKind::LInf:
      return x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>();
    case NormKind::Lp:
      return lp_norm(x, p);
  }
  return 0.0;
}

NormedSpace NormedSpace::dual() const {
  switch (kind) {
    case NormKind::L2:
      return {NormKind::L2, 2.0};
    case NormKind::L1:
      return {NormKind::LInf, 2.0};
    case NormKind::LInf:
      return {NormKind::L1, 2.0};
    case NormKind::Lp:
      return {NormKind::Lp, dual_exponent(p)};
  }
  return {NormKind::L2, 2.0};
}

MirrorMap::MirrorMap(Geometry geometry, double mu, double radius, double p)
    : geometry_(geometry), mu_(mu), radius_(radius), p_(p) {}

MirrorMap MirrorMap::euclidean(double mu) {
  if (!(mu > 0.0)) throw ConfigError("mirror map: mu must be positive");
  return MirrorMap(Geometry::Euclidean, mu, 0.0, 2.0);
}

MirrorMap MirrorMap::euclidean_ball(double mu, double radius) {
  if (!(mu > 0.0)) throw ConfigError("mirror map: mu must be positive");
  if (!(radius > 0.0)) throw ConfigError("mirror map: radius must be positive");
  return MirrorMap(Geometry::EuclideanBall, mu, radius, 2.0);
}

MirrorMap MirrorMap::entropy_simplex(double mu) {
  if (!(mu > 0.0)) throw ConfigError("mirror map: mu must be positive");
  return MirrorMap(Geometry::EntropySimplex, mu, 0.0, 2.0);
}

MirrorMap MirrorMap::squared_p_norm(double mu, double p) {
  if (!(mu > 0.0)) throw ConfigError("mirror map: mu must be positive");
  if (!(p > 1.0 && p <= 2.0)) {
    throw ConfigError("mirror map: squared p-norm needs p in (1, 2]");
  }
  return MirrorMap(Geometry::SquaredPNorm, mu, 0.0, p);
}

bool MirrorMap::unconstrained() const {
  return geometry_ == Geometry::Euclidean || geometry_ == Geometry::SquaredPNorm;
}

NormedSpace MirrorMap::space() const {
  switch (geometry_) {
    case Geometry::Euclidean:
    case Geometry::EuclideanBall:
      return {NormKind::L2, 2.0};
    case Geometry::EntropySimplex:
      return {NormKind::L1, 2.0};
    case Geometry::SquaredPNorm:
      return {NormKind::Lp, p_};
  }
  return {NormKind::L2, 2.0};
}

double MirrorMap::modulus() const {
  // The squared p-norm is (p - 1)-strongly convex w.r.t. the p-norm, so the
  // effective modulus picks up that factor; the other maps are exactly mu.
  if (geometry_ == Geometry::SquaredPNorm) return mu_ * (p_ - 1.0);
  return mu_;
}

double MirrorMap::value(const Vector& x) const {
  switch (geometry_) {
    case Geometry::Euclidean:
    case Geometry::EuclideanBall:
      return 0.5 * mu_ * x.squaredNorm();
    case Geometry::EntropySimplex: {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] > 0.0) acc += x[i] * std::log(x[i]);
      }
      return mu_ * acc;
    }
    case Geometry::SquaredPNorm: {
      double n = lp_norm(x, p_);
      return 0.5 * mu_ * n * n;
    }
  }
  return 0.0;
}

double MirrorMap::conjugate_value(const Vector& z) const {
  require_finite(z, "conjugate_value");
  switch (geometry_) {
    case Geometry::Euclidean:
      return z.squaredNorm() / (2.0 * mu_);
    case Geometry::EuclideanBall: {
      double r = z.norm();
      if (r <= mu_ * radius_) return r * r / (2.0 * mu_);
      return radius_ * r - 0.5 * mu_ * radius_ * radius_;
    }
    case Geometry::EntropySimplex: {
      // mu * log sum exp(z/mu), stabilized by shifting out the max entry.
      double zmax = z.maxCoeff();
      double acc = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        acc += std::exp((z[i] - zmax) / mu_);
      }
      return zmax + mu_ * std::log(acc);
    }
    case Geometry::SquaredPNorm: {
      double n = lp_norm(z, dual_exponent(p_));
      return n * n / (2.0 * mu_);
    }
  }
  return 0.0;
}

Vector MirrorMap::conjugate_grad(const Vector& z) const {
  require_finite(z, "conjugate_grad");
  switch (geometry_) {
    case Geometry::Euclidean:
      return z / mu_;
    case Geometry::EuclideanBall: {
      double r = z.norm();
      if (r <= mu_ * radius_) return z / mu_;
      return (radius_ / r) * z;
    }
    case Geometry::EntropySimplex: {
      double zmax = z.maxCoeff();
      Vector w = ((z.array() - zmax) / mu_).exp().matrix();
      w /= w.sum();
      // Keep all coordinates strictly positive so downstream logarithms in
      // primal_to_dual and the Bregman forms stay finite.
      for (Eigen::Index i = 0; i < w.size(); ++i) {
        w[i] = std::max(w[i], kInteriorFloor);
      }
      return w;
    }
    case Geometry::SquaredPNorm: {
      double q = dual_exponent(p_);
      double n = lp_norm(z, q);
      if (n == 0.0) return Vector::Zero(z.size());
      Vector g(z.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        g[i] = std::copysign(std::pow(std::abs(z[i]), q - 1.0), z[i]);
      }
      return std::pow(n, 2.0 - q) / mu_ * g;
    }
  }
  return z;
}

Vector MirrorMap::primal_to_dual(const Vector& x) const {
  require_finite(x, "primal_to_dual");
  switch (geometry_) {
    case Geometry::Euclidean:
    case Geometry::EuclideanBall:
      return mu_ * x;
    case Geometry::EntropySimplex: {
      Vector z(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0)) {
          throw ConfigError(
              "primal_to_dual: entropy map needs a point in the relative "
              "interior of the simplex (all coordinates positive)");
        }
        z[i] = mu_ * std::log(x[i]);
      }
      return z;
    }
    case Geometry::SquaredPNorm: {
      double n = lp_norm(x, p_);
      if (n == 0.0) return Vector::Zero(x.size());
      Vector z(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        z[i] = std::copysign(std::pow(std::abs(x[i]), p_ - 1.0), x[i]);
      }
      return mu_ * std::pow(n, 2.0 - p_) * z;
    }
  }
  return x;
}

double MirrorMap::bregman_dual(const Vector& z, const Vector& w) const {
  require_same_size(z, w, "bregman_dual");
  if (geometry_ == Geometry::Euclidean) {
    return (z - w).squaredNorm() / (2.0 * mu_);
  }
  Vector gw = conjugate_grad(w);
  return conjugate_value(z) - conjugate_value(w) - gw.dot(z - w);
}

double MirrorMap::bregman_primal(const Vector& x, const Vector& y) const {
  require_same_size(x, y, "bregman_primal");
  switch (geometry_) {
    case Geometry::Euclidean:
    case Geometry::EuclideanBall:
      return 0.5 * mu_ * (x - y).squaredNorm();
    case Geometry::EntropySimplex: {
      // Generalized relative entropy; finite whenever y is interior and
      // x is on the simplex (0 log 0 reads as 0).
      double acc = 0.0;
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) {
          throw ConfigError("bregman_primal: entropy reference point must be "
                            "strictly positive");
        }
        if (x[i] > 0.0) acc += x[i] * std::log(x[i] / y[i]);
        acc += y[i] - x[i];
      }
      return mu_ * acc;
    }
    case Geometry::SquaredPNorm:
      return value(x) - value(y) - primal_to_dual(y).dot(x - y);
  }
  return 0.0;
}

const char* geometry_name(Geometry g) {
  switch (g) {
    case Geometry::Euclidean:
      return "euclidean_unconstrained";
    case Geometry::EuclideanBall:
      return "euclidean_ball";
    case Geometry::EntropySimplex:
      return "entropy_simplex";
    case Geometry::SquaredPNorm:
      return "squared_p_norm";
  }
  return "unknown";
}

}  // namespace gmom
