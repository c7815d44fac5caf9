#include "gmom/objectives.hpp"

#include <cmath>
#include <memory>

#include <Eigen/Dense>

#include "gmom/errors.hpp"
#include "gmom/rng.hpp"

namespace gmom {

namespace {

// log(1 + exp(-t)) without overflow on either tail.
double log1p_exp_neg(double t) {
  if (t > 0.0) return std::log1p(std::exp(-t));
  return -t + std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

Objective make_quadratic(int dim, double kappa, std::uint64_t /*seed*/) {
  if (dim < 1) throw ConfigError("make_quadratic: dimension must be >= 1");
  if (!(kappa >= 1.0)) {
    throw ConfigError("make_quadratic: condition number must be >= 1");
  }
  const double L = 1.0;
  auto q = std::make_shared<Vector>(dim);
  for (int i = 0; i < dim; ++i) {
    double frac = dim == 1 ? 1.0 : static_cast<double>(i) / (dim - 1);
    (*q)[i] = L / kappa * std::pow(kappa, frac);
  }

  Objective f;
  f.name = "quadratic";
  f.dim = dim;
  f.value = [q](const Vector& x) { return 0.5 * x.dot(q->cwiseProduct(x)); };
  f.gradient = [q](const Vector& x) -> Vector { return q->cwiseProduct(x); };
  f.smoothness = L;
  f.weak_convexity = 0.0;
  f.optimum_value = 0.0;
  f.optimum_point = Vector::Zero(dim);
  return f;
}

Objective make_logistic(int n_samples, int dim, std::uint64_t seed,
                        double ridge) {
  if (n_samples < 1 || dim < 1) {
    throw ConfigError("make_logistic: sample count and dimension must be >= 1");
  }
  if (!(ridge >= 0.0)) throw ConfigError("make_logistic: ridge must be >= 0");

  Rng rng(seed);
  Vector w_true = rng.normal_vector(dim).normalized();
  auto data = std::make_shared<Eigen::MatrixXd>(n_samples, dim);
  auto labels = std::make_shared<Vector>(n_samples);
  for (int i = 0; i < n_samples; ++i) {
    for (int j = 0; j < dim; ++j) (*data)(i, j) = rng.normal();
    double margin = data->row(i).dot(w_true) + 0.3 * rng.normal();
    (*labels)[i] = margin >= 0.0 ? 1.0 : -1.0;
  }

  double op_norm = data->jacobiSvd().singularValues()[0];
  double n = static_cast<double>(n_samples);

  Objective f;
  f.name = "logistic";
  f.dim = dim;
  f.value = [data, labels, ridge, n](const Vector& w) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < data->rows(); ++i) {
      acc += log1p_exp_neg((*labels)[i] * data->row(i).dot(w));
    }
    return acc / n + 0.5 * ridge * w.squaredNorm();
  };
  f.gradient = [data, labels, ridge, n](const Vector& w) -> Vector {
    Vector g = ridge * w;
    for (Eigen::Index i = 0; i < data->rows(); ++i) {
      double t = (*labels)[i] * data->row(i).dot(w);
      g -= (sigmoid(-t) * (*labels)[i] / n) * data->row(i).transpose();
    }
    return g;
  };
  f.smoothness = op_norm * op_norm / (4.0 * n) + ridge;
  f.weak_convexity = 0.0;
  return f;
}

Objective make_nonconvex_2d(NonconvexKind kind) {
  Objective f;
  f.dim = 2;
  if (kind == NonconvexKind::DoubleWell) {
    f.name = "double_well";
    f.value = [](const Vector& x) {
      double w = x[0] * x[0] - 1.0;
      return 0.25 * w * w + 0.5 * x[1] * x[1];
    };
    f.gradient = [](const Vector& x) -> Vector {
      Vector g(2);
      g[0] = x[0] * x[0] * x[0] - x[0];
      g[1] = x[1];
      return g;
    };
    // Curvature along x1 is 3 x1^2 - 1, at most 11 on [-2, 2].
    f.smoothness = 11.0;
    f.weak_convexity = 11.0;
    f.optimum_value = 0.0;
    f.optimum_point = (Vector(2) << 1.0, 0.0).finished();
    f.box = {Vector::Constant(2, -2.0), Vector::Constant(2, 2.0)};
  } else {
    f.name = "styblinski_tang";
    f.value = [](const Vector& x) {
      double acc = 0.0;
      for (int i = 0; i < 2; ++i) {
        double t = x[i];
        acc += 0.5 * (t * t * t * t - 16.0 * t * t + 5.0 * t);
      }
      return acc;
    };
    f.gradient = [](const Vector& x) -> Vector {
      Vector g(2);
      for (int i = 0; i < 2; ++i) {
        double t = x[i];
        g[i] = 2.0 * t * t * t - 16.0 * t + 2.5;
      }
      return g;
    };
    // Curvature per coordinate is 6 t^2 - 16, at most 134 on [-5, 5].
    f.smoothness = 134.0;
    f.weak_convexity = 134.0;
    f.optimum_value = -78.33233140754282;
    f.optimum_point = Vector::Constant(2, -2.903534027771177);
    f.box = {Vector::Constant(2, -5.0), Vector::Constant(2, 5.0)};
  }
  return f;
}

Vector finite_difference_gradient(const Objective& f, const Vector& x,
                                  double step) {
  if (!(step > 0.0)) {
    throw ConfigError("finite_difference_gradient: step must be positive");
  }
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    double hi = f.value(probe);
    probe[i] = x[i] - step;
    double lo = f.value(probe);
    probe[i] = x[i];
    g[i] = (hi - lo) / (2.0 * step);
  }
  return g;
}

}  // namespace gmom
