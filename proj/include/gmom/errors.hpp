#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace gmom {

/** Invalid configuration: bad parameter ranges, unknown keys, or a method
 * paired with a geometry it cannot run on. Maps to process exit code 1. */
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/** A method was asked to run on a normed space whose dual norm lacks the
 * smoothness the method's update requires. */
class UnsupportedGeometryError : public ConfigError {
 public:
  explicit UnsupportedGeometryError(const std::string& what) : ConfigError(what) {}
};

/** Iterates left the finite range (or the objective's documented box).
 * Carries the last finite state so callers can report where the run died.
 * Maps to process exit code 2. */
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration,
                  Eigen::VectorXd last_x, double last_value)
      : std::runtime_error(what),
        iteration(iteration),
        last_x(std::move(last_x)),
        last_value(last_value) {}

  int iteration;
  Eigen::VectorXd last_x;
  double last_value;
};

}  // namespace gmom
