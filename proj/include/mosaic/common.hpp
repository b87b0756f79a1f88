#ifndef MOSAIC_COMMON_HPP
#define MOSAIC_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mosaic {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kPi = std::numbers::pi;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a precondition (bad dimensions, non-unit vectors, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A geometric configuration is degenerate (rank deficiency, empty body,
/// near-concurrent planes).  Callers are expected to perturb or resample.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Intersection of halfspaces has no interior.
class EmptyPolytopeError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

/// Iterative method failed to reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

inline void require(bool condition, const char* message) {
  if (!condition) throw InvalidArgument(message);
}

inline double sqr(double v) { return v * v; }

}  // namespace mosaic

#endif  // MOSAIC_COMMON_HPP
