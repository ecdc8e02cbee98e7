#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace srw {

/// Chart coordinates of a point (length = chart dimension n).
using Point = Eigen::VectorXd;
/// Tangent vector in chart coordinates.
using Tangent = Eigen::VectorXd;
/// Covector coefficients p_i in the coordinate coframe.
using Covector = Eigen::VectorXd;
/// Rank-3 coefficient table: array[i](j,k). Index meaning depends on context
/// (Christoffel symbols store Gamma^i_{jk}, dual symbols store (1/2) d_i g^{jk}).
using Rank3 = std::vector<Eigen::MatrixXd>;

// Finite-difference step sizes (central differences, double precision).
inline constexpr double kFdStep = 1e-5;        // first derivatives
inline constexpr double kFdStepSecond = 1e-4;  // second derivatives
// Tolerance for "u lies in the horizontal subspace" checks.
inline constexpr double kSpanTol = 1e-9;
// Frame matrices with condition number above this are treated as singular.
inline constexpr double kConditionLimit = 1e12;
// Eigenvalue floor for symmetric matrix square roots.
inline constexpr double kEigenvalueFloor = 1e-14;
// Errors below this are excluded from retraction-order slope fits (roundoff).
inline constexpr double kOrderErrorFloor = 1e-12;
// Same idea for generator tables, where roundoff is amplified by 1/eps^2.
inline constexpr double kGeneratorErrorFloor = 1e-9;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OutOfDomainError : public Error {
 public:
  using Error::Error;
};

class SingularFrameError : public Error {
 public:
  SingularFrameError(const std::string& what, double condition)
      : Error(what), condition(condition) {}
  double condition;
};

class NotHorizontalError : public Error {
 public:
  NotHorizontalError(const std::string& what, double residual)
      : Error(what), residual(residual) {}
  double residual;
};

/// Thrown when an integration or walk step exits the chart domain.
/// Carries the last valid state; silent clamping would corrupt statistics.
class LeftDomainError : public Error {
 public:
  LeftDomainError(const std::string& what, double exit_time, Point last_state)
      : Error(what), exit_time(exit_time), last_state(std::move(last_state)) {}
  double exit_time;
  Point last_state;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

class HorizonExceededError : public Error {
 public:
  using Error::Error;
};

class NotCompatibleError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace srw
