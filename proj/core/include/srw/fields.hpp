#pragma once

#include <functional>
#include <string>

#include "srw/types.hpp"

namespace srw {

/// A vector field given in chart coordinates. The jacobian convention is
/// J(i,j) = d_j of component i; when absent, central finite differences
/// with step kFdStep are used.
struct VectorFieldSpec {
  std::function<Tangent(const Point&)> value;
  std::function<Eigen::MatrixXd(const Point&)> jacobian;  // optional

  Eigen::MatrixXd jacobian_at(const Point& x) const;
};

/// A scalar field with optional analytic gradient and hessian. Missing
/// derivatives fall back to central differences (kFdStep / kFdStepSecond).
struct ScalarFieldSpec {
  std::function<double(const Point&)> value;
  std::function<Covector(const Point&)> gradient;       // optional
  std::function<Eigen::MatrixXd(const Point&)> hessian;  // optional

  Covector gradient_at(const Point& x) const;
  Eigen::MatrixXd hessian_at(const Point& x) const;
  /// Directional derivative df(x)(d).
  double derivative_along(const Point& x, const Tangent& d) const;
};

/// Validity predicate for a single chart. `label` feeds error messages.
struct ChartDomain {
  std::function<bool(const Point&)> contains;  // empty = all points valid
  std::string label;

  bool contains_point(const Point& x) const;
  /// x and its 2n axis neighbours at distance `margin` are all inside.
  bool interior(const Point& x, double margin) const;
};

/// Central-difference jacobian of an arbitrary vector function.
Eigen::MatrixXd numerical_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h = kFdStep);

/// Halton quasi-random points filling the box [lo, hi], used for sampling
/// chart domains in predicate checks and property tests.
std::vector<Point> halton_points(const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi, int count,
                                 int skip = 20);

}  // namespace srw
