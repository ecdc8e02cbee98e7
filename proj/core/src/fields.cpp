#include "srw/fields.hpp"

#include <cmath>

namespace srw {

Eigen::MatrixXd numerical_jacobian(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd J(f0.size(), x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (int j = 0; j < x.size(); ++j) {
    xp(j) = x(j) + h;
    xm(j) = x(j) - h;
    J.col(j) = (f(xp) - f(xm)) / (2.0 * h);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return J;
}

Eigen::MatrixXd VectorFieldSpec::jacobian_at(const Point& x) const {
  if (jacobian) return jacobian(x);
  return numerical_jacobian(value, x, kFdStep);
}

Covector ScalarFieldSpec::gradient_at(const Point& x) const {
  if (gradient) return gradient(x);
  Covector g(x.size());
  Eigen::VectorXd xp = x, xm = x;
  for (int j = 0; j < x.size(); ++j) {
    xp(j) = x(j) + kFdStep;
    xm(j) = x(j) - kFdStep;
    g(j) = (value(xp) - value(xm)) / (2.0 * kFdStep);
    xp(j) = x(j);
    xm(j) = x(j);
  }
  return g;
}

Eigen::MatrixXd ScalarFieldSpec::hessian_at(const Point& x) const {
  if (hessian) return hessian(x);
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd H(n, n);
  const double h = kFdStepSecond;
  if (gradient) {
    // differentiate the analytic gradient once
    H = numerical_jacobian(gradient, x, h);
    H = 0.5 * (H + H.transpose()).eval();
    return H;
  }
  const double f0 = value(x);
  Eigen::VectorXd y = x;
  for (int i = 0; i < n; ++i) {
    y(i) = x(i) + h;
    const double fp = value(y);
    y(i) = x(i) - h;
    const double fm = value(y);
    y(i) = x(i);
    H(i, i) = (fp - 2.0 * f0 + fm) / (h * h);
    for (int j = i + 1; j < n; ++j) {
      y(i) = x(i) + h;
      y(j) = x(j) + h;
      const double fpp = value(y);
      y(j) = x(j) - h;
      const double fpm = value(y);
      y(i) = x(i) - h;
      const double fmm = value(y);
      y(j) = x(j) + h;
      const double fmp = value(y);
      y(i) = x(i);
      y(j) = x(j);
      H(i, j) = H(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
    }
  }
  return H;
}

double ScalarFieldSpec::derivative_along(const Point& x, const Tangent& d) const {
  if (gradient) return gradient(x).dot(d);
  const double h = kFdStep;
  return (value(x + h * d) - value(x - h * d)) / (2.0 * h);
}

bool ChartDomain::contains_point(const Point& x) const {
  if (!x.allFinite()) return false;
  if (!contains) return true;
  return contains(x);
}

bool ChartDomain::interior(const Point& x, double margin) const {
  if (!contains_point(x)) return false;
  if (!contains) return true;
  Eigen::VectorXd y = x;
  for (int i = 0; i < x.size(); ++i) {
    y(i) = x(i) + margin;
    if (!contains(y)) return false;
    y(i) = x(i) - margin;
    if (!contains(y)) return false;
    y(i) = x(i);
  }
  return true;
}

std::vector<Point> halton_points(const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi, int count,
                                 int skip) {
  static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  const int dim = static_cast<int>(lo.size());
  std::vector<Point> out;
  out.reserve(count);
  for (int idx = 0; idx < count; ++idx) {
    Point p(dim);
    for (int d = 0; d < dim; ++d) {
      // radical inverse of (idx + skip + 1) in base primes[d]
      int base = primes[d % 10];
      double inv = 1.0 / base, r = 0.0;
      for (int n = idx + skip + 1; n > 0; n /= base) {
        r += (n % base) * inv;
        inv /= base;
      }
      p(d) = lo(d) + r * (hi(d) - lo(d));
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace srw
