#include "srw/structure.hpp"

#include <cmath>
#include <sstream>

namespace srw {

namespace {

std::string point_str(const Point& x) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x(i);
  os << ")";
  return os.str();
}

}  // namespace

Eigen::MatrixXd SubRiemannianStructure::metric_at(const Point& x) const {
  if (metric) return metric(x);
  if (k != n)
    throw Error("metric tensor requested for a rank-deficient structure");
  return cometric(x).inverse();
}

void SubRiemannianStructure::require_in_domain(const Point& x) const {
  if (x.size() != n) throw Error("point dimension mismatch");
  if (!domain.contains_point(x))
    throw OutOfDomainError("point " + point_str(x) + " outside chart domain" +
                           (domain.label.empty() ? "" : " (" + domain.label + ")"));
}

void SubRiemannianStructure::require_interior(const Point& x,
                                              double margin) const {
  require_in_domain(x);
  if (!domain.interior(x, margin))
    throw OutOfDomainError("point " + point_str(x) +
                           " too close to chart boundary" +
                           (domain.label.empty() ? "" : " (" + domain.label + ")"));
}

Eigen::MatrixXd SubRiemannianStructure::full_frame_matrix(const Point& x) const {
  require_in_domain(x);
  Eigen::MatrixXd W(n, n);
  for (int a = 0; a < k; ++a) W.col(a) = horizontal_frame[a].value(x);
  for (int b = 0; b < n - k; ++b) W.col(k + b) = complement_frame[b].value(x);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(W);
  const double smin = svd.singularValues()(n - 1);
  const double smax = svd.singularValues()(0);
  const double cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
  if (!(cond < kConditionLimit))
    throw SingularFrameError("frame matrix singular at " + point_str(x), cond);
  return W;
}

Eigen::MatrixXd SubRiemannianStructure::cometric(const Point& x) const {
  require_in_domain(x);
  if (cometric_closed_form) return cometric_closed_form(x);
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < k; ++a) {
    const Tangent e = horizontal_frame[a].value(x);
    g.noalias() += e * e.transpose();
  }
  return g;
}

Tangent SubRiemannianStructure::sharp(const Point& x, const Covector& alpha) const {
  return cometric(x) * alpha;
}

Eigen::VectorXd SubRiemannianStructure::frame_coefficients(const Point& x,
                                                           const Tangent& w) const {
  const Eigen::MatrixXd W = full_frame_matrix(x);
  return W.partialPivLu().solve(w);
}

Covector SubRiemannianStructure::flat_horizontal(const Point& x,
                                                 const Tangent& u) const {
  const Eigen::MatrixXd W = full_frame_matrix(x);
  const auto lu = W.partialPivLu();
  Eigen::VectorXd c = lu.solve(u);
  if (k < n) {
    const Tangent vertical = W.rightCols(n - k) * c.tail(n - k);
    const double residual = vertical.lpNorm<Eigen::Infinity>();
    if (residual > kSpanTol)
      throw NotHorizontalError("vector has vertical part (residual " +
                                   std::to_string(residual) + ")",
                               residual);
  }
  // alpha^T W = (c_1..c_k, 0..0)
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs.head(k) = c.head(k);
  return W.transpose().partialPivLu().solve(rhs);
}

Rank3 SubRiemannianStructure::dual_christoffels(const Point& x) const {
  if (dual_christoffels_closed_form) {
    require_in_domain(x);
    return dual_christoffels_closed_form(x);
  }
  require_interior(x, kFdStep);
  Rank3 dg(n, Eigen::MatrixXd::Zero(n, n));
  bool analytic = true;
  for (const auto& f : horizontal_frame)
    if (!f.jacobian) analytic = false;
  if (analytic) {
    for (int a = 0; a < k; ++a) {
      const Tangent e = horizontal_frame[a].value(x);
      const Eigen::MatrixXd J = horizontal_frame[a].jacobian(x);
      for (int i = 0; i < n; ++i) {
        const Tangent de = J.col(i);  // d_i E_a
        dg[i].noalias() += 0.5 * (de * e.transpose() + e * de.transpose());
      }
    }
  } else {
    Eigen::VectorXd y = x;
    for (int i = 0; i < n; ++i) {
      y(i) = x(i) + kFdStep;
      const Eigen::MatrixXd gp = cometric(y);
      y(i) = x(i) - kFdStep;
      const Eigen::MatrixXd gm = cometric(y);
      y(i) = x(i);
      dg[i] = (gp - gm) / (4.0 * kFdStep);  // (1/2) d_i g
    }
  }
  // exact upper-index symmetry
  for (int i = 0; i < n; ++i) dg[i] = 0.5 * (dg[i] + dg[i].transpose()).eval();
  return dg;
}

Tangent SubRiemannianStructure::project_horizontal(const Point& x,
                                                   const Tangent& w) const {
  const Eigen::MatrixXd W = full_frame_matrix(x);
  Eigen::VectorXd c = W.partialPivLu().solve(w);
  c.tail(n - k).setZero();
  return W * c;
}

Tangent SubRiemannianStructure::lie_bracket(const Point& x,
                                            const VectorFieldSpec& X,
                                            const VectorFieldSpec& Y) const {
  require_interior(x, kFdStep);
  return Y.jacobian_at(x) * X.value(x) - X.jacobian_at(x) * Y.value(x);
}

double SubRiemannianStructure::horizontal_divergence(
    const Point& x, const VectorFieldSpec& Y) const {
  require_interior(x, kFdStep);
  const Eigen::MatrixXd W = full_frame_matrix(x);
  const auto lu = W.partialPivLu();
  double div = 0.0;
  for (int i = 0; i < k; ++i) {
    const Tangent bracket = lie_bracket(x, Y, horizontal_frame[i]);
    const Eigen::VectorXd c = lu.solve(bracket);
    div -= c(i);  // h(pr_H [Y,E_i], E_i) reads off coefficient i
  }
  return div;
}

double SubRiemannianStructure::sub_laplacian(const Point& x,
                                             const ScalarFieldSpec& f) const {
  require_interior(x, kFdStepSecond);
  double result = 0.0;
  for (int j = 0; j < k; ++j) {
    const VectorFieldSpec& Ej = horizontal_frame[j];
    const Tangent ej = Ej.value(x);
    // E_j f as a scalar field
    const auto Ejf = [&](const Point& y) {
      return f.gradient_at(y).dot(Ej.value(y));
    };
    double second;
    if (f.hessian && Ej.jacobian) {
      const Eigen::MatrixXd H = f.hessian(x);
      const Covector grad = f.gradient_at(x);
      second = ej.dot(H * ej) + grad.dot(Ej.jacobian(x) * ej);
    } else {
      const double h = kFdStepSecond;
      second = (Ejf(x + h * ej) - Ejf(x - h * ej)) / (2.0 * h);
    }
    const double drift = horizontal_divergence(x, Ej);
    result += second + drift * f.gradient_at(x).dot(ej);
  }
  return result;
}

double SubRiemannianStructure::sub_laplacian_divergence_form(
    const Point& x, const ScalarFieldSpec& f) const {
  VectorFieldSpec grad_sharp;
  grad_sharp.value = [this, &f](const Point& y) -> Tangent {
    return cometric(y) * f.gradient_at(y);
  };
  return horizontal_divergence(x, grad_sharp);
}

double SubRiemannianStructure::horizontal_inner(const Point& x, const Tangent& u,
                                                const Tangent& v) const {
  const Eigen::MatrixXd W = full_frame_matrix(x);
  const auto lu = W.partialPivLu();
  const Eigen::VectorXd cu = lu.solve(u);
  const Eigen::VectorXd cv = lu.solve(v);
  return cu.head(k).dot(cv.head(k));
}

}  // namespace srw
