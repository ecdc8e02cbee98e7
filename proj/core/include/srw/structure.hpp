#pragma once

#include <functional>
#include <vector>

#include "srw/fields.hpp"
#include "srw/types.hpp"

namespace srw {

/// A sub-Riemannian structure in a single chart: a horizontal frame
/// E_1..E_k declared h-orthonormal, and a complement frame V_1..V_{n-k}
/// spanning the rest of the tangent space. All derived objects (cometric,
/// sharp/flat, dual Christoffel symbols, horizontal divergence,
/// sub-Laplacian) close over these frames.
///
/// Immutable after construction; all operations are pure.
class SubRiemannianStructure {
 public:
  int n = 0;  // chart dimension
  int k = 0;  // horizontal rank, 1 <= k <= n
  std::vector<VectorFieldSpec> horizontal_frame;  // size k
  std::vector<VectorFieldSpec> complement_frame;  // size n - k
  ChartDomain domain;

  /// Optional chart periodicity (e.g. wrapping an angle); identity if empty.
  std::function<Point(const Point&)> canonicalize;
  /// Optional metric tensor g_ij for Riemannian models (k == n). When empty
  /// and k == n, the inverse of the cometric is used.
  std::function<Eigen::MatrixXd(const Point&)> metric;
  /// Optional closed forms bypassing the frame-product evaluation on the
  /// integrator hot path. Must agree with the generic route (tested).
  std::function<Eigen::MatrixXd(const Point&)> cometric_closed_form;
  std::function<Rank3(const Point&)> dual_christoffels_closed_form;

  Point canonical(const Point& x) const {
    return canonicalize ? canonicalize(x) : x;
  }

  /// Metric tensor for k == n models (analytic if supplied).
  Eigen::MatrixXd metric_at(const Point& x) const;

  void require_in_domain(const Point& x) const;
  void require_interior(const Point& x, double margin) const;

  /// Columns 1..k are E_i(x), columns k+1..n are V_j(x).
  /// Throws SingularFrameError if the condition number exceeds kConditionLimit.
  Eigen::MatrixXd full_frame_matrix(const Point& x) const;

  /// g(x) = sum_a E_a(x) E_a(x)^T; symmetric PSD of rank k.
  Eigen::MatrixXd cometric(const Point& x) const;

  /// alpha -> g(x) alpha; lands in the span of the horizontal frame.
  Tangent sharp(const Point& x, const Covector& alpha) const;

  /// The unique covector with alpha(E_i) = h(u, E_i) and alpha(V_j) = 0.
  /// Throws NotHorizontalError if u has a vertical component above kSpanTol.
  Covector flat_horizontal(const Point& x, const Tangent& u) const;

  /// Dual Christoffel symbols: result[i](j,k) = (1/2) d_i g^{jk}.
  /// Analytic via the product rule when frame jacobians are supplied,
  /// otherwise central differences with step kFdStep.
  Rank3 dual_christoffels(const Point& x) const;

  /// Decompose w in the full frame, zero the complement coefficients,
  /// reassemble. Idempotent.
  Tangent project_horizontal(const Point& x, const Tangent& w) const;

  /// Coefficients of w in the full frame (first k entries are horizontal).
  Eigen::VectorXd frame_coefficients(const Point& x, const Tangent& w) const;

  /// [X,Y](x) = DY(x) X(x) - DX(x) Y(x).
  Tangent lie_bracket(const Point& x, const VectorFieldSpec& X,
                      const VectorFieldSpec& Y) const;

  /// div^V(Y)(x) = -sum_i h(pr_H [Y, E_i], E_i)(x).
  double horizontal_divergence(const Point& x, const VectorFieldSpec& Y) const;

  /// Sub-Laplacian via the sum-of-squares expansion
  ///   sum_j [ E_j(E_j f) + div^V(E_j) (E_j f) ].
  /// Tests check it against the literal div^V((df)^sharp) route.
  double sub_laplacian(const Point& x, const ScalarFieldSpec& f) const;

  /// Literal route div^V((df)^sharp), kept as an independent cross-check.
  double sub_laplacian_divergence_form(const Point& x,
                                       const ScalarFieldSpec& f) const;

  /// h-inner product of two horizontal vectors (via frame coefficients).
  double horizontal_inner(const Point& x, const Tangent& u,
                          const Tangent& v) const;
};

}  // namespace srw
