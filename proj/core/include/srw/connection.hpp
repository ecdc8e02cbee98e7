#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "srw/structure.hpp"
#include "srw/types.hpp"

namespace srw {

/// An affine connection stored as a coordinate Christoffel table:
/// christoffels(x)[i](j,k) = Gamma^i_{jk} with nabla_{d_j} d_k = Gamma^i_{jk} d_i.
/// No symmetry in (j,k) is assumed; torsion is allowed.
struct AffineConnection {
  std::function<Rank3(const Point&)> christoffels;
  /// Optional analytic derivatives: gradient(x)[l][i](j,k) = d_l Gamma^i_{jk}.
  /// When absent, central differences with step kFdStepSecond are used
  /// (first-order accuracy of the derivatives is all the retraction needs).
  std::function<std::vector<Rank3>(const Point&)> christoffel_gradient;
  std::string label;

  Rank3 christoffels_at(const Point& x) const { return christoffels(x); }
  std::vector<Rank3> christoffel_gradient_at(const Point& x) const;
};

/// T^i_{jk} = Gamma^i_{jk} - Gamma^i_{kj}; exactly antisymmetric in (j,k).
Rank3 torsion(const AffineConnection& conn, const Point& x);

/// Torsion applied to two vectors: T(u,v)^i = T^i_{jk} u^j v^k.
Tangent torsion_apply(const Rank3& T, const Tangent& u, const Tangent& v);

/// Adjoint connection: Gamma^i_{jk} -> Gamma^i_{kj}. Involutive on tables.
AffineConnection adjoint(const AffineConnection& conn);

/// (nabla_X Y)^i = X^j d_j Y^i + Gamma^i_{jk} X^j Y^k.
Tangent covariant_derivative(const AffineConnection& conn, const Point& x,
                             const VectorFieldSpec& X, const VectorFieldSpec& Y);

struct PredicateReport {
  bool holds = false;
  double max_residual = 0.0;
};

/// Checks that parallel transport preserves H and h: complement coefficients
/// of nabla_{d_j} E_i vanish, and h(nabla_{d_j} E_a, E_b) is antisymmetric in
/// (a,b) so the orthonormality of the frame is preserved.
PredicateReport is_compatible(const AffineConnection& conn,
                              const SubRiemannianStructure& S,
                              std::span<const Point> samples, double tol);

/// Normal iff the adjoint connection is compatible.
PredicateReport is_normal(const AffineConnection& conn,
                          const SubRiemannianStructure& S,
                          std::span<const Point> samples, double tol);

/// Checks pr_H T(E_i, E_j) = 0 for all horizontal pairs.
PredicateReport horizontal_torsion_vertical(const AffineConnection& conn,
                                            const SubRiemannianStructure& S,
                                            std::span<const Point> samples,
                                            double tol);

/// Dynamic normality check: integrate the covector-autoparallel system
///   dx/dt = g(x) p,   dp_i/dt = Gamma^m_{ji} (dx/dt)^j p_m
/// and compare with the Hamiltonian flow of the same initial data.
/// Returns the sup-norm deviation of (x, p) over [0, T].
double autoparallel_vs_hamiltonian(const AffineConnection& conn,
                                   const SubRiemannianStructure& S,
                                   const Point& x0, const Covector& p0,
                                   double T, double dt);

/// The reference compatible connection that makes every frame field parallel:
/// Gamma^i_{jk}(x) = -(d_j W(x) W(x)^{-1})^i_k with W the full frame matrix.
/// The connection keeps the structure alive.
AffineConnection frame_parallel_connection(
    std::shared_ptr<const SubRiemannianStructure> S);

/// Skew correction of a compatible reference connection, producing a
/// compatible connection whose horizontal torsion is vertical:
///   h(kappa(X) Y1, Y2) = 1/2 (-h(T'_H(X,Y1),Y2) + h(T'_H(Y1,Y2),pr_H X)
///                             + h(T'_H(X,Y2),Y1)),
/// extended by zero on complement arguments. Throws NotCompatibleError if the
/// reference fails is_compatible on the check samples.
AffineConnection kappa_correction(
    std::shared_ptr<const SubRiemannianStructure> S,
    const AffineConnection& reference, std::span<const Point> check_samples,
    double check_tol = 1e-5);

}  // namespace srw
