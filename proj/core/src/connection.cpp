#include "srw/connection.hpp"

#include <cmath>

namespace srw {

std::vector<Rank3> AffineConnection::christoffel_gradient_at(const Point& x) const {
  if (christoffel_gradient) return christoffel_gradient(x);
  const int n = static_cast<int>(x.size());
  std::vector<Rank3> grad(n);
  Eigen::VectorXd y = x;
  const double h = kFdStepSecond;
  for (int l = 0; l < n; ++l) {
    y(l) = x(l) + h;
    const Rank3 gp = christoffels(y);
    y(l) = x(l) - h;
    const Rank3 gm = christoffels(y);
    y(l) = x(l);
    Rank3 d(n);
    for (int i = 0; i < n; ++i) d[i] = (gp[i] - gm[i]) / (2.0 * h);
    grad[l] = std::move(d);
  }
  return grad;
}

Rank3 torsion(const AffineConnection& conn, const Point& x) {
  Rank3 G = conn.christoffels_at(x);
  Rank3 T(G.size());
  for (size_t i = 0; i < G.size(); ++i) T[i] = G[i] - G[i].transpose().eval();
  return T;
}

Tangent torsion_apply(const Rank3& T, const Tangent& u, const Tangent& v) {
  Tangent out(static_cast<int>(T.size()));
  for (size_t i = 0; i < T.size(); ++i) out(static_cast<int>(i)) = u.dot(T[i] * v);
  return out;
}

AffineConnection adjoint(const AffineConnection& conn) {
  AffineConnection adj;
  adj.label = conn.label.empty() ? "adjoint" : "adjoint(" + conn.label + ")";
  auto inner = conn.christoffels;
  adj.christoffels = [inner](const Point& x) {
    Rank3 G = inner(x);
    for (auto& m : G) m = m.transpose().eval();
    return G;
  };
  if (conn.christoffel_gradient) {
    auto inner_grad = conn.christoffel_gradient;
    adj.christoffel_gradient = [inner_grad](const Point& x) {
      std::vector<Rank3> grad = inner_grad(x);
      for (auto& g : grad)
        for (auto& m : g) m = m.transpose().eval();
      return grad;
    };
  }
  return adj;
}

Tangent covariant_derivative(const AffineConnection& conn, const Point& x,
                             const VectorFieldSpec& X, const VectorFieldSpec& Y) {
  const Tangent xv = X.value(x);
  const Tangent yv = Y.value(x);
  const Eigen::MatrixXd JY = Y.jacobian_at(x);
  const Rank3 G = conn.christoffels_at(x);
  Tangent out = JY * xv;
  for (size_t i = 0; i < G.size(); ++i)
    out(static_cast<int>(i)) += xv.dot(G[i] * yv);
  return out;
}

PredicateReport is_compatible(const AffineConnection& conn,
                              const SubRiemannianStructure& S,
                              std::span<const Point> samples, double tol) {
  const int n = S.n, k = S.k;
  double worst = 0.0;
  for (const Point& x : samples) {
    const Eigen::MatrixXd W = S.full_frame_matrix(x);
    const auto lu = W.partialPivLu();
    const Rank3 G = conn.christoffels_at(x);
    // nabla_{d_j} E_a for all j, a; coefficients in the full frame
    std::vector<Eigen::MatrixXd> coeff(k);  // coeff[a] is n x n, column j
    for (int a = 0; a < k; ++a) {
      const Tangent e = S.horizontal_frame[a].value(x);
      const Eigen::MatrixXd J = S.horizontal_frame[a].jacobian_at(x);
      Eigen::MatrixXd D(n, n);
      for (int j = 0; j < n; ++j) {
        Tangent d = J.col(j);
        for (int i = 0; i < n; ++i) d(i) += G[i].row(j).dot(e);
        D.col(j) = d;
      }
      coeff[a] = lu.solve(D);
      if (k < n)
        worst = std::max(worst,
                         coeff[a].bottomRows(n - k).lpNorm<Eigen::Infinity>());
    }
    // orthonormality preservation: h(nabla_j E_a, E_b) + h(nabla_j E_b, E_a) = 0
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          worst = std::max(worst, std::abs(coeff[a](b, j) + coeff[b](a, j)));
  }
  return {worst <= tol, worst};
}

PredicateReport is_normal(const AffineConnection& conn,
                          const SubRiemannianStructure& S,
                          std::span<const Point> samples, double tol) {
  return is_compatible(adjoint(conn), S, samples, tol);
}

PredicateReport horizontal_torsion_vertical(const AffineConnection& conn,
                                            const SubRiemannianStructure& S,
                                            std::span<const Point> samples,
                                            double tol) {
  const int k = S.k;
  double worst = 0.0;
  for (const Point& x : samples) {
    const Eigen::MatrixXd W = S.full_frame_matrix(x);
    const auto lu = W.partialPivLu();
    const Rank3 T = torsion(conn, x);
    for (int a = 0; a < k; ++a)
      for (int b = a + 1; b < k; ++b) {
        const Tangent tau = torsion_apply(T, S.horizontal_frame[a].value(x),
                                          S.horizontal_frame[b].value(x));
        const Eigen::VectorXd c = lu.solve(tau);
        worst = std::max(worst, c.head(k).lpNorm<Eigen::Infinity>());
      }
  }
  return {worst <= tol, worst};
}

double autoparallel_vs_hamiltonian(const AffineConnection& conn,
                                   const SubRiemannianStructure& S,
                                   const Point& x0, const Covector& p0,
                                   double T, double dt) {
  if (!(dt > 0.0) || !(T > 0.0)) throw StepSizeError("T and dt must be positive");
  const int n = S.n;
  // covector-autoparallel RHS under the connection
  const auto rhs_conn = [&](const Point& x, const Covector& p, Point& dx,
                            Covector& dp) {
    dx = S.cometric(x) * p;
    const Rank3 G = conn.christoffels_at(x);
    for (int i = 0; i < n; ++i) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += p(m) * G[m].col(i).dot(dx);
      dp(i) = s;
    }
  };
  const auto rhs_ham = [&](const Point& x, const Covector& p, Point& dx,
                           Covector& dp) {
    dx = S.cometric(x) * p;
    const Rank3 dg = S.dual_christoffels(x);
    for (int i = 0; i < n; ++i) dp(i) = -p.dot(dg[i] * p);
  };
  const auto rk4 = [&](auto&& rhs, Point& x, Covector& p) {
    Point k1x(n), k2x(n), k3x(n), k4x(n);
    Covector k1p(n), k2p(n), k3p(n), k4p(n);
    rhs(x, p, k1x, k1p);
    rhs(x + 0.5 * dt * k1x, p + 0.5 * dt * k1p, k2x, k2p);
    rhs(x + 0.5 * dt * k2x, p + 0.5 * dt * k2p, k3x, k3p);
    rhs(x + dt * k3x, p + dt * k3p, k4x, k4p);
    x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    p += dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  };
  Point xa = x0, xh = x0;
  Covector pa = p0, ph = p0;
  double worst = 0.0;
  const long steps = static_cast<long>(std::ceil(T / dt - 1e-12));
  for (long s = 0; s < steps; ++s) {
    rk4(rhs_conn, xa, pa);
    rk4(rhs_ham, xh, ph);
    worst = std::max(worst, (xa - xh).lpNorm<Eigen::Infinity>());
    worst = std::max(worst, (pa - ph).lpNorm<Eigen::Infinity>());
  }
  return worst;
}

AffineConnection frame_parallel_connection(
    std::shared_ptr<const SubRiemannianStructure> S) {
  AffineConnection conn;
  conn.label = "frame-parallel";
  conn.christoffels = [ptr = std::move(S)](const Point& x) {
    const int n = ptr->n, k = ptr->k;
    const Eigen::MatrixXd W = ptr->full_frame_matrix(x);
    const Eigen::MatrixXd Winv = W.inverse();
    Rank3 G(n, Eigen::MatrixXd::Zero(n, n));
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd dWj(n, n);
      for (int a = 0; a < k; ++a)
        dWj.col(a) = ptr->horizontal_frame[a].jacobian_at(x).col(j);
      for (int b = 0; b < n - k; ++b)
        dWj.col(k + b) = ptr->complement_frame[b].jacobian_at(x).col(j);
      const Eigen::MatrixXd M = dWj * Winv;
      for (int i = 0; i < n; ++i) G[i].row(j) = -M.row(i);
    }
    return G;
  };
  return conn;
}

AffineConnection kappa_correction(
    std::shared_ptr<const SubRiemannianStructure> S,
    const AffineConnection& reference, std::span<const Point> check_samples,
    double check_tol) {
  const auto report = is_compatible(reference, *S, check_samples, check_tol);
  if (!report.holds)
    throw NotCompatibleError(
        "kappa correction needs a compatible reference connection (residual " +
        std::to_string(report.max_residual) + ")");
  AffineConnection conn;
  conn.label = reference.label.empty() ? "kappa-corrected"
                                       : "kappa(" + reference.label + ")";
  conn.christoffels = [ptr = std::move(S),
                       ref_table = reference.christoffels](const Point& x) {
    const int n = ptr->n, k = ptr->k;
    Rank3 G = ref_table(x);
    Rank3 T(n);
    for (int i = 0; i < n; ++i) T[i] = G[i] - G[i].transpose().eval();
    const Eigen::MatrixXd W = ptr->full_frame_matrix(x);
    const Eigen::MatrixXd Winv = W.inverse();
    const Eigen::MatrixXd E = W.leftCols(k);
    const Eigen::MatrixXd Ch = Winv.topRows(k);
    // h-coefficients of pr_H T'(E_a, E_b)
    std::vector<std::vector<Eigen::VectorXd>> gamma(
        k, std::vector<Eigen::VectorXd>(k));
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const Tangent tau = torsion_apply(T, E.col(a), E.col(b));
        gamma[a][b] = (Winv * tau).head(k);
      }
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd cjH = Winv.col(j).head(k);  // pr_H d_j coefficients
      // P[a](b) = h(pr_H T'(d_j, E_a), E_b)
      Eigen::MatrixXd P(k, k);
      for (int a = 0; a < k; ++a) {
        Tangent tau(n);
        for (int i = 0; i < n; ++i) tau(i) = T[i].row(j).dot(E.col(a));
        P.col(a) = (Winv * tau).head(k);  // entry b of column a is P[a](b)
      }
      Eigen::MatrixXd beta(k, k);
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b)
          beta(a, b) = 0.5 * (-P(b, a) + gamma[a][b].dot(cjH) + P(a, b));
      const Eigen::MatrixXd kappa_j = E * beta.transpose() * Ch;
      for (int i = 0; i < n; ++i) G[i].row(j) += kappa_j.row(i);
    }
    return G;
  };
  return conn;
}

}  // namespace srw
