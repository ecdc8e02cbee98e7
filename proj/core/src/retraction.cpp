#include "srw/retraction.hpp"

#include <cmath>

namespace srw {

namespace {

Eigen::MatrixXd symmetric_inverse_sqrt(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (M + M.transpose()));
  Eigen::VectorXd lambda = eig.eigenvalues();
  for (int i = 0; i < lambda.size(); ++i)
    lambda(i) = 1.0 / std::sqrt(std::max(lambda(i), kEigenvalueFloor));
  return eig.eigenvectors() * lambda.asDiagonal() *
         eig.eigenvectors().transpose();
}

// d/dt Gamma(dx/dt)|_0 along the connection geodesic with velocity u:
// Gdot(k,j) = u^a u^b (Gamma^k_{aj,b} - Gamma^i_{ab} Gamma^k_{ij}).
Eigen::MatrixXd christoffel_rate(const AffineConnection& conn, const Point& x,
                                 const Rank3& G, const Tangent& u) {
  const int n = static_cast<int>(u.size());
  const std::vector<Rank3> grad = conn.christoffel_gradient_at(x);
  Eigen::MatrixXd M1 = Eigen::MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b)
    M1 += u(b) * index_free_christoffel(grad[b], u);
  Tangent w(n);
  for (int i = 0; i < n; ++i) w(i) = u.dot(G[i] * u);
  return M1 - index_free_christoffel(G, w);
}

const AffineConnection& require_connection(const RetractionSpec& R) {
  if (!R.connection)
    throw ConfigError(std::string(retraction_kind_name(R.kind)) +
                      " requires a connection");
  return *R.connection;
}

Eigen::MatrixXd anisotropy_or_identity(const RetractionSpec& R, int n) {
  if (R.anisotropy.size() == 0) return Eigen::MatrixXd::Identity(n, n);
  if (std::abs(R.anisotropy.determinant()) < 1e-12)
    throw ConfigError("anisotropy matrix is singular");
  return R.anisotropy;
}

}  // namespace

const char* retraction_kind_name(RetractionKind kind) {
  switch (kind) {
    case RetractionKind::ExactExp: return "exact-exp";
    case RetractionKind::Ret1: return "ret1";
    case RetractionKind::Ret2: return "ret2";
    case RetractionKind::Ret3: return "ret3";
    case RetractionKind::Ret3Prime: return "ret3prime";
  }
  return "?";
}

Point retract(const RetractionSpec& R, const Point& x, const Tangent& u,
              double t) {
  if (t < 0.0) throw StepSizeError("retraction time must be nonnegative");
  if (t == 0.0) return x;
  const SubRiemannianStructure& S = R.S();
  switch (R.kind) {
    case RetractionKind::ExactExp:
      return hamiltonian_endpoint(S, x, S.flat_horizontal(x, u), t, R.exp_dt).x;
    case RetractionKind::Ret1: {
      const Covector p = S.flat_horizontal(x, u);
      const Eigen::MatrixXd g = S.cometric(x);
      const Rank3 dg = S.dual_christoffels(x);
      const Tangent v = g * p;
      Tangent accel = Eigen::VectorXd::Zero(S.n);
      Covector q(S.n);
      for (int i = 0; i < S.n; ++i) {
        accel += 2.0 * v(i) * (dg[i] * p);
        q(i) = p.dot(dg[i] * p);
      }
      accel -= g * q;
      const Point out = x + t * v + 0.5 * t * t * accel;
      if (!S.domain.contains_point(out))
        throw LeftDomainError("retraction left chart domain", t, x);
      return out;
    }
    case RetractionKind::Ret2:
    case RetractionKind::Ret3:
    case RetractionKind::Ret3Prime: {
      const Rank3 G = require_connection(R).christoffels_at(x);
      Tangent w(S.n);
      for (int i = 0; i < S.n; ++i) w(i) = u.dot(G[i] * u);
      const Point out = x + t * u - 0.5 * t * t * w;
      if (!S.domain.contains_point(out))
        throw LeftDomainError("retraction left chart domain", t, x);
      return out;
    }
  }
  throw Error("unreachable retraction kind");
}

FramePoint retract_frame(const RetractionSpec& R, const Point& x,
                         const Eigen::MatrixXd& F, const Tangent& u, double t) {
  const SubRiemannianStructure& S = R.S();
  if (S.k != S.n)
    throw ConfigError("frame retractions need a Riemannian model (k == n)");
  if (t == 0.0) return {x, F};
  switch (R.kind) {
    case RetractionKind::ExactExp: {
      // geodesic plus ODE transport, the oracle-grade route
      const auto& conn = require_connection(R);
      const GeodesicPath path =
          affine_geodesic(conn, x, u, t, R.exp_dt, &S.domain);
      return {path.endpoint(), parallel_transport_frame(conn, path, F).back()};
    }
    case RetractionKind::Ret3:
    case RetractionKind::Ret3Prime: {
      const auto& conn = require_connection(R);
      const Eigen::MatrixXd A = anisotropy_or_identity(R, S.n);
      const Rank3 G = conn.christoffels_at(x);
      const Eigen::MatrixXd Gu = index_free_christoffel(G, u);
      const Eigen::MatrixXd Gdot = christoffel_rate(conn, x, G, u);
      Tangent w(S.n);
      for (int i = 0; i < S.n; ++i) w(i) = u.dot(G[i] * u);
      const Point xt = x + t * u - 0.5 * t * t * w;
      if (!S.domain.contains_point(xt))
        throw LeftDomainError("retraction left chart domain", t, x);
      const Eigen::MatrixXd poly =
          Eigen::MatrixXd::Identity(S.n, S.n) - t * Gu +
          0.5 * t * t * (Gu * Gu - Gdot);
      const Eigen::MatrixXd E = poly * F * A.inverse();
      const Eigen::MatrixXd gt = S.metric_at(xt);
      const Eigen::MatrixXd S_inv =
          symmetric_inverse_sqrt(E.transpose() * gt * E);
      return {xt, E * S_inv * A};
    }
    default:
      throw ConfigError(std::string(retraction_kind_name(R.kind)) +
                        " has no frame variant");
  }
}

double frame_orthonormality_residual(const Eigen::MatrixXd& g,
                                     const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd* A) {
  Eigen::MatrixXd Fo = F;
  if (A) Fo = F * A->inverse();
  const int n = static_cast<int>(F.rows());
  return (Fo.transpose() * g * Fo - Eigen::MatrixXd::Identity(n, n))
      .lpNorm<Eigen::Infinity>();
}

OrderTestResult order_test(
    const std::function<double(const OrderSample&, double)>& error_fn,
    const std::vector<OrderSample>& samples, const std::vector<double>& t_grid,
    double floor) {
  OrderTestResult res;
  res.t_grid = t_grid;
  res.errors.assign(samples.size(), std::vector<double>(t_grid.size(), 0.0));
  res.max_errors.assign(t_grid.size(), 0.0);
  for (size_t s = 0; s < samples.size(); ++s)
    for (size_t ti = 0; ti < t_grid.size(); ++ti) {
      const double e = error_fn(samples[s], t_grid[ti]);
      res.errors[s][ti] = e;
      res.max_errors[ti] = std::max(res.max_errors[ti], e);
    }
  // least-squares fit of log(err) vs log(t) above the roundoff floor
  std::vector<double> lx, ly;
  for (size_t ti = 0; ti < t_grid.size(); ++ti)
    if (res.max_errors[ti] > floor) {
      lx.push_back(std::log(t_grid[ti]));
      ly.push_back(std::log(res.max_errors[ti]));
    }
  if (lx.size() < 2) {
    res.at_floor = true;
    return res;
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return res;
}

OrderTestResult order_test_points(
    const RetractionSpec& R,
    const std::function<Point(const Point&, const Tangent&, double)>& oracle,
    const std::vector<OrderSample>& samples,
    const std::vector<double>& t_grid) {
  return order_test(
      [&](const OrderSample& s, double t) {
        return (retract(R, s.x, s.u, t) - oracle(s.x, s.u, t))
            .lpNorm<Eigen::Infinity>();
      },
      samples, t_grid);
}

OrderTestResult order_test_frames(
    const RetractionSpec& R,
    const std::function<FramePoint(const OrderSample&, double)>& oracle,
    const std::vector<OrderSample>& samples,
    const std::vector<double>& t_grid) {
  return order_test(
      [&](const OrderSample& s, double t) {
        const FramePoint got = retract_frame(R, s.x, s.frame, s.u, t);
        const FramePoint want = oracle(s, t);
        return std::max(
            (got.x - want.x).lpNorm<Eigen::Infinity>(),
            (got.frame - want.frame).lpNorm<Eigen::Infinity>());
      },
      samples, t_grid);
}

std::vector<double> default_order_grid() {
  return {1e-1, std::pow(10.0, -1.5), 1e-2, std::pow(10.0, -2.5), 1e-3};
}

}  // namespace srw
