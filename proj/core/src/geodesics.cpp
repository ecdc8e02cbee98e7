#include "srw/geodesics.hpp"

#include <cmath>

namespace srw {

namespace {

double hamiltonian_value(const SubRiemannianStructure& S, const Point& x,
                         const Covector& p) {
  return 0.5 * p.dot(S.cometric(x) * p);
}

struct StepPlan {
  long steps;
  double dt;
};

StepPlan plan_steps(double T, double dt) {
  if (!(T > 0.0)) throw StepSizeError("integration horizon must be positive");
  if (!(dt > 0.0)) throw StepSizeError("step size must be positive");
  long steps = static_cast<long>(std::llround(T / dt));
  if (steps < 1) steps = 1;
  // land exactly on T with uniform steps
  return {steps, T / static_cast<double>(steps)};
}

}  // namespace

GeodesicPath hamiltonian_flow(const SubRiemannianStructure& S, const Point& x0,
                              const Covector& p0, double T, double dt) {
  S.require_in_domain(x0);
  const auto [steps, h] = plan_steps(T, dt);
  const int n = S.n;

  const auto rhs = [&S, n](const Point& x, const Covector& p, Point& dx,
                           Covector& dp) {
    dx = S.cometric(x) * p;
    const Rank3 dg = S.dual_christoffels(x);
    for (int i = 0; i < n; ++i) dp(i) = -p.dot(dg[i] * p);
  };

  GeodesicPath path;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.covectors.reserve(steps + 1);
  path.velocities.reserve(steps + 1);

  Point x = x0;
  Covector p = p0;
  path.times.push_back(0.0);
  path.states.push_back(x);
  path.covectors.push_back(p);
  path.velocities.push_back(S.cometric(x) * p);

  const double H0 = hamiltonian_value(S, x0, p0);
  double drift = 0.0;

  Point k1x(n), k2x(n), k3x(n), k4x(n);
  Covector k1p(n), k2p(n), k3p(n), k4p(n);
  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s + 1) * h;
    Point xn(n);
    Covector pn(n);
    try {
      rhs(x, p, k1x, k1p);
      rhs(x + 0.5 * h * k1x, p + 0.5 * h * k1p, k2x, k2p);
      rhs(x + 0.5 * h * k2x, p + 0.5 * h * k2p, k3x, k3p);
      rhs(x + h * k3x, p + h * k3p, k4x, k4p);
      xn = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      pn = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    } catch (const OutOfDomainError&) {
      // a stage evaluation crossed the chart boundary
      throw LeftDomainError(
          "geodesic left chart domain at t=" + std::to_string(t), t, x);
    }
    if (!S.domain.contains_point(xn))
      throw LeftDomainError("geodesic left chart domain at t=" +
                                std::to_string(t),
                            t, x);
    x = xn;
    p = pn;
    path.times.push_back(t);
    path.states.push_back(x);
    path.covectors.push_back(p);
    path.velocities.push_back(S.cometric(x) * p);
    drift = std::max(drift, std::abs(hamiltonian_value(S, x, p) - H0));
  }
  path.hamiltonian_drift = drift;
  return path;
}

HamiltonianState hamiltonian_endpoint(const SubRiemannianStructure& S,
                                      const Point& x0, const Covector& p0,
                                      double T, double dt) {
  S.require_in_domain(x0);
  const auto [steps, h] = plan_steps(T, dt);
  const int n = S.n;
  const auto rhs = [&S, n](const Point& x, const Covector& p, Point& dx,
                           Covector& dp) {
    dx = S.cometric(x) * p;
    const Rank3 dg = S.dual_christoffels(x);
    for (int i = 0; i < n; ++i) dp(i) = -p.dot(dg[i] * p);
  };
  Point x = x0;
  Covector p = p0;
  Point k1x(n), k2x(n), k3x(n), k4x(n);
  Covector k1p(n), k2p(n), k3p(n), k4p(n);
  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s + 1) * h;
    Point xn(n);
    Covector pn(n);
    try {
      rhs(x, p, k1x, k1p);
      rhs(x + 0.5 * h * k1x, p + 0.5 * h * k1p, k2x, k2p);
      rhs(x + 0.5 * h * k2x, p + 0.5 * h * k2p, k3x, k3p);
      rhs(x + h * k3x, p + h * k3p, k4x, k4p);
      xn = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
      pn = p + h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    } catch (const OutOfDomainError&) {
      throw LeftDomainError(
          "geodesic left chart domain at t=" + std::to_string(t), t, x);
    }
    if (!S.domain.contains_point(xn))
      throw LeftDomainError("geodesic left chart domain at t=" +
                                std::to_string(t),
                            t, x);
    x = xn;
    p = pn;
  }
  return {x, p};
}

GeodesicPath normal_geodesic_horizontal(const SubRiemannianStructure& S,
                                        const Point& x, const Tangent& u,
                                        double T, double dt) {
  return hamiltonian_flow(S, x, S.flat_horizontal(x, u), T, dt);
}

GeodesicPath affine_geodesic(const AffineConnection& conn, const Point& x,
                             const Tangent& u, double T, double dt,
                             const ChartDomain* domain) {
  const auto [steps, h] = plan_steps(T, dt);
  const int n = static_cast<int>(x.size());

  const auto accel = [&conn, n](const Point& q, const Tangent& v) {
    const Rank3 G = conn.christoffels_at(q);
    Tangent a(n);
    for (int i = 0; i < n; ++i) a(i) = -v.dot(G[i] * v);
    return a;
  };

  GeodesicPath path;
  path.times.reserve(steps + 1);
  path.states.reserve(steps + 1);
  path.velocities.reserve(steps + 1);
  Point q = x;
  Tangent v = u;
  path.times.push_back(0.0);
  path.states.push_back(q);
  path.velocities.push_back(v);
  for (long s = 0; s < steps; ++s) {
    const double t = static_cast<double>(s + 1) * h;
    Point qn(n);
    Tangent vn(n);
    try {
      const Tangent k1v = accel(q, v), k1q = v;
      const Tangent k2q = v + 0.5 * h * k1v;
      const Tangent k2v = accel(q + 0.5 * h * k1q, k2q);
      const Tangent k3q = v + 0.5 * h * k2v;
      const Tangent k3v = accel(q + 0.5 * h * k2q, k3q);
      const Tangent k4q = v + h * k3v;
      const Tangent k4v = accel(q + h * k3q, k4q);
      qn = q + h / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
      vn = v + h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    } catch (const OutOfDomainError&) {
      throw LeftDomainError(
          "geodesic left chart domain at t=" + std::to_string(t), t, q);
    }
    if (domain && !domain->contains_point(qn))
      throw LeftDomainError("geodesic left chart domain at t=" +
                                std::to_string(t),
                            t, q);
    q = qn;
    v = vn;
    path.times.push_back(t);
    path.states.push_back(q);
    path.velocities.push_back(v);
  }
  return path;
}

Eigen::MatrixXd index_free_christoffel(const Rank3& G, const Tangent& u) {
  const int n = static_cast<int>(G.size());
  Eigen::MatrixXd M(n, n);
  for (int kk = 0; kk < n; ++kk) M.row(kk) = u.transpose() * G[kk];
  return M;
}

std::vector<Eigen::MatrixXd> parallel_transport_frame(
    const AffineConnection& conn, const GeodesicPath& path,
    const Eigen::MatrixXd& F0) {
  if (path.states.size() < 2)
    throw Error("transport needs a path with at least two samples");
  if (path.velocities.size() != path.states.size())
    throw Error("transport needs a path with velocities");
  if (std::abs(F0.determinant()) < 1e-12)
    throw SingularFrameError("initial frame is singular", 0.0);

  const auto gamma = [&conn](const Point& x, const Tangent& v) {
    return index_free_christoffel(conn.christoffels_at(x), v);
  };

  std::vector<Eigen::MatrixXd> frames;
  frames.reserve(path.states.size());
  frames.push_back(F0);
  Eigen::MatrixXd F = F0;
  for (size_t i = 0; i + 1 < path.states.size(); ++i) {
    const double h = path.times[i + 1] - path.times[i];
    const Point& x0 = path.states[i];
    const Point& x1 = path.states[i + 1];
    const Tangent& v0 = path.velocities[i];
    const Tangent& v1 = path.velocities[i + 1];
    // cubic Hermite midpoint of the stored path
    const Point xm = 0.5 * (x0 + x1) + (h / 8.0) * (v0 - v1);
    const Tangent vm = 1.5 / h * (x1 - x0) - 0.25 * (v0 + v1);
    const Eigen::MatrixXd G0 = gamma(x0, v0);
    const Eigen::MatrixXd Gm = gamma(xm, vm);
    const Eigen::MatrixXd G1 = gamma(x1, v1);
    const Eigen::MatrixXd k1 = -G0 * F;
    const Eigen::MatrixXd k2 = -Gm * (F + 0.5 * h * k1);
    const Eigen::MatrixXd k3 = -Gm * (F + 0.5 * h * k2);
    const Eigen::MatrixXd k4 = -G1 * (F + h * k3);
    F += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    frames.push_back(F);
  }
  return frames;
}

Point heisenberg_exact_geodesic(const Point& x0, const Covector& p0, double t) {
  const double c = p0(2);
  const double u1 = p0(0) - 0.5 * x0(1) * c;
  const double u2 = p0(1) + 0.5 * x0(0) * c;
  const double th = c * t;
  // s1 = sin(ct)/c, s2 = (1-cos(ct))/c, s3 = (ct - sin(ct))/c^2
  double s1, s2, s3;
  if (std::abs(th) < 1e-4) {
    const double th2 = th * th;
    s1 = t * (1.0 - th2 / 6.0 + th2 * th2 / 120.0);
    s2 = c * t * t * 0.5 * (1.0 - th2 / 12.0 + th2 * th2 / 360.0);
    s3 = c * t * t * t / 6.0 * (1.0 - th2 / 20.0 + th2 * th2 / 840.0);
  } else {
    s1 = std::sin(th) / c;
    s2 = (1.0 - std::cos(th)) / c;
    s3 = (th - std::sin(th)) / (c * c);
  }
  const double xi = s1 * u1 - s2 * u2;
  const double eta = s2 * u1 + s1 * u2;
  Point out(3);
  out(0) = x0(0) + xi;
  out(1) = x0(1) + eta;
  out(2) = x0(2) + 0.5 * (x0(0) * eta - x0(1) * xi) +
           0.5 * (u1 * u1 + u2 * u2) * s3;
  return out;
}

}  // namespace srw
