#pragma once

#include <vector>

#include "srw/connection.hpp"
#include "srw/structure.hpp"
#include "srw/types.hpp"

namespace srw {

/// A sampled curve in chart coordinates. Covectors / velocities / frames are
/// filled by the producing operation where meaningful.
struct GeodesicPath {
  std::vector<double> times;
  std::vector<Point> states;
  std::vector<Covector> covectors;
  std::vector<Tangent> velocities;
  std::vector<Eigen::MatrixXd> frames;
  /// max_t |H(t) - H(0)| for Hamiltonian integrations.
  double hamiltonian_drift = 0.0;

  const Point& endpoint() const { return states.back(); }
};

/// Integrates the normal-geodesic Hamiltonian system
///   dx^i/dt = g^{ij} p_j,   dp_i/dt = -(1/2) (d_i g^{jk}) p_j p_k
/// with classical fixed-step RK4. Throws LeftDomainError (with exit time and
/// last valid state) if the curve exits the chart.
GeodesicPath hamiltonian_flow(const SubRiemannianStructure& S, const Point& x0,
                              const Covector& p0, double T, double dt);

struct HamiltonianState {
  Point x;
  Covector p;
};

/// Endpoint of the same integration without recording the path; the step
/// sequence is identical to hamiltonian_flow, so endpoints agree bitwise.
HamiltonianState hamiltonian_endpoint(const SubRiemannianStructure& S,
                                      const Point& x0, const Covector& p0,
                                      double T, double dt);

/// Hamiltonian flow started from the covector of a horizontal vector u.
GeodesicPath normal_geodesic_horizontal(const SubRiemannianStructure& S,
                                        const Point& x, const Tangent& u,
                                        double T, double dt);

/// Integrates d^2x^i/dt^2 = -Gamma^i_{jk} dx^j dx^k by RK4, recording
/// velocities. `domain` may be null (no exit checks).
GeodesicPath affine_geodesic(const AffineConnection& conn, const Point& x,
                             const Tangent& u, double T, double dt,
                             const ChartDomain* domain = nullptr);

/// Index-free Christoffel matrix Gamma(u)^k_j = u^i Gamma^k_{ij}.
Eigen::MatrixXd index_free_christoffel(const Rank3& G, const Tangent& u);

/// Transports a frame along a sampled curve with velocities by integrating
/// dF/dt + Gamma(dx/dt) F = 0 with RK4; midpoint data comes from cubic
/// Hermite interpolation of the path. Returns one matrix per path sample.
std::vector<Eigen::MatrixXd> parallel_transport_frame(
    const AffineConnection& conn, const GeodesicPath& path,
    const Eigen::MatrixXd& F0);

/// Closed-form normal geodesic of the Heisenberg model, used as an oracle.
/// For p_z = c != 0 the (x,y) motion is circular with angular rate c and z
/// follows the swept-area integral; series expansions guard small |c t|.
Point heisenberg_exact_geodesic(const Point& x0, const Covector& p0, double t);

}  // namespace srw
