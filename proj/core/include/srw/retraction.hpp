#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "srw/connection.hpp"
#include "srw/geodesics.hpp"
#include "srw/structure.hpp"
#include "srw/types.hpp"

namespace srw {

enum class RetractionKind { ExactExp, Ret1, Ret2, Ret3, Ret3Prime };

const char* retraction_kind_name(RetractionKind kind);

/// An evaluable retraction. Ret2/Ret3/Ret3Prime carry a connection
/// (Levi-Civita for the frame retractions); Ret3Prime carries the
/// anisotropy matrix A. ExactExp integrates normal geodesics with target
/// step exp_dt (the actual step divides t evenly).
struct RetractionSpec {
  RetractionKind kind = RetractionKind::ExactExp;
  std::shared_ptr<const SubRiemannianStructure> structure;
  std::optional<AffineConnection> connection;
  Eigen::MatrixXd anisotropy;  // Ret3Prime only; empty means identity
  double exp_dt = 1e-3;

  const SubRiemannianStructure& S() const { return *structure; }
};

/// Base-point evaluation: smooth in t, retract(R,x,u,0) == x exactly,
/// d/dt at 0 equals u.
Point retract(const RetractionSpec& R, const Point& x, const Tangent& u,
              double t);

struct FramePoint {
  Point x;
  Eigen::MatrixXd frame;
};

/// Frame evaluation for Ret3 / Ret3Prime (polynomial transport + polar
/// re-orthonormalization) and ExactExp (geodesic + ODE transport).
FramePoint retract_frame(const RetractionSpec& R, const Point& x,
                         const Eigen::MatrixXd& F, const Tangent& u, double t);

/// || F^T g F - Id ||_inf, or the F_A-membership residual when A is given.
double frame_orthonormality_residual(const Eigen::MatrixXd& g,
                                     const Eigen::MatrixXd& F,
                                     const Eigen::MatrixXd* A = nullptr);

struct OrderSample {
  Point x;
  Tangent u;
  Eigen::MatrixXd frame;  // empty unless frame retraction
};

struct OrderTestResult {
  /// Least-squares slope of log(max error) vs log t over grid entries above
  /// the floor. NaN (and at_floor = true) when fewer than two entries
  /// survive, i.e. agreement is below measurement precision.
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool at_floor = false;
  std::vector<double> t_grid;
  std::vector<double> max_errors;            // per t, max across samples
  std::vector<std::vector<double>> errors;   // [sample][t]

  bool passes(double threshold) const {
    return at_floor || slope >= threshold;
  }
};

/// Generic order-verification harness: error_fn(sample, t) measures the
/// chart-coordinate max-norm deviation from an oracle.
OrderTestResult order_test(
    const std::function<double(const OrderSample&, double)>& error_fn,
    const std::vector<OrderSample>& samples, const std::vector<double>& t_grid,
    double floor = kOrderErrorFloor);

/// Point-retraction order test against an oracle map (x,u,t) -> point.
OrderTestResult order_test_points(
    const RetractionSpec& R,
    const std::function<Point(const Point&, const Tangent&, double)>& oracle,
    const std::vector<OrderSample>& samples,
    const std::vector<double>& t_grid);

/// Joint point+frame order test against an oracle (x,F,u,t) -> FramePoint.
OrderTestResult order_test_frames(
    const RetractionSpec& R,
    const std::function<FramePoint(const OrderSample&, double)>& oracle,
    const std::vector<OrderSample>& samples,
    const std::vector<double>& t_grid);

/// Default geometric grid {1e-1, 10^-1.5, 1e-2, 10^-2.5, 1e-3}.
std::vector<double> default_order_grid();

}  // namespace srw
