#pragma once

#include <Eigen/Dense>

#include "doctest.h"
#include "srw/models.hpp"
#include "srw/rng.hpp"
#include "srw/walker.hpp"

namespace srw::testing {

inline double max_abs(const Eigen::MatrixXd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return max_abs(a - b);
}

/// Structure with the analytic jacobians and closed forms stripped, to
/// exercise the finite-difference / frame-product fallbacks.
inline std::shared_ptr<SubRiemannianStructure> strip_jacobians(
    const SubRiemannianStructure& S) {
  auto out = std::make_shared<SubRiemannianStructure>(S);
  for (auto& f : out->horizontal_frame) f.jacobian = nullptr;
  for (auto& f : out->complement_frame) f.jacobian = nullptr;
  out->cometric_closed_form = nullptr;
  out->dual_christoffels_closed_form = nullptr;
  return out;
}

/// Structure using the generic frame-product route (keeps jacobians).
inline std::shared_ptr<SubRiemannianStructure> strip_closed_forms(
    const SubRiemannianStructure& S) {
  auto out = std::make_shared<SubRiemannianStructure>(S);
  out->cometric_closed_form = nullptr;
  out->dual_christoffels_closed_form = nullptr;
  return out;
}

/// Deterministic unit horizontal vectors at the given points.
inline std::vector<std::pair<Point, Tangent>> horizontal_samples(
    const Model& model, int count, std::uint64_t seed = 99) {
  SplitMix64 rng = SplitMix64::stream(seed, 0);
  const auto pts = model.sample_points(count);
  std::vector<std::pair<Point, Tangent>> out;
  for (const Point& x : pts)
    out.emplace_back(x, sample_horizontal_unit(*model.structure, x, rng));
  return out;
}

}  // namespace srw::testing
