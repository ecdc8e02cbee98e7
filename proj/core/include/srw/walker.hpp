#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "srw/retraction.hpp"
#include "srw/rng.hpp"
#include "srw/structure.hpp"

namespace srw {

/// Step duration of the sub-Riemannian point walk: eps * sqrt(2k), so one
/// step has horizontal covariance 2 eps^2 h and the eps^2-clock walk
/// generates the sub-Laplacian (not half of it). The transition operator
/// uses the same step.
double walk_step_time(double epsilon, int k);

/// Step duration of the frame-bundle walk: eps * sqrt(n), the algorithm's
/// literal constant. Frame experiments are gated on completion and frame
/// membership rather than on moment targets.
double frame_walk_step_time(double epsilon, int n);

struct WalkConfig {
  RetractionSpec retraction;
  double epsilon = 0.05;
  long steps = 1000;
  std::uint64_t seed = 0;
  Point initial;
  Eigen::MatrixXd initial_frame;  // nonempty selects a frame-bundle walk
  int replicas = 1;
  long record_every = 1;
  int threads = 0;  // 0 = hardware concurrency

  bool frame_walk() const { return initial_frame.size() != 0; }
  void validate() const;
};

struct WalkRecord {
  long step = 0;
  Point x;
  Eigen::MatrixXd frame;  // empty for point walks
};

enum class WalkStatus { completed, left_domain };

struct WalkPath {
  std::vector<WalkRecord> records;
  WalkStatus status = WalkStatus::completed;
  long exit_step = -1;  // step index that failed, when censored

  const WalkRecord* find(long step) const;
};

/// Uniform unit horizontal vector: k standard normals on the orthonormal
/// frame coefficients, normalized. ||result||_h = 1 to roundoff.
Tangent sample_horizontal_unit(const SubRiemannianStructure& S, const Point& x,
                               SplitMix64& rng);

/// Uniform unit vector on the Euclidean sphere S^{n-1}.
Eigen::VectorXd sample_euclidean_unit(int n, SplitMix64& rng);

/// Runs all replicas (in parallel; replica r uses stream(seed, r)).
/// Chart exits are recorded as status left_domain, not thrown.
std::vector<WalkPath> walk(const WalkConfig& config);

struct Quadrature {
  enum class Kind { deterministic, montecarlo };
  Kind kind = Kind::deterministic;
  int nodes = 32;             // deterministic circle nodes (k == 2)
  long samples = 100000;      // Monte Carlo draws (k >= 3)
  std::uint64_t seed = 1234;  // Monte Carlo stream seed
};

struct TransitionValue {
  double value = 0.0;
  double std_error = 0.0;  // zero for deterministic quadrature
};

/// (U^eps f)(x): spherical average of f after one walking step.
/// Deterministic quadrature for k <= 2, Monte Carlo otherwise.
TransitionValue transition_operator(const RetractionSpec& R,
                                    const ScalarFieldSpec& f, const Point& x,
                                    double epsilon, const Quadrature& quad);

struct GeneratorProbe {
  ScalarFieldSpec f;
  std::vector<Point> base_points;
  std::vector<double> epsilons;  // strictly decreasing
  Quadrature quadrature;

  void validate() const;
};

struct GeneratorRow {
  int point_index = 0;
  double epsilon = 0.0;
  double l_value = 0.0;   // L^eps f(x)
  double target = 0.0;    // Delta^V f(x)
  double abs_error = 0.0;
};

struct GeneratorTable {
  std::vector<GeneratorRow> rows;
  std::vector<double> max_errors;  // per epsilon, max over base points
  /// Slope of log(max error) vs log(eps); NaN with at_floor when the errors
  /// never rise above the quadrature roundoff floor.
  double slope = std::numeric_limits<double>::quiet_NaN();
  bool at_floor = false;

  bool passes(double threshold) const { return at_floor || slope >= threshold; }
};

/// Tabulates L^eps f = (U^eps f - f)/eps^2 against the sub-Laplacian.
GeneratorTable generator_estimate(const RetractionSpec& R,
                                  const GeneratorProbe& probe);

/// State at walk index floor(t / eps^2). Throws HorizonExceededError past the
/// end of the walk, Error if that index was not recorded.
const WalkRecord& time_scaled_sample(const WalkPath& path, double epsilon,
                                     double t);

struct MomentRow {
  std::string name;
  double t = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double std_error = 0.0;
  int used = 0;
  int excluded = 0;
};

struct NamedScalarField {
  std::string name;
  ScalarFieldSpec f;
};

/// Per-(f, t) empirical means over completed replicas; censored replicas are
/// excluded and counted.
std::vector<MomentRow> moment_statistics(const std::vector<WalkPath>& paths,
                                         const std::vector<NamedScalarField>& fs,
                                         const std::vector<double>& ts,
                                         double epsilon);

/// Built-in probe functions: quad_xy = x1^2 + x2^2, coord_z = x3,
/// bump = exp(1 - 1/(1 - |x|^2)) inside the unit ball, 0 outside.
ScalarFieldSpec make_probe(const std::string& name, int n);
std::vector<std::string> probe_names();

}  // namespace srw
