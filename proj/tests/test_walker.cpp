#include "srw/walker.hpp"

#include <cmath>
#include <set>

#include "srw/models.hpp"
#include "test_helpers.hpp"

using namespace srw;
using namespace srw::testing;

namespace {

RetractionSpec spec_for(const Model& m, RetractionKind kind,
                        const std::string& conn = "") {
  RetractionSpec R;
  R.kind = kind;
  R.structure = m.structure;
  if (!conn.empty()) R.connection = m.connection(conn);
  return R;
}

}  // namespace

TEST_CASE("horizontal sphere sampling") {
  SUBCASE("unit h-norm and horizontality") {
    const Model m = heisenberg();
    SplitMix64 rng = SplitMix64::stream(3, 0);
    for (const Point& x : m.sample_points(20)) {
      const Tangent u = sample_horizontal_unit(*m.structure, x, rng);
      const Eigen::VectorXd c = m.structure->frame_coefficients(x, u);
      CHECK(std::abs(c.head(m.k).norm() - 1.0) <= 1e-12);
      CHECK(c.tail(m.n - m.k).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
  }
  SUBCASE("rank one gives the two unit points") {
    const Model m = euclidean(1);
    SplitMix64 rng = SplitMix64::stream(11, 0);
    std::set<double> seen;
    for (int i = 0; i < 50; ++i)
      seen.insert(sample_horizontal_unit(*m.structure, m.start, rng)(0));
    CHECK(seen == std::set<double>{-1.0, 1.0});
  }
  SUBCASE("empirical mean and coefficient covariance") {
    const Model m = heisenberg();
    const Point x = Eigen::Vector3d(0.2, -0.1, 0.3);
    SplitMix64 rng = SplitMix64::stream(17, 0);
    const int draws = 100000;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (int i = 0; i < draws; ++i) {
      const Tangent u = sample_horizontal_unit(*m.structure, x, rng);
      const Eigen::Vector2d c =
          m.structure->frame_coefficients(x, u).head(2);
      mean += c;
      cov += c * c.transpose();
    }
    mean /= draws;
    cov /= draws;
    CHECK(mean.norm() <= 0.02);
    CHECK(max_abs_diff(cov, 0.5 * Eigen::Matrix2d::Identity()) <= 0.02);
  }
}

TEST_CASE("walk configuration is validated") {
  const Model m = euclidean(2);
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::Ret1);
  config.initial = m.start;
  config.steps = 0;
  CHECK_THROWS_AS(walk(config), ConfigError);
  config.steps = 10;
  config.epsilon = -1.0;
  CHECK_THROWS_AS(walk(config), ConfigError);
  config.epsilon = 0.1;
  config.initial = Eigen::Vector3d::Zero();  // wrong dimension
  CHECK_THROWS_AS(walk(config), ConfigError);
}

TEST_CASE("a single Euclidean step is the sampled direction times the step time") {
  const Model m = euclidean(2);
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::Ret1);
  config.initial = m.start;
  config.steps = 1;
  config.epsilon = 0.25;
  config.seed = 7;
  const auto paths = walk(config);
  REQUIRE(paths.size() == 1);
  REQUIRE(paths[0].records.size() == 2);

  SplitMix64 rng = SplitMix64::stream(7, 0);
  const Tangent u = sample_horizontal_unit(*m.structure, m.start, rng);
  const Point expected = m.start + walk_step_time(0.25, 2) * u;
  CHECK(max_abs_diff(paths[0].records[1].x, expected) == 0.0);
}

TEST_CASE("walks are deterministic across thread counts and reruns") {
  const Model m = heisenberg();
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::Ret1);
  config.initial = m.start;
  config.steps = 200;
  config.epsilon = 0.05;
  config.seed = 99;
  config.replicas = 8;

  config.threads = 1;
  const auto serial = walk(config);
  config.threads = 4;
  const auto parallel = walk(config);
  const auto again = walk(config);
  REQUIRE(serial.size() == parallel.size());
  for (size_t r = 0; r < serial.size(); ++r) {
    REQUIRE(serial[r].records.size() == parallel[r].records.size());
    for (size_t i = 0; i < serial[r].records.size(); ++i) {
      CHECK(max_abs_diff(serial[r].records[i].x, parallel[r].records[i].x) ==
            0.0);
      CHECK(max_abs_diff(serial[r].records[i].x, again[r].records[i].x) == 0.0);
    }
  }
}

TEST_CASE("chart exits censor the replica instead of throwing") {
  const Model m = ellipsoid_surface();
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::Ret2, "levi-civita");
  config.initial = Eigen::Vector2d(0.0, 0.12);  // near the pole band
  config.steps = 400;
  config.epsilon = 0.05;
  config.seed = 5;
  config.replicas = 4;
  const auto paths = walk(config);
  int censored = 0;
  for (const auto& p : paths)
    if (p.status == WalkStatus::left_domain) {
      ++censored;
      CHECK(p.exit_step >= 1);
      CHECK(m.structure->domain.contains_point(p.records.back().x));
    }
  CHECK(censored > 0);

  const std::vector<NamedScalarField> fs = {{"s", make_probe("quad_xy", 2)}};
  const auto rows = moment_statistics(paths, fs, {0.0}, config.epsilon);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].excluded == censored);
  CHECK(rows[0].used == 4 - censored);
}

TEST_CASE("transition operator") {
  SUBCASE("epsilon zero returns f") {
    const Model m = heisenberg();
    const ScalarFieldSpec f = make_probe("quad_xy", 3);
    const Point x = Eigen::Vector3d(0.1, 0.2, 0.0);
    CHECK(transition_operator(spec_for(m, RetractionKind::Ret1), f, x, 0.0, {})
              .value == f.value(x));
  }
  SUBCASE("odd integrands average away on Euclidean charts") {
    const Model m = euclidean(2);
    ScalarFieldSpec f;
    f.value = [](const Point& x) { return 3.0 * x(0) - 0.5 * x(1); };
    const Point x = Eigen::Vector2d(0.4, -0.2);
    const auto U =
        transition_operator(spec_for(m, RetractionKind::Ret1), f, x, 0.1, {});
    CHECK(std::abs(U.value - f.value(x)) <= 1e-14);
  }
  SUBCASE("Heisenberg quadratic probe at the origin") {
    const Model m = heisenberg();
    const ScalarFieldSpec f = make_probe("quad_xy", 3);
    for (const double eps : {0.1, 0.01}) {
      const auto U = transition_operator(spec_for(m, RetractionKind::ExactExp),
                                         f, m.start, eps, {});
      CHECK(std::abs(U.value - 4.0 * eps * eps) <= 1e-12);
    }
  }
  SUBCASE("quadrature nodes leaving the chart raise LeftDomain") {
    const Model m = ellipsoid_surface();
    const ScalarFieldSpec f = make_probe("quad_xy", 2);
    const Point near_pole = Eigen::Vector2d(0.0, 0.2);
    CHECK_THROWS_AS(
        transition_operator(spec_for(m, RetractionKind::Ret2, "levi-civita"),
                            f, near_pole, 0.5, {}),
        LeftDomainError);
  }
}

TEST_CASE("generator estimates") {
  const std::vector<double> eps_grid = {0.2, 0.1, 0.05, 0.025, 0.0125};

  SUBCASE("Euclidean quadratic probes are exact at every epsilon") {
    const Model m = euclidean(2);
    GeneratorProbe probe;
    probe.f = make_probe("quad_xy", 2);
    probe.base_points = default_probe_points(m);
    probe.epsilons = eps_grid;
    const auto table =
        generator_estimate(spec_for(m, RetractionKind::Ret1), probe);
    CHECK(table.at_floor);
    for (const auto& row : table.rows) {
      CHECK(row.target == doctest::Approx(4.0).epsilon(1e-12));
      CHECK(row.abs_error <= 1e-12);
    }
  }
  SUBCASE("Heisenberg quadratic probes sit at the floor for exact walks") {
    // straight-line geodesics + quadratic f + exact circle quadrature
    const Model m = heisenberg();
    GeneratorProbe probe;
    probe.f = make_probe("quad_xy", 3);
    probe.base_points = default_probe_points(m);
    probe.epsilons = eps_grid;
    for (const auto& [kind, conn] :
         std::vector<std::pair<RetractionKind, std::string>>{
             {RetractionKind::ExactExp, ""},
             {RetractionKind::Ret1, ""},
             {RetractionKind::Ret2, "kappa-corrected"}}) {
      const auto table = generator_estimate(spec_for(m, kind, conn), probe);
      CHECK(table.at_floor);
      for (const auto& row : table.rows) {
        CHECK(row.target == doctest::Approx(4.0).epsilon(1e-10));
        CHECK(std::abs(row.l_value - 4.0) <= 1e-9);
      }
    }
  }
  SUBCASE("bump probe shows real convergence on Heisenberg") {
    const Model m = heisenberg();
    GeneratorProbe probe;
    probe.f = make_probe("bump", 3);
    probe.base_points = default_probe_points(m);
    probe.epsilons = eps_grid;
    probe.quadrature.nodes = 16;
    const auto table =
        generator_estimate(spec_for(m, RetractionKind::Ret1), probe);
    CHECK_FALSE(table.at_floor);
    CHECK(table.slope >= 0.8);
    // monotone nonincreasing within 10% above the floor
    for (size_t i = 1; i < table.max_errors.size(); ++i)
      if (table.max_errors[i] > kGeneratorErrorFloor)
        CHECK(table.max_errors[i] <= 1.1 * table.max_errors[i - 1]);
    double max_target = 0.0;
    for (const auto& row : table.rows)
      max_target = std::max(max_target, std::abs(row.target));
    CHECK(table.max_errors.back() <= 0.1 * max_target + 1e-3);
  }
  SUBCASE("deterministic circle quadrature reproduces Monte Carlo") {
    const Model m = heisenberg();
    const ScalarFieldSpec f = make_probe("bump", 3);
    const Point x = Eigen::Vector3d(0.2, 0.1, 0.0);
    const double eps = 0.05;
    const RetractionSpec R = spec_for(m, RetractionKind::Ret1);
    Quadrature det;
    det.nodes = 16;
    const auto exact = transition_operator(R, f, x, eps, det);
    Quadrature mc;
    mc.kind = Quadrature::Kind::montecarlo;
    mc.samples = 1000000;
    mc.seed = 31;
    const auto sampled = transition_operator(R, f, x, eps, mc);
    CHECK(sampled.std_error > 0.0);
    CHECK(std::abs(sampled.value - exact.value) <= 3.0 * sampled.std_error);
  }
  SUBCASE("probe validation") {
    const Model m = heisenberg();
    GeneratorProbe probe;
    probe.f = make_probe("quad_xy", 3);
    probe.base_points = default_probe_points(m);
    probe.epsilons = {0.1, 0.2};  // not decreasing
    CHECK_THROWS_AS(generator_estimate(spec_for(m, RetractionKind::Ret1), probe),
                    ConfigError);
    probe.epsilons = eps_grid;
    probe.quadrature.nodes = 4;
    CHECK_THROWS_AS(generator_estimate(spec_for(m, RetractionKind::Ret1), probe),
                    ConfigError);
  }
}

TEST_CASE("time-scaled sampling") {
  const Model m = euclidean(2);
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::Ret1);
  config.initial = m.start;
  config.steps = 100;
  config.epsilon = 0.1;
  config.seed = 2;
  const auto paths = walk(config);
  const WalkPath& p = paths[0];

  CHECK(time_scaled_sample(p, 0.1, 0.0).step == 0);
  CHECK(time_scaled_sample(p, 0.1, 0.01).step == 1);
  CHECK(time_scaled_sample(p, 0.1, 1.0).step == 100);
  CHECK_THROWS_AS(time_scaled_sample(p, 0.1, 1.2), HorizonExceededError);

  WalkConfig sparse = config;
  sparse.record_every = 10;
  const auto sp = walk(sparse);
  CHECK(time_scaled_sample(sp[0], 0.1, 0.1).step == 10);
  CHECK_THROWS_AS(time_scaled_sample(sp[0], 0.1, 0.05), Error);
}

TEST_CASE("moment statistics on the Heisenberg walk") {
  const Model m = heisenberg();
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::ExactExp);
  config.retraction.exp_dt = 2e-3;
  config.initial = m.start;
  config.epsilon = 0.02;
  config.steps = 625;  // horizon t = 0.25
  config.seed = 7;
  config.replicas = 400;
  config.record_every = 625;
  const auto paths = walk(config);

  std::vector<NamedScalarField> fs;
  fs.push_back({"x", make_probe("coord_z", 3)});
  fs.back().f.value = [](const Point& x) { return x(0); };
  fs.push_back({"r2", make_probe("quad_xy", 3)});
  const auto rows = moment_statistics(paths, fs, {0.25}, config.epsilon);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].excluded == 0);
  // odd moment vanishes by symmetry of the limit law
  CHECK(std::abs(rows[0].mean) <= 3.0 * rows[0].std_error);
  // Dynkin: d/dt E[x^2+y^2] = 4, so the mean at t = 0.25 is near 1
  CHECK(std::abs(rows[1].mean - 1.0) <= 3.0 * rows[1].std_error);
}

TEST_CASE("frame-bundle walk keeps anisotropic membership") {
  const Model m = make_model("ellipsoid-frames");
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::Ret3Prime, "levi-civita");
  config.retraction.anisotropy = m.anisotropy;
  config.initial = m.start;
  config.initial_frame = m.initial_frame;
  config.epsilon = 0.05;
  config.steps = 2000;
  config.seed = kFigureRegimeSeed;
  const auto paths = walk(config);
  REQUIRE(paths.size() == 1);
  const auto& p = paths[0];
  REQUIRE(p.status == WalkStatus::completed);
  const auto& last = p.records.back();
  const Eigen::MatrixXd A = m.anisotropy;
  CHECK(frame_orthonormality_residual(m.structure->metric_at(last.x),
                                      last.frame, &A) <= 1e-9);
}
