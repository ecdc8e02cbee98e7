#include "srw/connection.hpp"

#include <cmath>

#include "srw/models.hpp"
#include "test_helpers.hpp"

using namespace srw;
using namespace srw::testing;

namespace {

AffineConnection random_christoffel_connection(std::uint64_t seed) {
  AffineConnection conn;
  conn.label = "random";
  conn.christoffels = [seed](const Point& x) {
    SplitMix64 rng = SplitMix64::stream(seed, 7);
    const int n = static_cast<int>(x.size());
    Rank3 G(n, Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          G[i](j, k) = (rng.next_double() - 0.5) +
                       0.3 * std::sin(x(i % n)) * rng.next_double();
    return G;
  };
  return conn;
}

}  // namespace

TEST_CASE("torsion") {
  const Point x = Eigen::Vector3d(0.2, -0.1, 0.4);

  SUBCASE("vanishes for symmetric Christoffel tables") {
    AffineConnection conn;
    conn.christoffels = [](const Point&) {
      Rank3 G(3, Eigen::MatrixXd::Zero(3, 3));
      G[0] << 1, 2, 3, 2, 5, 6, 3, 6, 9;
      G[1] = G[0];
      G[2] = 0.5 * G[0];
      return G;
    };
    for (const auto& Ti : torsion(conn, x)) CHECK(max_abs(Ti) == 0.0);
  }
  SUBCASE("antisymmetry is exact for random tables") {
    const AffineConnection conn = random_christoffel_connection(5);
    for (const auto& Ti : torsion(conn, x))
      CHECK(max_abs_diff(Ti, -Ti.transpose()) == 0.0);
  }
  SUBCASE("frame-parallel Heisenberg torsion is -dz on (E1, E2)") {
    const Model m = heisenberg();
    const auto& fp = m.connection("frame-parallel");
    const Rank3 T = torsion(fp, x);
    const Tangent t12 = torsion_apply(T, m.structure->horizontal_frame[0].value(x),
                                      m.structure->horizontal_frame[1].value(x));
    CHECK(max_abs_diff(t12, Eigen::Vector3d(0, 0, -1)) <= 1e-12);
  }
}

TEST_CASE("adjoint connection") {
  const Point x = Eigen::Vector3d(0.1, 0.3, -0.2);
  const AffineConnection conn = random_christoffel_connection(11);

  SUBCASE("double adjoint is the identity on tables") {
    const Rank3 a = conn.christoffels_at(x);
    const Rank3 b = adjoint(adjoint(conn)).christoffels_at(x);
    for (size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a[i], b[i]) == 0.0);
  }
  SUBCASE("torsion-free connections are self-adjoint") {
    const auto flat = euclidean(3).connection("flat");
    const Rank3 a = flat.christoffels_at(x);
    const Rank3 b = adjoint(flat).christoffels_at(x);
    for (size_t i = 0; i < a.size(); ++i) CHECK(max_abs_diff(a[i], b[i]) == 0.0);
  }
  SUBCASE("adjoint negates torsion") {
    const Model m = heisenberg();
    const auto adj = adjoint(m.connection("frame-parallel"));
    const Tangent t12 =
        torsion_apply(torsion(adj, x), m.structure->horizontal_frame[0].value(x),
                      m.structure->horizontal_frame[1].value(x));
    CHECK(max_abs_diff(t12, Eigen::Vector3d(0, 0, 1)) <= 1e-12);
  }
}

TEST_CASE("covariant derivative") {
  const Model m = heisenberg();
  const Point x = Eigen::Vector3d(0.25, -0.35, 0.15);

  SUBCASE("flat connection, constant field") {
    const auto flat = m.connection("flat");
    VectorFieldSpec X, Y;
    X.value = [](const Point&) { return Tangent{Eigen::Vector3d(1, 2, 3)}; };
    Y.value = [](const Point&) { return Tangent{Eigen::Vector3d(-1, 0, 2)}; };
    CHECK(covariant_derivative(flat, x, X, Y).lpNorm<Eigen::Infinity>() <= 1e-9);
  }
  SUBCASE("frame fields are parallel for the frame-parallel connection") {
    const auto& fp = m.connection("frame-parallel");
    VectorFieldSpec X;
    X.value = [](const Point& y) {
      return Tangent{Eigen::Vector3d(y(1), -0.5 + y(2), 1.0)};
    };
    for (const auto& E : m.structure->horizontal_frame)
      CHECK(covariant_derivative(fp, x, X, E).lpNorm<Eigen::Infinity>() <= 1e-8);
  }
  SUBCASE("Leibniz rule in the second argument") {
    const auto& fp = m.connection("frame-parallel");
    VectorFieldSpec X, Y, phiY;
    X.value = [](const Point& y) {
      return Tangent{Eigen::Vector3d(1.0, y(0), -y(1))};
    };
    Y.value = [](const Point& y) {
      return Tangent{Eigen::Vector3d(y(1) * y(1), 1.0, y(0))};
    };
    phiY.value = [&](const Point& y) { return Tangent{y(0) * Y.value(y)}; };
    const Tangent lhs = covariant_derivative(fp, x, X, phiY);
    const Tangent rhs =
        x(0) * covariant_derivative(fp, x, X, Y) + X.value(x)(0) * Y.value(x);
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() <= 1e-7);
  }
}

TEST_CASE("compatibility predicate") {
  const Model heis = heisenberg();
  const auto samples = heis.sample_points(40);

  const auto fp_report =
      is_compatible(heis.connection("frame-parallel"), *heis.structure, samples, 1e-10);
  CHECK(fp_report.holds);
  CHECK(fp_report.max_residual <= 1e-10);

  const Model eu = euclidean(3);
  const auto eu_samples = eu.sample_points(20);
  CHECK(is_compatible(eu.connection("flat"), *eu.structure, eu_samples, 1e-12).holds);

  const auto flat_report =
      is_compatible(heis.connection("flat"), *heis.structure, samples, 1e-8);
  CHECK_FALSE(flat_report.holds);
  // nabla_{dx} E_2 = (1/2) dz: complement coefficient 1/2
  CHECK(flat_report.max_residual == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("normality predicate") {
  const Model heis = heisenberg();
  const auto samples = heis.sample_points(40);
  const auto& fp = heis.connection("frame-parallel");

  CHECK(is_normal(adjoint(fp), *heis.structure, samples, 1e-10).holds);
  // a connection cannot be both compatible and normal unless H is integrable
  CHECK_FALSE(is_normal(fp, *heis.structure, samples, 1e-8).holds);

  const Model eu = euclidean(3);
  CHECK(is_normal(eu.connection("flat"), *eu.structure, eu.sample_points(20), 1e-12)
            .holds);

  CHECK_FALSE(is_normal(heis.connection("flat"), *heis.structure, samples, 1e-8).holds);
}

TEST_CASE("dynamic normality check against the Hamiltonian flow") {
  const Model heis = heisenberg();
  const auto normal_conn = adjoint(heis.connection("frame-parallel"));
  const Point x0 = Eigen::Vector3d::Zero();
  const Covector p0 = Eigen::Vector3d(1.0, 0.0, 1.0);  // generic covector flow
  CHECK(autoparallel_vs_hamiltonian(normal_conn, *heis.structure, x0, p0, 1.0,
                                    1e-3) <= 1e-9);
  CHECK(autoparallel_vs_hamiltonian(heis.connection("flat"), *heis.structure,
                                    x0, p0, 1.0, 1e-3) > 1e-2);
}

TEST_CASE("frame-parallel connection properties") {
  SUBCASE("Euclidean coordinate frame gives zero Christoffels") {
    const Model eu = euclidean(3);
    const Rank3 G =
        eu.connection("frame-parallel").christoffels_at(Eigen::Vector3d(0.2, 0.5, -0.3));
    for (const auto& Gi : G) CHECK(max_abs(Gi) <= 1e-14);
  }
  SUBCASE("all frame fields are parallel on every model") {
    for (const char* name : {"heisenberg", "twisted", "ellipsoid"}) {
      const Model m = make_model(name);
      const auto& fp = m.connection("frame-parallel");
      VectorFieldSpec X;
      X.value = [&m](const Point& y) {
        Tangent v = Eigen::VectorXd::Ones(m.n);
        v(0) = std::cos(y(0));
        return v;
      };
      for (const Point& x : m.sample_points(10)) {
        for (const auto& E : m.structure->horizontal_frame)
          CHECK(covariant_derivative(fp, x, X, E).lpNorm<Eigen::Infinity>() <=
                1e-8);
        for (const auto& V : m.structure->complement_frame)
          CHECK(covariant_derivative(fp, x, X, V).lpNorm<Eigen::Infinity>() <=
                1e-8);
      }
    }
  }
}

TEST_CASE("kappa correction") {
  SUBCASE("Heisenberg frame-parallel is already vertical-torsion, kappa is zero") {
    const Model m = heisenberg();
    const auto& fp = m.connection("frame-parallel");
    const auto& kc = m.connection("kappa-corrected");
    for (const Point& x : m.sample_points(10)) {
      const Rank3 a = fp.christoffels_at(x);
      const Rank3 b = kc.christoffels_at(x);
      for (int i = 0; i < m.n; ++i) CHECK(max_abs_diff(a[i], b[i]) <= 1e-12);
    }
  }
  SUBCASE("twisted model needs and gets the correction") {
    const Model m = twisted();
    const auto samples = m.sample_points(60);
    const auto& fp = m.connection("frame-parallel");
    const auto& kc = m.connection("kappa-corrected");
    CHECK_FALSE(horizontal_torsion_vertical(fp, *m.structure, samples, 1e-8).holds);
    CHECK(is_compatible(kc, *m.structure, samples, 1e-8).holds);
    CHECK(horizontal_torsion_vertical(kc, *m.structure, samples, 1e-8).holds);
  }
  SUBCASE("kappa operator is skew-symmetric in h") {
    const Model m = twisted();
    const auto& S = *m.structure;
    const auto& fp = m.connection("frame-parallel");
    const auto& kc = m.connection("kappa-corrected");
    for (const Point& x : m.sample_points(6)) {
      const Rank3 a = fp.christoffels_at(x);
      const Rank3 b = kc.christoffels_at(x);
      const Eigen::MatrixXd W = S.full_frame_matrix(x);
      for (int j = 0; j < m.n; ++j) {
        Eigen::MatrixXd kappa_j(m.n, m.n);
        for (int i = 0; i < m.n; ++i) kappa_j.row(i) = b[i].row(j) - a[i].row(j);
        for (int p = 0; p < m.k; ++p)
          for (int q = 0; q < m.k; ++q) {
            const double hpq =
                S.horizontal_inner(x, kappa_j * W.col(p), W.col(q));
            const double hqp =
                S.horizontal_inner(x, kappa_j * W.col(q), W.col(p));
            CHECK(std::abs(hpq + hqp) <= 1e-10);
          }
      }
    }
  }
  SUBCASE("on a Riemannian surface the correction recovers Levi-Civita") {
    const Model m = ellipsoid_surface();
    const auto& kc = m.connection("kappa-corrected");
    const auto& lc = m.connection("levi-civita");
    for (const Point& x : m.sample_points(10)) {
      const Rank3 a = kc.christoffels_at(x);
      const Rank3 b = lc.christoffels_at(x);
      for (int i = 0; i < m.n; ++i) CHECK(max_abs_diff(a[i], b[i]) <= 1e-10);
    }
  }
  SUBCASE("incompatible references are rejected") {
    const Model m = heisenberg();
    const auto samples = m.sample_points(20);
    CHECK_THROWS_AS(kappa_correction(m.structure, m.connection("flat"), samples),
                    NotCompatibleError);
  }
}

TEST_CASE("adjoint equivalence on built-in connections") {
  for (const char* name : {"euclidean2", "heisenberg", "twisted", "ellipsoid"}) {
    const Model m = make_model(name);
    const auto samples = m.sample_points(30);
    for (const char* conn_name : {"frame-parallel", "kappa-corrected"}) {
      const auto& conn = m.connection(conn_name);
      const auto compat = is_compatible(conn, *m.structure, samples, 1e-8);
      CHECK(compat.holds);
      // compatible <=> adjoint is normal
      CHECK(is_normal(adjoint(conn), *m.structure, samples, 1e-8).holds);
    }
  }
}
