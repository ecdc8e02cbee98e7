#include "srw/models.hpp"

#include <cmath>

namespace srw {

namespace {

constexpr double kTwistMu = 0.3;
constexpr double kPoleBand = 0.05;

VectorFieldSpec constant_field(const Eigen::VectorXd& v) {
  const int n = static_cast<int>(v.size());
  VectorFieldSpec f;
  f.value = [v](const Point&) { return v; };
  f.jacobian = [n](const Point&) { return Eigen::MatrixXd::Zero(n, n).eval(); };
  return f;
}

void attach_standard_connections(Model& model, int halton_count = 60) {
  const auto samples = model.sample_points(halton_count);
  AffineConnection fp = frame_parallel_connection(model.structure);
  AffineConnection kc =
      kappa_correction(model.structure, fp, samples,
                       model.analytic_jacobians ? 1e-7 : 1e-5);
  kc.label = "kappa-corrected";
  AffineConnection flat;
  flat.label = "flat";
  const int n = model.n;
  flat.christoffels = [n](const Point&) {
    return Rank3(n, Eigen::MatrixXd::Zero(n, n));
  };
  flat.christoffel_gradient = [n](const Point&) {
    return std::vector<Rank3>(n, Rank3(n, Eigen::MatrixXd::Zero(n, n)));
  };
  model.connections.emplace_back("frame-parallel", std::move(fp));
  model.connections.emplace_back("kappa-corrected", std::move(kc));
  model.connections.emplace_back("flat", std::move(flat));
}

}  // namespace

const AffineConnection& Model::connection(const std::string& conn_name) const {
  for (const auto& [cname, conn] : connections)
    if (cname == conn_name) return conn;
  std::string names;
  for (const auto& [cname, conn] : connections)
    names += (names.empty() ? "" : ", ") + cname;
  throw ConfigError("model '" + name + "' has no connection '" + conn_name +
                    "' (available: " + names + ")");
}

bool Model::has_connection(const std::string& conn_name) const {
  for (const auto& [cname, conn] : connections)
    if (cname == conn_name) return true;
  return false;
}

std::vector<Point> Model::sample_points(int count) const {
  return halton_points(sample_lo, sample_hi, count);
}

Model euclidean(int n) {
  if (n < 1) throw ConfigError("euclidean model needs n >= 1");
  Model model;
  model.name = "euclidean" + std::to_string(n);
  model.n = model.k = n;
  auto S = std::make_shared<SubRiemannianStructure>();
  S->n = S->k = n;
  for (int i = 0; i < n; ++i)
    S->horizontal_frame.push_back(constant_field(Eigen::VectorXd::Unit(n, i)));
  S->metric = [n](const Point&) { return Eigen::MatrixXd::Identity(n, n).eval(); };
  S->cometric_closed_form = [n](const Point&) {
    return Eigen::MatrixXd::Identity(n, n).eval();
  };
  S->dual_christoffels_closed_form = [n](const Point&) {
    return Rank3(n, Eigen::MatrixXd::Zero(n, n));
  };
  model.structure = S;
  model.sample_lo = Eigen::VectorXd::Constant(n, -1.0);
  model.sample_hi = Eigen::VectorXd::Constant(n, 1.0);
  model.start = Eigen::VectorXd::Zero(n);
  model.analytic_jacobians = true;
  model.default_connection = "flat";
  attach_standard_connections(model);
  // the coordinate frame is parallel for the flat connection already
  AffineConnection lc = model.connection("flat");
  lc.label = "levi-civita";
  model.connections.emplace_back("levi-civita", std::move(lc));
  return model;
}

Model heisenberg() {
  Model model;
  model.name = "heisenberg";
  model.n = 3;
  model.k = 2;
  auto S = std::make_shared<SubRiemannianStructure>();
  S->n = 3;
  S->k = 2;
  VectorFieldSpec e1;
  e1.value = [](const Point& x) {
    return Tangent{Eigen::Vector3d(1.0, 0.0, -0.5 * x(1))};
  };
  e1.jacobian = [](const Point&) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    J(2, 1) = -0.5;
    return J;
  };
  VectorFieldSpec e2;
  e2.value = [](const Point& x) {
    return Tangent{Eigen::Vector3d(0.0, 1.0, 0.5 * x(0))};
  };
  e2.jacobian = [](const Point&) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    J(2, 0) = 0.5;
    return J;
  };
  S->horizontal_frame = {std::move(e1), std::move(e2)};
  S->complement_frame = {constant_field(Eigen::Vector3d(0.0, 0.0, 1.0))};
  S->cometric_closed_form = [](const Point& x) {
    Eigen::MatrixXd g(3, 3);
    g << 1.0, 0.0, -0.5 * x(1),
         0.0, 1.0, 0.5 * x(0),
         -0.5 * x(1), 0.5 * x(0), 0.25 * (x(0) * x(0) + x(1) * x(1));
    return g;
  };
  S->dual_christoffels_closed_form = [](const Point& x) {
    Rank3 dg(3, Eigen::MatrixXd::Zero(3, 3));
    dg[0](1, 2) = dg[0](2, 1) = 0.25;
    dg[0](2, 2) = 0.25 * x(0);
    dg[1](0, 2) = dg[1](2, 0) = -0.25;
    dg[1](2, 2) = 0.25 * x(1);
    return dg;
  };
  model.structure = S;
  model.sample_lo = Eigen::Vector3d(-0.5, -0.5, -0.5);
  model.sample_hi = Eigen::Vector3d(0.5, 0.5, 0.5);
  model.start = Eigen::Vector3d::Zero();
  model.analytic_jacobians = true;
  model.default_connection = "kappa-corrected";
  attach_standard_connections(model);
  return model;
}

Model twisted() {
  Model model;
  model.name = "twisted";
  model.n = 3;
  model.k = 2;
  auto S = std::make_shared<SubRiemannianStructure>();
  S->n = 3;
  S->k = 2;
  VectorFieldSpec e1 = constant_field(Eigen::Vector3d(1.0, 0.0, 0.0));
  VectorFieldSpec e2;
  e2.value = [](const Point& x) {
    return Tangent{Eigen::Vector3d(0.0, 1.0 + kTwistMu * x(0), x(0))};
  };
  e2.jacobian = [](const Point&) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(3, 3);
    J(1, 0) = kTwistMu;
    J(2, 0) = 1.0;
    return J;
  };
  S->horizontal_frame = {std::move(e1), std::move(e2)};
  S->complement_frame = {constant_field(Eigen::Vector3d(0.0, 0.0, 1.0))};
  S->cometric_closed_form = [](const Point& x) {
    const double a = 1.0 + kTwistMu * x(0);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(3, 3);
    g(0, 0) = 1.0;
    g(1, 1) = a * a;
    g(1, 2) = g(2, 1) = a * x(0);
    g(2, 2) = x(0) * x(0);
    return g;
  };
  S->dual_christoffels_closed_form = [](const Point& x) {
    const double a = 1.0 + kTwistMu * x(0);
    Rank3 dg(3, Eigen::MatrixXd::Zero(3, 3));
    dg[0](1, 1) = kTwistMu * a;
    dg[0](1, 2) = dg[0](2, 1) = 0.5 * (1.0 + 2.0 * kTwistMu * x(0));
    dg[0](2, 2) = x(0);
    return dg;
  };
  S->domain.contains = [](const Point& x) {
    return std::abs(x(0)) < 1.0 / kTwistMu;
  };
  S->domain.label = "|x| < 1/mu";
  model.structure = S;
  model.sample_lo = Eigen::Vector3d(-0.8, -0.8, -0.8);
  model.sample_hi = Eigen::Vector3d(0.8, 0.8, 0.8);
  model.start = Eigen::Vector3d::Zero();
  model.analytic_jacobians = true;
  model.default_connection = "kappa-corrected";
  attach_standard_connections(model);
  return model;
}

Model ellipsoid_surface(double polar_radius) {
  const double c = polar_radius;
  Model model;
  model.name = "ellipsoid";
  model.n = model.k = 2;
  auto S = std::make_shared<SubRiemannianStructure>();
  S->n = S->k = 2;
  const auto gtt = [c](double t) {
    const double ct = std::cos(t), st = std::sin(t);
    return ct * ct + c * c * st * st;
  };
  VectorFieldSpec e1;  // ds / |ds|_g
  e1.value = [](const Point& x) {
    return Tangent{Eigen::Vector2d(1.0 / std::sin(x(1)), 0.0)};
  };
  e1.jacobian = [](const Point& x) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    const double st = std::sin(x(1));
    J(0, 1) = -std::cos(x(1)) / (st * st);
    return J;
  };
  VectorFieldSpec e2;  // dt / |dt|_g
  e2.value = [gtt](const Point& x) {
    return Tangent{Eigen::Vector2d(0.0, 1.0 / std::sqrt(gtt(x(1))))};
  };
  e2.jacobian = [gtt, c](const Point& x) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2, 2);
    const double g = gtt(x(1));
    const double dg = (c * c - 1.0) * std::sin(2.0 * x(1));
    J(1, 1) = -0.5 * dg / (g * std::sqrt(g));
    return J;
  };
  S->horizontal_frame = {std::move(e1), std::move(e2)};
  S->metric = [gtt](const Point& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    const double st = std::sin(x(1));
    g(0, 0) = st * st;
    g(1, 1) = gtt(x(1));
    return g;
  };
  S->cometric_closed_form = [gtt](const Point& x) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2, 2);
    const double st = std::sin(x(1));
    g(0, 0) = 1.0 / (st * st);
    g(1, 1) = 1.0 / gtt(x(1));
    return g;
  };
  S->dual_christoffels_closed_form = [gtt, c](const Point& x) {
    const double t = x(1);
    const double st = std::sin(t), ct = std::cos(t);
    const double g = gtt(t);
    const double dg = (c * c - 1.0) * std::sin(2.0 * t);
    Rank3 out(2, Eigen::MatrixXd::Zero(2, 2));
    out[1](0, 0) = -ct / (st * st * st);
    out[1](1, 1) = -0.5 * dg / (g * g);
    return out;
  };
  S->domain.contains = [](const Point& x) {
    return x(1) > kPoleBand && x(1) < M_PI - kPoleBand;
  };
  S->domain.label = "pole band t in (0.05, pi-0.05)";
  S->canonicalize = [](const Point& x) {
    Point y = x;
    y(0) = std::fmod(y(0), 2.0 * M_PI);
    if (y(0) < 0.0) y(0) += 2.0 * M_PI;
    return y;
  };
  model.structure = S;
  model.sample_lo = Eigen::Vector2d(0.3, 0.5);
  model.sample_hi = Eigen::Vector2d(5.9, M_PI - 0.5);
  model.start = Eigen::Vector2d(0.0, 0.5 * M_PI);
  model.analytic_jacobians = true;
  model.default_connection = "levi-civita";
  attach_standard_connections(model);

  AffineConnection lc;
  lc.label = "levi-civita";
  lc.christoffels = [gtt, c](const Point& x) {
    const double t = x(1);
    const double st = std::sin(t), ct = std::cos(t);
    const double g = gtt(t);
    Rank3 G(2, Eigen::MatrixXd::Zero(2, 2));
    const double cot = ct / st;
    G[0](0, 1) = G[0](1, 0) = cot;                  // Gamma^s_{st}
    G[1](0, 0) = -st * ct / g;                      // Gamma^t_{ss}
    G[1](1, 1) = (c * c - 1.0) * st * ct / g;       // Gamma^t_{tt}
    return G;
  };
  lc.christoffel_gradient = [gtt, c](const Point& x) {
    const double t = x(1);
    const double st = std::sin(t), ct = std::cos(t);
    const double g = gtt(t);
    const double dg = (c * c - 1.0) * std::sin(2.0 * t);
    const double sc = st * ct;
    const double c2t = std::cos(2.0 * t);
    std::vector<Rank3> grad(2, Rank3(2, Eigen::MatrixXd::Zero(2, 2)));
    // only d/dt entries are nonzero
    grad[1][0](0, 1) = grad[1][0](1, 0) = -1.0 / (st * st);
    grad[1][1](0, 0) = -(c2t * g - sc * dg) / (g * g);
    grad[1][1](1, 1) = (c * c - 1.0) * (c2t * g - sc * dg) / (g * g);
    return grad;
  };
  model.connections.emplace_back("levi-civita", std::move(lc));
  return model;
}

Eigen::MatrixXd orthonormal_coordinate_frame(const SubRiemannianStructure& S,
                                             const Point& x) {
  const Eigen::MatrixXd g = S.metric_at(x);
  const int n = S.n;
  Eigen::MatrixXd F = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd v = F.col(j);
    for (int i = 0; i < j; ++i)
      v -= (F.col(i).transpose() * g * v)(0) * F.col(i);
    F.col(j) = v / std::sqrt((v.transpose() * g * v)(0));
  }
  return F;
}

Eigen::Matrix2d default_anisotropy() {
  Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
  A(0, 0) = 4.0;
  A(1, 1) = 0.25;
  return A;
}

Model ellipsoid_frame_bundle(const Eigen::Matrix2d& A, double polar_radius) {
  if (std::abs(A.determinant()) < 1e-12)
    throw ConfigError("anisotropy matrix is singular");
  Model model = ellipsoid_surface(polar_radius);
  model.name = "ellipsoid-frames";
  model.frame_bundle = true;
  model.anisotropy = A;
  model.initial_frame =
      orthonormal_coordinate_frame(*model.structure, model.start) * A;
  return model;
}

Model make_model(const std::string& name) {
  if (name == "heisenberg") return heisenberg();
  if (name == "twisted") return twisted();
  if (name == "ellipsoid") return ellipsoid_surface();
  if (name == "ellipsoid-frames")
    return ellipsoid_frame_bundle(default_anisotropy());
  if (name.rfind("euclidean", 0) == 0 && name.size() > 9) {
    try {
      const int n = std::stoi(name.substr(9));
      if (n >= 1 && n <= 10) return euclidean(n);
    } catch (const std::exception&) {
    }
  }
  std::string names;
  for (const auto& r : registry_names())
    names += (names.empty() ? "" : ", ") + r;
  throw ConfigError("unknown model '" + name + "' (registry: " + names + ")");
}

std::vector<std::string> registry_names() {
  return {"euclidean<n>", "heisenberg", "twisted", "ellipsoid",
          "ellipsoid-frames"};
}

std::vector<Point> default_probe_points(const Model& model) {
  if (model.n == 3) {
    return {Eigen::Vector3d(0.0, 0.0, 0.0), Eigen::Vector3d(0.2, 0.1, 0.0),
            Eigen::Vector3d(-0.1, 0.3, 0.05),
            Eigen::Vector3d(0.15, -0.25, -0.1),
            Eigen::Vector3d(-0.3, -0.2, 0.1)};
  }
  if (model.name == "ellipsoid" || model.name == "ellipsoid-frames") {
    return {Eigen::Vector2d(0.0, 0.5 * M_PI), Eigen::Vector2d(1.0, 1.2),
            Eigen::Vector2d(2.5, 1.9), Eigen::Vector2d(4.0, 1.4),
            Eigen::Vector2d(5.5, 1.7)};
  }
  std::vector<Point> pts;
  pts.push_back(Eigen::VectorXd::Zero(model.n));
  pts.push_back(Eigen::VectorXd::Constant(model.n, 0.2));
  pts.push_back(Eigen::VectorXd::Constant(model.n, -0.15));
  Eigen::VectorXd alt(model.n);
  for (int i = 0; i < model.n; ++i) alt(i) = (i % 2 ? -0.25 : 0.1);
  pts.push_back(alt);
  pts.push_back(0.5 * alt);
  return pts;
}

}  // namespace srw
