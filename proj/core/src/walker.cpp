#include "srw/walker.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace srw {

double walk_step_time(double epsilon, int k) {
  return epsilon * std::sqrt(2.0 * static_cast<double>(k));
}

double frame_walk_step_time(double epsilon, int n) {
  return epsilon * std::sqrt(static_cast<double>(n));
}

void WalkConfig::validate() const {
  if (!retraction.structure) throw ConfigError("walk needs a structure");
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (steps < 1) throw ConfigError("steps must be >= 1");
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  if (record_every < 1) throw ConfigError("record_every must be >= 1");
  const auto& S = retraction.S();
  if (initial.size() != S.n) throw ConfigError("initial point has wrong dimension");
  if (!S.domain.contains_point(initial))
    throw ConfigError("initial point outside chart domain");
  if (frame_walk()) {
    if (S.k != S.n)
      throw ConfigError("frame walks need a Riemannian model (k == n)");
    if (initial_frame.rows() != S.n || initial_frame.cols() != S.n)
      throw ConfigError("initial frame has wrong dimensions");
  }
}

const WalkRecord* WalkPath::find(long step) const {
  auto it = std::lower_bound(
      records.begin(), records.end(), step,
      [](const WalkRecord& r, long s) { return r.step < s; });
  if (it == records.end() || it->step != step) return nullptr;
  return &*it;
}

Tangent sample_horizontal_unit(const SubRiemannianStructure& S, const Point& x,
                               SplitMix64& rng) {
  S.require_in_domain(x);
  Eigen::VectorXd c = sample_euclidean_unit(S.k, rng);
  Tangent u = Eigen::VectorXd::Zero(S.n);
  for (int a = 0; a < S.k; ++a) u += c(a) * S.horizontal_frame[a].value(x);
  return u;
}

Eigen::VectorXd sample_euclidean_unit(int n, SplitMix64& rng) {
  Eigen::VectorXd c(n);
  double norm = 0.0;
  do {
    for (int a = 0; a < n; a += 2) {
      const auto [z1, z2] = rng.next_normal_pair();
      c(a) = z1;
      if (a + 1 < n) c(a + 1) = z2;
    }
    norm = c.norm();
  } while (norm < 1e-12);
  return c / norm;
}

namespace {

WalkPath run_replica(const WalkConfig& config, int replica) {
  const auto& S = config.retraction.S();
  const bool frames = config.frame_walk();
  const double step_t = frames ? frame_walk_step_time(config.epsilon, S.n)
                               : walk_step_time(config.epsilon, S.k);
  SplitMix64 rng = SplitMix64::stream(config.seed,uint64_t(replica));

  WalkPath path;
  Point x = S.canonical(config.initial);
  Eigen::MatrixXd F = config.initial_frame;
  path.records.push_back({0, x, F});

  for (long step = 1; step <= config.steps; ++step) {
    try {
      if (frames) {
        const Eigen::VectorXd ubar = sample_euclidean_unit(S.n, rng);
        const Tangent u = F * ubar;
        const FramePoint next = retract_frame(config.retraction, x, F, u, step_t);
        x = S.canonical(next.x);
        F = next.frame;
      } else {
        const Tangent u = sample_horizontal_unit(S, x, rng);
        x = S.canonical(retract(config.retraction, x, u, step_t));
      }
    } catch (const LeftDomainError&) {
      path.status = WalkStatus::left_domain;
      path.exit_step = step;
      break;
    } catch (const OutOfDomainError&) {
      path.status = WalkStatus::left_domain;
      path.exit_step = step;
      break;
    }
    if (step % config.record_every == 0 || step == config.steps)
      path.records.push_back({step, x, F});
  }
  if (path.status == WalkStatus::left_domain) {
    const long last = path.exit_step - 1;
    if (path.records.back().step != last)
      path.records.push_back({last, x, F});  // last valid state
  }
  return path;
}

}  // namespace

std::vector<WalkPath> walk(const WalkConfig& config) {
  config.validate();
  std::vector<WalkPath> paths(config.replicas);
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int nthreads = std::min<int>(
      config.replicas,
      config.threads > 0 ? config.threads : std::max(1, hw));
  if (nthreads <= 1) {
    for (int r = 0; r < config.replicas; ++r) paths[r] = run_replica(config, r);
    return paths;
  }
  std::vector<std::thread> workers;
  workers.reserve(nthreads);
  for (int tid = 0; tid < nthreads; ++tid)
    workers.emplace_back([&, tid]() {
      for (int r = tid; r < config.replicas; r += nthreads)
        paths[r] = run_replica(config, r);
    });
  for (auto& w : workers) w.join();
  return paths;
}

TransitionValue transition_operator(const RetractionSpec& R,
                                    const ScalarFieldSpec& f, const Point& x,
                                    double epsilon, const Quadrature& quad) {
  const auto& S = R.S();
  S.require_in_domain(x);
  if (epsilon == 0.0) return {f.value(x), 0.0};
  const double step_t = walk_step_time(epsilon, S.k);

  if (S.k == 1) {
    const Tangent e = S.horizontal_frame[0].value(x);
    return {0.5 * (f.value(retract(R, x, e, step_t)) +
                   f.value(retract(R, x, -e, step_t))),
            0.0};
  }
  if (S.k == 2 && quad.kind == Quadrature::Kind::deterministic) {
    // equispaced circle nodes: exact for trigonometric polynomials of
    // degree < nodes
    const Tangent e1 = S.horizontal_frame[0].value(x);
    const Tangent e2 = S.horizontal_frame[1].value(x);
    double sum = 0.0;
    for (int i = 0; i < quad.nodes; ++i) {
      const double th = 2.0 * M_PI * i / quad.nodes;
      const Tangent u = std::cos(th) * e1 + std::sin(th) * e2;
      sum += f.value(retract(R, x, u, step_t));
    }
    return {sum / quad.nodes, 0.0};
  }
  // Monte Carlo
  SplitMix64 rng = SplitMix64::stream(quad.seed, 0);
  double sum = 0.0, sumsq = 0.0;
  for (long i = 0; i < quad.samples; ++i) {
    Eigen::VectorXd c = sample_euclidean_unit(S.k, rng);
    Tangent u = Eigen::VectorXd::Zero(S.n);
    for (int a = 0; a < S.k; ++a) u += c(a) * S.horizontal_frame[a].value(x);
    const double v = f.value(retract(R, x, u, step_t));
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / quad.samples;
  const double var =
      std::max(0.0, (sumsq - quad.samples * mean * mean) / (quad.samples - 1));
  return {mean, std::sqrt(var / quad.samples)};
}

void GeneratorProbe::validate() const {
  if (base_points.empty()) throw ConfigError("probe needs base points");
  if (epsilons.size() < 2) throw ConfigError("probe needs an epsilon grid");
  for (size_t i = 1; i < epsilons.size(); ++i)
    if (!(epsilons[i] < epsilons[i - 1]))
      throw ConfigError("epsilon grid must be strictly decreasing");
  if (quadrature.kind == Quadrature::Kind::deterministic) {
    if (quadrature.nodes < 8) throw ConfigError("deterministic quadrature needs m >= 8");
  } else if (quadrature.samples < 10000) {
    throw ConfigError("Monte Carlo quadrature needs N >= 10^4");
  }
}

GeneratorTable generator_estimate(const RetractionSpec& R,
                                  const GeneratorProbe& probe) {
  probe.validate();
  const auto& S = R.S();
  GeneratorTable table;
  std::vector<double> targets;
  targets.reserve(probe.base_points.size());
  for (const Point& x : probe.base_points)
    targets.push_back(S.sub_laplacian(x, probe.f));

  table.max_errors.assign(probe.epsilons.size(), 0.0);
  for (size_t ei = 0; ei < probe.epsilons.size(); ++ei) {
    const double eps = probe.epsilons[ei];
    for (size_t pi = 0; pi < probe.base_points.size(); ++pi) {
      const Point& x = probe.base_points[pi];
      const TransitionValue U =
          transition_operator(R, probe.f, x, eps, probe.quadrature);
      const double L = (U.value - probe.f.value(x)) / (eps * eps);
      GeneratorRow row;
      row.point_index = static_cast<int>(pi);
      row.epsilon = eps;
      row.l_value = L;
      row.target = targets[pi];
      row.abs_error = std::abs(L - targets[pi]);
      table.max_errors[ei] = std::max(table.max_errors[ei], row.abs_error);
      table.rows.push_back(row);
    }
  }
  std::vector<double> lx, ly;
  for (size_t ei = 0; ei < probe.epsilons.size(); ++ei)
    if (table.max_errors[ei] > kGeneratorErrorFloor) {
      lx.push_back(std::log(probe.epsilons[ei]));
      ly.push_back(std::log(table.max_errors[ei]));
    }
  if (lx.size() < 2) {
    table.at_floor = true;
    return table;
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  table.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return table;
}

const WalkRecord& time_scaled_sample(const WalkPath& path, double epsilon,
                                     double t) {
  if (t < 0.0) throw Error("time must be nonnegative");
  // small slack keeps exact ratios like t = eps^2 on the intended index
  const long index = static_cast<long>(std::floor(t / (epsilon * epsilon) + 1e-9));
  const long last = path.records.back().step;
  if (index > last)
    throw HorizonExceededError("walk horizon exceeded: step " +
                               std::to_string(index) + " > " +
                               std::to_string(last));
  const WalkRecord* rec = path.find(index);
  if (!rec)
    throw Error("walk step " + std::to_string(index) +
                " was not recorded (adjust record_every)");
  return *rec;
}

std::vector<MomentRow> moment_statistics(const std::vector<WalkPath>& paths,
                                         const std::vector<NamedScalarField>& fs,
                                         const std::vector<double>& ts,
                                         double epsilon) {
  if (paths.size() < 2) throw ConfigError("moment statistics need >= 2 replicas");
  std::vector<MomentRow> rows;
  for (const auto& nf : fs)
    for (const double t : ts) {
      MomentRow row;
      row.name = nf.name;
      row.t = t;
      std::vector<double> values;
      for (const WalkPath& path : paths) {
        if (path.status != WalkStatus::completed) {
          ++row.excluded;
          continue;
        }
        values.push_back(nf.f.value(time_scaled_sample(path, epsilon, t).x));
      }
      row.used = static_cast<int>(values.size());
      if (row.used >= 2) {
        double sum = 0.0;
        for (double v : values) sum += v;
        row.mean = sum / row.used;
        double ss = 0.0;
        for (double v : values) ss += (v - row.mean) * (v - row.mean);
        row.variance = ss / (row.used - 1);
        row.std_error = std::sqrt(row.variance / row.used);
      }
      rows.push_back(std::move(row));
    }
  return rows;
}

ScalarFieldSpec make_probe(const std::string& name, int n) {
  ScalarFieldSpec f;
  if (name == "quad_xy") {
    if (n < 2) throw ConfigError("quad_xy needs chart dimension >= 2");
    f.value = [](const Point& x) { return x(0) * x(0) + x(1) * x(1); };
    f.gradient = [n](const Point& x) {
      Covector g = Eigen::VectorXd::Zero(n);
      g(0) = 2.0 * x(0);
      g(1) = 2.0 * x(1);
      return g;
    };
    f.hessian = [n](const Point&) {
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
      H(0, 0) = 2.0;
      H(1, 1) = 2.0;
      return H;
    };
    return f;
  }
  if (name == "coord_z") {
    if (n < 3) throw ConfigError("coord_z needs chart dimension >= 3");
    f.value = [](const Point& x) { return x(2); };
    f.gradient = [n](const Point&) {
      Covector g = Eigen::VectorXd::Zero(n);
      g(2) = 1.0;
      return g;
    };
    f.hessian = [n](const Point&) {
      return Eigen::MatrixXd::Zero(n, n).eval();
    };
    return f;
  }
  if (name == "bump") {
    f.value = [](const Point& x) {
      const double r2 = x.squaredNorm();
      if (r2 >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - r2));
    };
    f.gradient = [n](const Point& x) {
      const double r2 = x.squaredNorm();
      Covector g = Eigen::VectorXd::Zero(n);
      if (r2 >= 1.0) return g;
      const double om = 1.0 - r2;
      const double val = std::exp(1.0 - 1.0 / om);
      g = val * (-2.0 / (om * om)) * x;
      return g;
    };
    f.hessian = [n](const Point& x) {
      const double r2 = x.squaredNorm();
      Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
      if (r2 >= 1.0) return H;
      const double om = 1.0 - r2;
      const double val = std::exp(1.0 - 1.0 / om);
      const Eigen::VectorXd a = (-2.0 / (om * om)) * x;
      H = val * (a * a.transpose() -
                 2.0 / (om * om) * Eigen::MatrixXd::Identity(n, n) -
                 8.0 / (om * om * om) * x * x.transpose());
      return H;
    };
    return f;
  }
  std::string names;
  for (const auto& p : probe_names()) names += (names.empty() ? "" : ", ") + p;
  throw ConfigError("unknown probe '" + name + "' (available: " + names + ")");
}

std::vector<std::string> probe_names() { return {"quad_xy", "coord_z", "bump"}; }

}  // namespace srw
