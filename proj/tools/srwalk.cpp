// srwalk: retraction-based random walks on sub-Riemannian models.
// Subcommands: walk, generator-test, retraction-order, connection-check.
// Exit codes: 0 ok, 2 config error, 3 all replicas censored, 4 I/O error,
// 5 below acceptance threshold.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "srw/geodesics.hpp"
#include "srw/models.hpp"
#include "srw/retraction.hpp"
#include "srw/walker.hpp"

using json = nlohmann::ordered_json;
using namespace srw;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitCensored = 3;
constexpr int kExitIo = 4;
constexpr int kExitThreshold = 5;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RetractionKind parse_kind(const std::string& name) {
  if (name == "exact-exp" || name == "exact") return RetractionKind::ExactExp;
  if (name == "ret1") return RetractionKind::Ret1;
  if (name == "ret2") return RetractionKind::Ret2;
  if (name == "ret3") return RetractionKind::Ret3;
  if (name == "ret3prime" || name == "ret3'") return RetractionKind::Ret3Prime;
  throw ConfigError("unknown retraction '" + name +
                    "' (exact-exp, ret1, ret2, ret3, ret3prime)");
}

bool kind_needs_connection(RetractionKind kind) {
  return kind == RetractionKind::Ret2 || kind == RetractionKind::Ret3 ||
         kind == RetractionKind::Ret3Prime;
}

struct Experiment {
  Model model;
  RetractionSpec retraction;
  std::string retraction_name;
  std::string connection_name;  // empty when none attached
};

Experiment build_experiment(const std::string& model_name,
                            const std::string& retraction_name,
                            std::string connection_name, bool frame_walk) {
  Experiment e{make_model(model_name), {}, retraction_name, ""};
  const RetractionKind kind = parse_kind(retraction_name);
  e.retraction.kind = kind;
  e.retraction.structure = e.model.structure;
  const bool wants_conn =
      kind_needs_connection(kind) ||
      (kind == RetractionKind::ExactExp && frame_walk);
  if (wants_conn) {
    if (connection_name.empty())
      connection_name = (kind == RetractionKind::Ret3 ||
                         kind == RetractionKind::Ret3Prime ||
                         kind == RetractionKind::ExactExp)
                            ? "levi-civita"
                            : e.model.default_connection;
    e.retraction.connection = e.model.connection(connection_name);
    e.connection_name = connection_name;
  } else if (!connection_name.empty()) {
    throw ConfigError("retraction '" + retraction_name +
                      "' does not take a connection");
  }
  if (kind == RetractionKind::Ret3Prime && e.model.frame_bundle)
    e.retraction.anisotropy = e.model.anisotropy;
  return e;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
  json rows = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

int cmd_walk(const std::string& model_name, const std::string& retraction_name,
             const std::string& connection_name, double epsilon, long steps,
             int replicas, std::uint64_t seed, long record_every,
             const std::string& out_paths, const std::string& out_summary) {
  const auto t_start = std::chrono::steady_clock::now();
  Experiment e = build_experiment(model_name, retraction_name, connection_name,
                                  /*frame_walk=*/make_model(model_name).frame_bundle);

  WalkConfig config;
  config.retraction = e.retraction;
  config.epsilon = epsilon;
  config.steps = steps;
  config.seed = seed;
  config.replicas = replicas;
  config.record_every = record_every;
  config.initial = e.model.start;
  if (e.model.frame_bundle) {
    const Eigen::MatrixXd A = config.retraction.kind == RetractionKind::Ret3
                                  ? Eigen::MatrixXd(Eigen::Matrix2d::Identity())
                                  : e.model.anisotropy;
    config.initial_frame =
        orthonormal_coordinate_frame(*e.model.structure, e.model.start) * A;
    if (config.retraction.kind == RetractionKind::Ret3Prime)
      config.retraction.anisotropy = A;
  }

  const auto paths = walk(config);

  int censored = 0;
  for (const auto& p : paths)
    if (p.status == WalkStatus::left_domain) ++censored;

  // paths as JSON Lines, replica-major
  {
    std::ofstream out(out_paths, std::ios::trunc);
    if (!out) {
      std::cerr << "cannot open " << out_paths << "\n";
      return kExitIo;
    }
    for (size_t r = 0; r < paths.size(); ++r)
      for (const auto& rec : paths[r].records) {
        json line;
        line["replica"] = r;
        line["step"] = rec.step;
        line["x"] = vector_to_json(rec.x);
        if (rec.frame.size() != 0) line["F"] = matrix_to_json(rec.frame);
        out << line.dump() << "\n";
      }
    if (!out.good()) {
      std::cerr << "write failure on " << out_paths << "\n";
      return kExitIo;
    }
  }

  json summary;
  summary["schema"] = "srw-walk-summary/1";
  json cfg;
  cfg["model"] = e.model.name;
  cfg["retraction"] = e.retraction_name;
  if (!e.connection_name.empty()) cfg["connection"] = e.connection_name;
  cfg["epsilon"] = epsilon;
  cfg["steps"] = steps;
  cfg["replicas"] = replicas;
  cfg["seed"] = seed;
  cfg["record_every"] = record_every;
  cfg["frame_walk"] = e.model.frame_bundle;
  cfg["initial"] = vector_to_json(config.initial);
  cfg["step_time"] = e.model.frame_bundle
                         ? frame_walk_step_time(epsilon, e.model.n)
                         : walk_step_time(epsilon, e.model.k);
  if (e.model.frame_bundle) cfg["anisotropy"] = matrix_to_json(e.model.anisotropy);
  summary["config"] = std::move(cfg);
  summary["rng"] = {{"family", kRngFamily}, {"stream", kRngStreamRecipe}};
  summary["censored"] = censored;
  summary["completed"] = replicas - censored;

  json moments = json::array();
  if (replicas - censored >= 2) {
    std::vector<NamedScalarField> fs;
    for (int i = 0; i < e.model.n; ++i) {
      NamedScalarField nf;
      nf.name = "x" + std::to_string(i + 1);
      nf.f.value = [i](const Point& x) { return x(i); };
      fs.push_back(std::move(nf));
    }
    if (e.model.n >= 2) fs.push_back({"quad_xy", make_probe("quad_xy", e.model.n)});
    const double horizon = epsilon * epsilon * static_cast<double>(steps);
    for (const auto& row : moment_statistics(paths, fs, {horizon}, epsilon)) {
      json jrow;
      jrow["name"] = row.name;
      jrow["t"] = row.t;
      jrow["mean"] = row.mean;
      jrow["variance"] = row.variance;
      jrow["std_error"] = row.std_error;
      jrow["used"] = row.used;
      jrow["excluded"] = row.excluded;
      moments.push_back(std::move(jrow));
    }
  }
  summary["moments"] = std::move(moments);
  summary["paths_file"] = out_paths;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();
  summary["runtime_seconds"] = secs;  // excluded from the determinism contract

  {
    std::ofstream out(out_summary, std::ios::trunc);
    if (!out) {
      std::cerr << "cannot open " << out_summary << "\n";
      return kExitIo;
    }
    out << summary.dump(2) << "\n";
    if (!out.good()) {
      std::cerr << "write failure on " << out_summary << "\n";
      return kExitIo;
    }
  }

  std::cerr << "walk: " << replicas - censored << "/" << replicas
            << " replicas completed, " << censored << " censored, "
            << fmt(secs) << " s\n";
  if (censored == replicas) return kExitCensored;
  return kExitOk;
}

int cmd_generator_test(const std::string& model_name,
                       const std::string& retraction_name,
                       const std::string& connection_name,
                       const std::string& probe_name,
                       std::vector<double> eps_grid, int quad_nodes,
                       long mc_samples, std::uint64_t seed, double threshold) {
  Experiment e =
      build_experiment(model_name, retraction_name, connection_name, false);
  GeneratorProbe probe;
  probe.f = make_probe(probe_name, e.model.n);
  probe.base_points = default_probe_points(e.model);
  probe.epsilons = std::move(eps_grid);
  probe.quadrature.nodes = quad_nodes;
  probe.quadrature.samples = mc_samples;
  probe.quadrature.seed = seed;
  if (e.model.k > 2) probe.quadrature.kind = Quadrature::Kind::montecarlo;

  const GeneratorTable table = generator_estimate(e.retraction, probe);

  std::cout << "epsilon,point_index,L_eps,target,abs_error\n";
  for (const auto& row : table.rows)
    std::cout << fmt(row.epsilon) << "," << row.point_index << ","
              << fmt(row.l_value) << "," << fmt(row.target) << ","
              << fmt(row.abs_error) << "\n";
  if (table.at_floor)
    std::cout << "# all errors at the quadrature floor (" << kGeneratorErrorFloor
              << "); convergence better than measurable\n";
  else
    std::cout << "# slope = " << fmt(table.slope) << " (threshold "
              << fmt(threshold) << ")\n";
  return table.passes(threshold) ? kExitOk : kExitThreshold;
}

int cmd_retraction_order(const std::string& model_name,
                         const std::string& retraction_name,
                         const std::string& connection_name, int sample_count,
                         std::uint64_t seed, double threshold) {
  Experiment e =
      build_experiment(model_name, retraction_name, connection_name,
                       /*frame_walk=*/false);
  const bool frame_kind = e.retraction.kind == RetractionKind::Ret3 ||
                          e.retraction.kind == RetractionKind::Ret3Prime;
  if (frame_kind && e.model.k != e.model.n)
    throw ConfigError("frame retractions need a Riemannian model");
  const auto grid = default_order_grid();

  SplitMix64 rng = SplitMix64::stream(seed, 0);
  std::vector<OrderSample> samples;
  for (const Point& x : e.model.sample_points(sample_count)) {
    OrderSample s;
    s.x = x;
    s.u = sample_horizontal_unit(*e.model.structure, x, rng);
    if (frame_kind) {
      Eigen::MatrixXd A = Eigen::MatrixXd::Identity(e.model.n, e.model.n);
      if (e.retraction.kind == RetractionKind::Ret3Prime) {
        if (e.retraction.anisotropy.size() == 0)
          e.retraction.anisotropy = default_anisotropy();
        A = e.retraction.anisotropy;
      }
      s.frame = orthonormal_coordinate_frame(*e.model.structure, x) * A;
    }
    samples.push_back(std::move(s));
  }

  OrderTestResult res;
  if (frame_kind) {
    const AffineConnection conn = e.model.connection("levi-civita");
    const auto* domain = &e.model.structure->domain;
    res = order_test_frames(
        e.retraction,
        [&](const OrderSample& s, double t) {
          const GeodesicPath path = affine_geodesic(conn, s.x, s.u, t, 1e-5, domain);
          return FramePoint{path.endpoint(),
                            parallel_transport_frame(conn, path, s.frame).back()};
        },
        samples, grid);
  } else {
    RetractionSpec oracle;
    oracle.kind = RetractionKind::ExactExp;
    oracle.structure = e.model.structure;
    oracle.exp_dt = 1e-5;
    res = order_test_points(
        e.retraction,
        [&](const Point& x, const Tangent& u, double t) {
          return retract(oracle, x, u, t);
        },
        samples, grid);
  }

  std::cout << "sample_index,t,error\n";
  for (size_t s = 0; s < res.errors.size(); ++s)
    for (size_t ti = 0; ti < res.t_grid.size(); ++ti)
      std::cout << s << "," << fmt(res.t_grid[ti]) << ","
                << fmt(res.errors[s][ti]) << "\n";
  if (res.at_floor)
    std::cout << "# all errors at the roundoff floor (" << kOrderErrorFloor
              << "); agreement better than measurable\n";
  else
    std::cout << "# slope = " << fmt(res.slope) << " (threshold "
              << fmt(threshold) << ")\n";
  return res.passes(threshold) ? kExitOk : kExitThreshold;
}

struct PredicateExpectation {
  std::string connection;
  char predicate;  // 'c' compatible, 'n' normal, 't' vertical torsion
  bool expected;
};

std::vector<PredicateExpectation> expected_pattern(const Model& m) {
  std::vector<PredicateExpectation> exp = {
      {"frame-parallel", 'c', true},
      {"adjoint(frame-parallel)", 'n', true},
      {"kappa-corrected", 'c', true},
      {"kappa-corrected", 't', true},
  };
  if (m.name == "heisenberg") {
    exp.push_back({"frame-parallel", 't', true});
    exp.push_back({"flat", 'c', false});
  } else if (m.name == "twisted") {
    exp.push_back({"frame-parallel", 't', false});
    exp.push_back({"flat", 'c', false});
  } else if (m.name.rfind("euclidean", 0) == 0) {
    exp.push_back({"flat", 'c', true});
    exp.push_back({"flat", 'n', true});
    exp.push_back({"flat", 't', true});
  } else if (m.name == "ellipsoid" || m.name == "ellipsoid-frames") {
    exp.push_back({"levi-civita", 'c', true});
    exp.push_back({"levi-civita", 'n', true});
    exp.push_back({"levi-civita", 't', true});
    exp.push_back({"frame-parallel", 't', false});
  }
  return exp;
}

int cmd_connection_check(const std::string& model_name, double tol) {
  const Model m = make_model(model_name);
  const auto samples = m.sample_points(100);

  struct Row {
    std::string name;
    PredicateReport compat, normal, tvert;
  };
  std::vector<Row> rows;
  for (const auto& [name, conn] : m.connections) {
    rows.push_back({name,
                    is_compatible(conn, *m.structure, samples, tol),
                    is_normal(conn, *m.structure, samples, tol),
                    horizontal_torsion_vertical(conn, *m.structure, samples, tol)});
  }
  const AffineConnection adj = adjoint(m.connection("frame-parallel"));
  rows.push_back({"adjoint(frame-parallel)",
                  is_compatible(adj, *m.structure, samples, tol),
                  is_normal(adj, *m.structure, samples, tol),
                  horizontal_torsion_vertical(adj, *m.structure, samples, tol)});

  std::printf("%-26s %-18s %-18s %-18s\n", "connection", "compatible", "normal",
              "T(H,H) vertical");
  const auto cell = [](const PredicateReport& r) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s %.2e", r.holds ? "yes" : "no ",
                  r.max_residual);
    return std::string(buf);
  };
  for (const auto& row : rows)
    std::printf("%-26s %-18s %-18s %-18s\n", row.name.c_str(),
                cell(row.compat).c_str(), cell(row.normal).c_str(),
                cell(row.tvert).c_str());

  bool ok = true;
  for (const auto& exp : expected_pattern(m)) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const Row& r) {
      return r.name == exp.connection;
    });
    if (it == rows.end()) continue;
    const PredicateReport& rep = exp.predicate == 'c'   ? it->compat
                                 : exp.predicate == 'n' ? it->normal
                                                        : it->tvert;
    if (rep.holds != exp.expected) {
      std::printf("unexpected: %s %s should %s\n", exp.connection.c_str(),
                  exp.predicate == 'c'   ? "compatible"
                  : exp.predicate == 'n' ? "normal"
                                         : "vertical-torsion",
                  exp.expected ? "hold" : "fail");
      ok = false;
    }
  }
  std::printf("# pattern %s\n", ok ? "ok" : "MISMATCH");
  return ok ? kExitOk : kExitThreshold;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retraction-based random walks on sub-Riemannian models"};
  app.set_config("--config", "", "key=value config file; flags override it");
  app.fallthrough();
  app.require_subcommand(1);

  std::string model = "heisenberg";
  std::string retraction = "exact-exp";
  std::string connection;
  double epsilon = 0.05;
  long steps = 1000;
  int replicas = 1;
  std::uint64_t seed = kFigureRegimeSeed;
  long record_every = 1;
  std::string out_paths = "paths.jsonl";
  std::string out_summary = "summary.json";
  std::string probe = "quad_xy";
  std::vector<double> eps_grid = {0.2, 0.1, 0.05, 0.025, 0.0125};
  int quad_nodes = 32;
  long mc_samples = 100000;
  double threshold = -1.0;  // per-command default below
  int samples = 20;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--model", model, "registry model name");
    cmd->add_option("--retraction", retraction,
                    "exact-exp | ret1 | ret2 | ret3 | ret3prime");
    cmd->add_option("--connection", connection,
                    "frame-parallel | kappa-corrected | levi-civita | flat");
    cmd->add_option("--seed", seed, "base RNG seed");
  };

  auto* walk_cmd = app.add_subcommand("walk", "run retraction-based random walks");
  add_common(walk_cmd);
  walk_cmd->add_option("--epsilon", epsilon, "walk scale parameter");
  walk_cmd->add_option("--steps", steps, "steps per replica");
  walk_cmd->add_option("--replicas", replicas, "independent replicas");
  walk_cmd->add_option("--record-every", record_every, "recording stride");
  walk_cmd->add_option("--out-paths", out_paths, "JSON Lines trajectory file");
  walk_cmd->add_option("--out-summary", out_summary, "summary JSON file");

  auto* gen_cmd = app.add_subcommand(
      "generator-test", "compare L^eps f against the sub-Laplacian");
  add_common(gen_cmd);
  gen_cmd->add_option("--probe", probe, "quad_xy | coord_z | bump");
  gen_cmd->add_option("--eps-grid", eps_grid, "decreasing epsilon grid")
      ->delimiter(',');
  gen_cmd->add_option("--quad-nodes", quad_nodes, "circle quadrature nodes");
  gen_cmd->add_option("--mc-samples", mc_samples, "Monte Carlo draws (k >= 3)");
  gen_cmd->add_option("--threshold", threshold, "slope gate (default 0.8)");

  auto* order_cmd = app.add_subcommand(
      "retraction-order", "measure second-order agreement with normal geodesics");
  add_common(order_cmd);
  order_cmd->add_option("--samples", samples, "number of (x,u) samples");
  order_cmd->add_option("--threshold", threshold, "slope gate (default 2.9)");

  auto* conn_cmd = app.add_subcommand(
      "connection-check", "predicate matrix for the model's connections");
  conn_cmd->add_option("--model", model, "registry model name");
  conn_cmd->add_option("--threshold", threshold,
                       "predicate residual tolerance (default 1e-8)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (walk_cmd->parsed())
      return cmd_walk(model, retraction, connection, epsilon, steps, replicas,
                      seed, record_every, out_paths, out_summary);
    if (gen_cmd->parsed())
      return cmd_generator_test(model, retraction, connection, probe, eps_grid,
                                quad_nodes, mc_samples, seed,
                                threshold < 0 ? 0.8 : threshold);
    if (order_cmd->parsed())
      return cmd_retraction_order(model, retraction, connection, samples, seed,
                                  threshold < 0 ? 2.9 : threshold);
    if (conn_cmd->parsed())
      return cmd_connection_check(model, threshold < 0 ? 1e-8 : threshold);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitConfig;
}
