#include <benchmark/benchmark.h>

#include "srw/geodesics.hpp"
#include "srw/models.hpp"
#include "srw/retraction.hpp"
#include "srw/walker.hpp"

using namespace srw;

namespace {

RetractionSpec spec_for(const Model& m, RetractionKind kind,
                        const std::string& conn = "") {
  RetractionSpec R;
  R.kind = kind;
  R.structure = m.structure;
  if (!conn.empty()) R.connection = m.connection(conn);
  return R;
}

void BM_Ret1Step(benchmark::State& state) {
  const Model m = heisenberg();
  const RetractionSpec R = spec_for(m, RetractionKind::Ret1);
  const Point x = Eigen::Vector3d(0.1, -0.2, 0.05);
  const Tangent u = m.structure->horizontal_frame[0].value(x);
  for (auto _ : state)
    benchmark::DoNotOptimize(retract(R, x, u, 0.1));
}
BENCHMARK(BM_Ret1Step);

void BM_Ret2KappaStep(benchmark::State& state) {
  const Model m = twisted();
  const RetractionSpec R = spec_for(m, RetractionKind::Ret2, "kappa-corrected");
  const Point x = Eigen::Vector3d(0.1, -0.2, 0.05);
  const Tangent u = m.structure->horizontal_frame[1].value(x);
  for (auto _ : state)
    benchmark::DoNotOptimize(retract(R, x, u, 0.1));
}
BENCHMARK(BM_Ret2KappaStep);

void BM_ExactExpStep(benchmark::State& state) {
  const Model m = heisenberg();
  const RetractionSpec R = spec_for(m, RetractionKind::ExactExp);
  const Point x = Eigen::Vector3d(0.1, -0.2, 0.05);
  const Tangent u = m.structure->horizontal_frame[0].value(x);
  for (auto _ : state)
    benchmark::DoNotOptimize(retract(R, x, u, 0.1));
}
BENCHMARK(BM_ExactExpStep);

void BM_Ret3PrimeStep(benchmark::State& state) {
  const Model m = make_model("ellipsoid-frames");
  RetractionSpec R = spec_for(m, RetractionKind::Ret3Prime, "levi-civita");
  R.anisotropy = m.anisotropy;
  const Tangent u = m.initial_frame.col(0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        retract_frame(R, m.start, m.initial_frame, u, 0.1));
}
BENCHMARK(BM_Ret3PrimeStep);

void BM_HamiltonianFlow(benchmark::State& state) {
  const Model m = heisenberg();
  const Covector p0 = Eigen::Vector3d(1.0, 0.0, 1.0);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        hamiltonian_flow(*m.structure, m.start, p0, 1.0, 1e-3));
}
BENCHMARK(BM_HamiltonianFlow);

void BM_WalkThousandSteps(benchmark::State& state) {
  const Model m = heisenberg();
  WalkConfig config;
  config.retraction = spec_for(m, RetractionKind::Ret1);
  config.epsilon = 0.05;
  config.steps = 1000;
  config.seed = 1;
  config.initial = m.start;
  config.record_every = 1000;
  for (auto _ : state)
    benchmark::DoNotOptimize(walk(config));
}
BENCHMARK(BM_WalkThousandSteps);

void BM_TransitionOperator(benchmark::State& state) {
  const Model m = heisenberg();
  const RetractionSpec R = spec_for(m, RetractionKind::Ret1);
  const ScalarFieldSpec f = make_probe("quad_xy", 3);
  Quadrature quad;
  quad.nodes = 32;
  for (auto _ : state)
    benchmark::DoNotOptimize(transition_operator(R, f, m.start, 0.05, quad));
}
BENCHMARK(BM_TransitionOperator);

}  // namespace

BENCHMARK_MAIN();
