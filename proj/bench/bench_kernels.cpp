#include <benchmark/benchmark.h>

#include "confimm/catalog.hpp"
#include "confimm/geometry.hpp"
#include "confimm/liouville.hpp"
#include "kernels/kernels.hpp"

using namespace confimm;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void set_label(benchmark::State& state) { state.SetLabel(state.range(1) ? "parallel" : "serial"); }

void BM_NodeGeometry(benchmark::State& state) {
  const SampledImmersion imm = instantiate(parse_surface_spec("clifford-torus"), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_geometry(imm, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(imm.size()));
  set_label(state);
}

void BM_DirectLogSum(benchmark::State& state) {
  const ParamGrid g = make_polar_grid(polar_options(static_cast<int>(state.range(0))));
  const Eigen::VectorXd src = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
  Eigen::VectorXd v;
  for (auto _ : state) {
    kernels::direct_log_sum(g, 1.0, src, v, exec_of(state));
    benchmark::DoNotOptimize(v.data());
  }
  set_label(state);
}

void BM_SolvePotential(benchmark::State& state) {
  const SampledImmersion imm = instantiate(parse_surface_spec("f_eps(eps=0.5)"), static_cast<int>(state.range(0)));
  const GeometryFields geo = build_geometry(imm);
  const Eigen::VectorXd src = (geo.K.array() * geo.area.array()).matrix();
  for (auto _ : state) benchmark::DoNotOptimize(solve_potential(*imm.grid, src, exec_of(state)));
  set_label(state);
}

void BM_BallIntegrals(benchmark::State& state) {
  const SampledImmersion imm = instantiate(parse_surface_spec("sphere"), static_cast<int>(state.range(0)));
  const Eigen::MatrixXd dens = Eigen::MatrixXd::Ones(3, static_cast<Eigen::Index>(imm.size()));
  kernels::BallData data = kernels::prepare_ball_data(imm, dens, Exec::parallel);
  data.imm = &imm;
  const Eigen::Vector3d x0(0.2, 0.3, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::ball_integrals(data, x0, 0.7, exec_of(state)));
  set_label(state);
}

}  // namespace

BENCHMARK(BM_NodeGeometry)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DirectLogSum)->ArgsProduct({{32, 64}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolvePotential)->ArgsProduct({{64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BallIntegrals)->ArgsProduct({{128, 256}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
