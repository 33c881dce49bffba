#include <benchmark/benchmark.h>

#include <memory>

#include "elastheat/assemble.hpp"
#include "elastheat/kernel.hpp"
#include "elastheat/parabolic.hpp"

namespace {

using namespace elastheat;

std::shared_ptr<const Mesh> bench_mesh(double h) {
  const PolygonalDomain domain = PolygonalDomain::rectangle(
      {0, 0}, {1, 1},
      {BoundaryLabel::Dirichlet, BoundaryLabel::Neumann, BoundaryLabel::Neumann,
       BoundaryLabel::Neumann});
  return std::make_shared<const Mesh>(triangulate(domain, h));
}

void BM_AssembleStiffness(benchmark::State& state) {
  const auto mesh = bench_mesh(1.0 / state.range(0));
  const auto tensor = std::make_shared<const ElasticityTensor>(make_lame_tensor(1.0, 1.0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble(mesh, tensor));
  }
  state.SetItemsProcessed(state.iterations() * mesh->triangle_count());
}
BENCHMARK(BM_AssembleStiffness)->Arg(16)->Arg(32)->Arg(64);

void BM_CgStaticSolve(benchmark::State& state) {
  const auto mesh = bench_mesh(1.0 / state.range(0));
  const auto tensor = std::make_shared<const ElasticityTensor>(make_lame_tensor(1.0, 1.0));
  const DiscreteOperator op = assemble(mesh, tensor);
  std::vector<double> f(op.dofs(), 1.0);
  op.mask.apply(f);
  const std::vector<double> b = load_vector(op, f);
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_static(op, b));
  }
  state.SetItemsProcessed(state.iterations() * op.dofs());
}
BENCHMARK(BM_CgStaticSolve)->Arg(16)->Arg(32);

void BM_BackwardEulerStep(benchmark::State& state) {
  const auto mesh = bench_mesh(1.0 / state.range(0));
  const auto tensor = std::make_shared<const ElasticityTensor>(make_lame_tensor(1.0, 1.0));
  const DiscreteOperator op = assemble(mesh, tensor);
  std::vector<double> psi = mollified_initial(op, {0.5, 0.5}, 0.25, 0);
  op.mask.apply(psi);
  StepOptions opts;
  ParabolicStepper stepper(op, Scheme::BackwardEuler, opts);
  stepper.set_state(psi, 0.0);
  for (auto _ : state) {
    stepper.step(1e-3, nullptr);
  }
  state.SetItemsProcessed(state.iterations() * op.dofs());
}
BENCHMARK(BM_BackwardEulerStep)->Arg(16)->Arg(32);

void BM_KernelColumn(benchmark::State& state) {
  const auto mesh = bench_mesh(1.0 / 16);
  const auto tensor = std::make_shared<const ElasticityTensor>(make_lame_tensor(1.0, 1.0));
  const DiscreteOperator op = assemble(mesh, tensor);
  const TimeGrid grid = TimeGrid::graded(0.0, 0.05, 1e-4, 1.2, 5e-3,
                                         Scheme::CrankNicolsonBeStartup);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_kernel_column(op, {0.5, 0.5}, 0.25, 0, grid));
  }
}
BENCHMARK(BM_KernelColumn);

}  // namespace

BENCHMARK_MAIN();
