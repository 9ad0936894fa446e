#include <benchmark/benchmark.h>

#include <crdm/crdm.hpp>

namespace {

const crdm::DensityProfile& density() {
  static const auto rho = crdm::make_gaussian_density(1.0, 1.0);
  return rho;
}

crdm::RdmKernel rotating_kernel() {
  const auto kappa = crdm::kappa_rigid_rotation(crdm::Vec3(0, 0, 0.5));
  return crdm::kernel_D(density(), kappa, 0.03, 0.03);
}

void BM_KernelEntry(benchmark::State& state) {
  const auto k = rotating_kernel();
  const crdm::Vec3 r(0.3, -0.2, 0.1);
  const crdm::Vec3 s(-0.4, 0.5, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(k(r, s));
}
BENCHMARK(BM_KernelEntry);

void BM_Discretize(benchmark::State& state) {
  const auto k = rotating_kernel();
  const auto grid =
      crdm::GridSpec::cube(crdm::Vec3::Zero(), 3.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(crdm::discretize(k, grid).matrix.data());
  state.SetComplexityN(static_cast<long>(grid.size()));
}
BENCHMARK(BM_Discretize)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_GaussHermiteRule(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(crdm::GaussHermiteRule::make(order).nodes.data());
}
BENCHMARK(BM_GaussHermiteRule)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_TauFd(benchmark::State& state) {
  const auto k = rotating_kernel();
  const crdm::Vec3 r(0.3, -0.2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(crdm::tau_fd(k, r).value);
}
BENCHMARK(BM_TauFd);

void BM_ReduceGrid(benchmark::State& state) {
  const auto grid =
      crdm::GridSpec::cube(crdm::Vec3::Zero(), 6.0, static_cast<std::size_t>(state.range(0)));
  const auto& rho = density();
  for (auto _ : state) {
    benchmark::DoNotOptimize(crdm::integrate_box([&](const crdm::Vec3& r) { return rho(r); }, grid));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_ReduceGrid)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
