#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "stabsens/finite_diff.hpp"
#include "stabsens/rng.hpp"
#include "stabsens/sensitivity.hpp"
#include "stabsens/stability_sdp.hpp"
#include "stabsens/system_model.hpp"

namespace {

using namespace stabsens;

Eigen::MatrixXd stable_instance(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  // A diagonal shift of the absolute row sums keeps the spectrum in the
  // left half plane without an eigensolve.
  m.diagonal().array() -= m.cwiseAbs().rowwise().sum().array() + 0.5;
  return m;
}

void BM_StabilityIndex(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd j = stable_instance(n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(stability_index(j));
  }
}
BENCHMARK(BM_StabilityIndex)->Arg(5)->Arg(10)->Arg(20)->Arg(32)
    ->Unit(benchmark::kMillisecond);

void BM_SensMatrix(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd j = stable_instance(n, 2);
  const StabilityCertificate cert = stability_index(j);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sens_matrix(cert, j));
  }
}
BENCHMARK(BM_SensMatrix)->Arg(5)->Arg(10)->Arg(20)
    ->Unit(benchmark::kMillisecond);

// The headline comparison: full parameter gradient by the analytic route
// (one solve plus linear algebra) versus forward perturbation (p + 1
// solves).
void BM_FullGradientAnalytic(benchmark::State& state) {
  ParametricJacobian pj = make_droop_grid(20, 6, 3);
  for (auto _ : state) {
    const StabilityCertificate cert = stability_index(jacobian_at(pj, pj.d));
    benchmark::DoNotOptimize(sens_params(cert, pj));
  }
}
BENCHMARK(BM_FullGradientAnalytic)->Unit(benchmark::kMillisecond);

void BM_FullGradientForwardFd(benchmark::State& state) {
  ParametricJacobian pj = make_droop_grid(20, 6, 3);
  FdConfig cfg;
  cfg.scheme = FdScheme::Forward;
  cfg.eps_p = 1e-2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(fd_sens_params(pj, pj.d, cfg));
  }
}
BENCHMARK(BM_FullGradientForwardFd)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
