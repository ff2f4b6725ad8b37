#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "stabsens/rng.hpp"
#include "stabsens/symmetric.hpp"
#include "stabsens/system_model.hpp"

namespace {

using namespace stabsens;

Eigen::MatrixXd random_square(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = rng.uniform(-1.0, 1.0);
  }
  return m;
}

void BM_SymKron(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd m = random_square(n, 11);
  const Eigen::MatrixXd k = random_square(n, 12);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_kron(m, k));
  }
}
BENCHMARK(BM_SymKron)->Arg(10)->Arg(20)->Arg(40)
    ->Unit(benchmark::kMillisecond);

void BM_SvecRoundTrip(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd m = random_square(n, 13);
  const SymMatrix sym = SymMatrix::from_dense(m);
  for (auto _ : state) {
    benchmark::DoNotOptimize(smat(svec(sym)));
  }
}
BENCHMARK(BM_SvecRoundTrip)->Arg(16)->Arg(64);

void BM_SolveLyapunov(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd j = random_square(n, 14);
  j.diagonal().array() -= j.cwiseAbs().rowwise().sum().array() + 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_lyapunov(j, -1.0));
  }
}
BENCHMARK(BM_SolveLyapunov)->Arg(10)->Arg(20)->Arg(40)
    ->Unit(benchmark::kMillisecond);

void BM_SimulateDecay(benchmark::State& state) {
  const int n = 10;
  Eigen::MatrixXd j = random_square(n, 15);
  j.diagonal().array() -= j.cwiseAbs().rowwise().sum().array() + 0.5;
  const SymMatrix phi = SymMatrix::identity(n);
  Eigen::VectorXd x0 = Eigen::VectorXd::Ones(n);
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_decay(j, phi, -1.0, x0, 10.0, 0.01));
  }
}
BENCHMARK(BM_SimulateDecay)->Unit(benchmark::kMillisecond);

}  // namespace
