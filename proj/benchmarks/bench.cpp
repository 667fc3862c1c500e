#include <benchmark/benchmark.h>

#include <random>

#include <sbl/adversary.hpp>
#include <sbl/instances.hpp>
#include <sbl/numerics.hpp>
#include <sbl/oracle.hpp>
#include <sbl/solvers.hpp>

using namespace sbl;

namespace {

instances::Instance make(instances::Kind kind, int k, double L_A = 2.0,
                         double mu = 0.0) {
  const auto d = instances::default_dims(k);
  return instances::make_instance(kind, d.m, d.n, k, 1.0, L_A, mu);
}

void BM_SpectralNorm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Matrix A(n, n + 8);
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j) A(i, j) = g(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(numerics::spectral_norm(A));
  }
}
BENCHMARK(BM_SpectralNorm)->Arg(32)->Arg(128)->Arg(512);

void BM_MakeInstance(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(make(instances::Kind::eco_ii, k, 1.0));
  }
}
BENCHMARK(BM_MakeInstance)->Arg(4)->Arg(16)->Arg(64);

void BM_ClosedForm(benchmark::State& state) {
  const auto inst = make(instances::Kind::spp_sc, static_cast<int>(state.range(0)),
                         2.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(instances::closed_form(inst));
  }
}
BENCHMARK(BM_ClosedForm)->Arg(16)->Arg(64);

void BM_LalmIteration(benchmark::State& state) {
  const auto inst = make(instances::Kind::eco_i, static_cast<int>(state.range(0)));
  const double eta = solvers::lalm_eta_auto(inst);
  for (auto _ : state) {
    oracle::InstanceOracle o(inst);
    benchmark::DoNotOptimize(solvers::run_lalm(o, eta, 16));
  }
}
BENCHMARK(BM_LalmIteration)->Arg(8)->Arg(32);

void BM_AdversaryQuery(benchmark::State& state) {
  const auto inst = make(instances::Kind::eco_i, static_cast<int>(state.range(0)));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  Vector x(inst.n), y(inst.m);
  for (auto _ : state) {
    state.PauseTiming();
    adversary::ResistingOracle ro(inst);
    for (int i = 0; i < inst.n; ++i) x(i) = g(rng);
    for (int i = 0; i < inst.m; ++i) y(i) = g(rng);
    state.ResumeTiming();
    benchmark::DoNotOptimize(ro.query(x, y));
  }
}
BENCHMARK(BM_AdversaryQuery)->Arg(8)->Arg(24);

void BM_MinQuadBall(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Matrix G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = g(rng);
  const Matrix H = G.transpose() * G / n;
  Vector c(n);
  for (int i = 0; i < n; ++i) c(i) = g(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        numerics::min_quadratic_over_ball(H, Vector::Zero(n), c, 1.0));
  }
}
BENCHMARK(BM_MinQuadBall)->Arg(16)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
