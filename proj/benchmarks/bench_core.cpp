#include <benchmark/benchmark.h>

#include "enif/enif.hpp"

using enif::Index;

namespace {

enif::SparseSpd lattice_precision(Index side) {
  const enif::FemMatrices fem = enif::assemble_fem(enif::rectangle_mesh(side - 1, side - 1));
  return enif::matern_fem_precision(5.0, fem, 1);
}

void BM_Cholesky(benchmark::State& state) {
  const enif::SparseSpd m = lattice_precision(state.range(0));
  const enif::Permutation perm = enif::fill_reducing_order(enif::graph_from_sparsity(m));
  for (auto _ : state) benchmark::DoNotOptimize(enif::cholesky(m, perm));
  state.counters["p"] = static_cast<double>(m.dim());
}
BENCHMARK(BM_Cholesky)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FillReducingOrder(benchmark::State& state) {
  const enif::CIGraph g = enif::lattice_graph(state.range(0), state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enif::fill_reducing_order(g));
}
BENCHMARK(BM_FillReducingOrder)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_FitAffineKr(benchmark::State& state) {
  const Index p = state.range(0);
  const enif::Ensemble e = enif::ar1_sample(p, 0.8, 200, 1);
  const enif::CIGraph g = enif::circular_markov_graph(p, 3);
  for (auto _ : state) benchmark::DoNotOptimize(enif::fit_affine_kr(e, g));
}
BENCHMARK(BM_FitAffineKr)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EnifUpdate(benchmark::State& state) {
  const Index p = state.range(0);
  const enif::GaussianOracle o = enif::ar1_oracle(p, 0.9);
  const enif::Ensemble prior = enif::ar1_sample(p, 0.9, 100, 2);
  enif::SparseMatrix h(10, p);
  for (Index k = 0; k < 10; ++k) h.insert(k, k * (p / 10)) = 1.0;
  h.makeCompressed();
  const enif::ObservationSpec obs =
      enif::linear_observation(prior, h, Eigen::VectorXd::Ones(10), enif::SparseSpd::identity(10), 3);
  for (auto _ : state) benchmark::DoNotOptimize(enif::enif_update(prior, *o.prec, obs));
}
BENCHMARK(BM_EnifUpdate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_EnkfUpdate(benchmark::State& state) {
  const Index p = state.range(0);
  const enif::Ensemble prior = enif::ar1_sample(p, 0.9, 100, 2);
  enif::SparseMatrix h(10, p);
  for (Index k = 0; k < 10; ++k) h.insert(k, k * (p / 10)) = 1.0;
  h.makeCompressed();
  const enif::ObservationSpec obs =
      enif::linear_observation(prior, h, Eigen::VectorXd::Ones(10), enif::SparseSpd::identity(10), 3);
  for (auto _ : state) benchmark::DoNotOptimize(enif::enkf_update(prior, obs));
}
BENCHMARK(BM_EnkfUpdate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_MonotoneLassoRow(benchmark::State& state) {
  const Index p = state.range(0);
  const enif::Ensemble x = enif::grf_sample({20, p / 20, 0.3, 0.1, 0.0}, 100, 4);
  const Eigen::VectorXd y = x.data().col(p / 2);
  for (auto _ : state) benchmark::DoNotOptimize(enif::monotone_lasso_row(x.data(), y));
}
BENCHMARK(BM_MonotoneLassoRow)->Arg(400)->Arg(1600)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
