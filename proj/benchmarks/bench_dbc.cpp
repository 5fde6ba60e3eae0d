#include <random>

#include <benchmark/benchmark.h>
#include <Eigen/Dense>

#include "dbc/boundary.hpp"
#include "dbc/dataset.hpp"
#include "dbc/model.hpp"
#include "dbc/spectrum.hpp"
#include "dbc/stats.hpp"

namespace {

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

void BM_Forward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto model = dbc::MlpModel::glorot({n, 10, 32, 16, 1}, dbc::Activation::relu, 1);
  const Eigen::MatrixXd x = gaussian(static_cast<Eigen::Index>(n), 256, 2);
  for (auto _ : state) benchmark::DoNotOptimize(model.decide_batch(x));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_Forward)->Arg(2)->Arg(30)->Arg(3072);

void BM_CrossingBatch(benchmark::State& state) {
  const std::size_t n = 30;
  const auto model = dbc::MlpModel::glorot({n, 20, 20, 20, 1}, dbc::Activation::relu, 3);
  Eigen::MatrixXd a = gaussian(n, state.range(0), 4);
  Eigen::MatrixXd b = gaussian(n, state.range(0), 5);
  const dbc::CrossingConfig config;
  for (auto _ : state) benchmark::DoNotOptimize(dbc::find_crossings(model, a, b, config));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CrossingBatch)->Arg(31)->Arg(1000);

void BM_Spectrum(benchmark::State& state) {
  const Eigen::MatrixXd x = gaussian(state.range(0), state.range(1), 6);
  for (auto _ : state) benchmark::DoNotOptimize(dbc::normalized_entropy(dbc::eigen_spectrum(x)));
}
BENCHMARK(BM_Spectrum)->Args({2, 11})->Args({30, 31})->Args({3072, 16})->Args({30, 2500});

void BM_LocalBatch(benchmark::State& state) {
  dbc::BlobsConfig c;
  c.dimension = 30;
  c.per_class = 300;
  const auto data = dbc::make_blobs(c);
  const dbc::LinearClassifier f(Eigen::VectorXd::Unit(30, 0), 0.0);
  const dbc::ScoringOptions o;
  for (auto _ : state) benchmark::DoNotOptimize(dbc::dbc_local_batch(f, data, 100, 30, o, 7));
  state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_LocalBatch)->Unit(benchmark::kMillisecond);

void BM_SignedRank(benchmark::State& state) {
  const Eigen::MatrixXd x = gaussian(2, state.range(0), 8);
  std::vector<double> a(x.row(0).begin(), x.row(0).end()), b(x.row(1).begin(), x.row(1).end());
  for (auto _ : state) benchmark::DoNotOptimize(dbc::signed_rank_test(a, b, dbc::Alternative::a_less));
}
BENCHMARK(BM_SignedRank)->Arg(20)->Arg(2500);

}  // namespace

BENCHMARK_MAIN();
