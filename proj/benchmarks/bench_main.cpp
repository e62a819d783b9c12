#include <benchmark/benchmark.h>

#include "mktlab/correlation.hpp"
#include "mktlab/dcca.hpp"
#include "mktlab/ffnn.hpp"
#include "mktlab/levy.hpp"
#include "mktlab/pca.hpp"
#include "mktlab/synthetic.hpp"

using namespace mktlab;

static void BM_DccaF2(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = synthetic::gaussian(n, 1);
  const auto b = synthetic::gaussian(n, 2);
  const auto boxes = default_box_sizes(n);
  for (auto _ : state) benchmark::DoNotOptimize(dcca_f2(a, b, boxes));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * boxes.size()));
}
BENCHMARK(BM_DccaF2)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

static void BM_CrossCorrelation(benchmark::State& state) {
  const auto a = reduce("A", synthetic::gaussian(20000, 3));
  const auto b = reduce("B", synthetic::gaussian(20000, 4));
  for (auto _ : state) benchmark::DoNotOptimize(cross_correlation(a, b, 100));
}
BENCHMARK(BM_CrossCorrelation)->Unit(benchmark::kMillisecond);

static void BM_ReturnToOrigin(benchmark::State& state) {
  const auto x = synthetic::gaussian(100000, 5);
  const std::vector<std::size_t> n{1, 2, 4, 8, 16, 32, 64, 128, 256};
  const double bin = default_bin_width(x);
  for (auto _ : state) benchmark::DoNotOptimize(return_to_origin(x, n, state.range(0), bin, 1));
}
BENCHMARK(BM_ReturnToOrigin)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_LevySampler(benchmark::State& state) {
  const auto params = make_levy_params(1.5, 1.0, 20.0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_truncated_levy(params, 100000, 7));
}
BENCHMARK(BM_LevySampler)->Unit(benchmark::kMillisecond);

static void BM_RollingFeature(benchmark::State& state) {
  synthetic::MarketShape shape;
  shape.series = static_cast<std::size_t>(state.range(0));
  const auto panel = synthetic::random_walk_panel(shape, 1);
  for (auto _ : state) benchmark::DoNotOptimize(rolling_feature(panel, 10, true));
}
BENCHMARK(BM_RollingFeature)->Arg(4)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_FfnnTrainEpoch(benchmark::State& state) {
  auto net = ffnn::Network::initialized({5, 30, 1}, {ffnn::Activation::tanh(), ffnn::Activation::linear()}, 1);
  ffnn::AdamState adam(net, {});
  ffnn::TrainingBatch batch{Eigen::MatrixXd::Random(20, 5), Eigen::VectorXd::Random(20)};
  for (auto _ : state) benchmark::DoNotOptimize(ffnn::train(net, adam, batch, 1));
}
BENCHMARK(BM_FfnnTrainEpoch)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
