#include <benchmark/benchmark.h>

#include "esg/eval.hpp"
#include "esg/models.hpp"
#include "esg/rng.hpp"

namespace {

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
};

// Production-sized working set: ~320 companies x 20 features.
Dataset training_set() {
  Dataset data;
  esg::Rng rng(7);
  for (int i = 0; i < 320; ++i) {
    std::vector<double> row;
    const double q = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < 20; ++j) {
      row.push_back(q + rng.uniform(-0.3, 0.3));
    }
    data.x.push_back(std::move(row));
    data.y.push_back(std::clamp(50.0 + 40.0 * q, 0.0, 100.0));
  }
  return data;
}

void BM_Train(benchmark::State& state) {
  const Dataset data = training_set();
  const auto kind = static_cast<esg::ModelKind>(state.range(0));
  esg::Hyperparams hp;
  hp.seed = 99;
  for (auto _ : state) {
    benchmark::DoNotOptimize(esg::train(kind, data.x, data.y, hp));
  }
}
BENCHMARK(BM_Train)
    ->Arg(static_cast<int>(esg::ModelKind::random_forest))
    ->Arg(static_cast<int>(esg::ModelKind::gbt))
    ->Arg(static_cast<int>(esg::ModelKind::knn))
    ->Arg(static_cast<int>(esg::ModelKind::svr));

void BM_Predict(benchmark::State& state) {
  const Dataset data = training_set();
  const auto kind = static_cast<esg::ModelKind>(state.range(0));
  esg::Hyperparams hp;
  hp.seed = 99;
  const esg::ModelArtifact model = esg::train(kind, data.x, data.y, hp);
  std::size_t at = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(esg::predict(model, data.x[at]));
    at = (at + 1) % data.x.size();
  }
}
BENCHMARK(BM_Predict)
    ->Arg(static_cast<int>(esg::ModelKind::random_forest))
    ->Arg(static_cast<int>(esg::ModelKind::gbt))
    ->Arg(static_cast<int>(esg::ModelKind::knn))
    ->Arg(static_cast<int>(esg::ModelKind::svr));

void BM_PValue(benchmark::State& state) {
  double r = 0.0;
  for (auto _ : state) {
    r = r >= 0.9 ? 0.01 : r + 0.013;
    benchmark::DoNotOptimize(esg::p_value(r, 64));
  }
}
BENCHMARK(BM_PValue);

}  // namespace

BENCHMARK_MAIN();
