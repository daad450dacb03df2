#include "esg/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "esg/errors.hpp"
#include "esg/rng.hpp"
#include "tree_builder.hpp"

using namespace esg;

namespace {

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<double> y;
};

Dataset random_dataset(Rng& rng, int n, int p) {
  Dataset data;
  for (int i = 0; i < n; ++i) {
    std::vector<double> row;
    for (int j = 0; j < p; ++j) row.push_back(rng.uniform(0.0, 1.0));
    data.x.push_back(std::move(row));
    data.y.push_back(rng.uniform(0.0, 100.0));
  }
  return data;
}

double training_mae(const ModelArtifact& model, const Dataset& data) {
  double sum = 0.0;
  for (std::size_t i = 0; i < data.x.size(); ++i) {
    sum += std::abs(predict(model, data.x[i]) - data.y[i]);
  }
  return sum / static_cast<double>(data.x.size());
}

// Exhaustive best variance-reduction split, re-derived from the
// definition: every feature in index order, every boundary between
// consecutive distinct sorted values, cost = summed child SSE with prefix
// sums accumulated in (value, index) order.
struct OracleSplit {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

OracleSplit exhaustive_best_split(const Dataset& data) {
  const int n = static_cast<int>(data.x.size());
  const int p = static_cast<int>(data.x[0].size());
  OracleSplit best;
  for (int f = 0; f < p; ++f) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (data.x[a][f] != data.x[b][f]) return data.x[a][f] < data.x[b][f];
      return a < b;
    });
    double total_sum = 0.0;
    double total_sq = 0.0;
    for (const int i : order) {
      total_sum += data.y[i];
      total_sq += data.y[i] * data.y[i];
    }
    double left_sum = 0.0;
    double left_sq = 0.0;
    for (int k = 1; k < n; ++k) {
      const double yk = data.y[order[k - 1]];
      left_sum += yk;
      left_sq += yk * yk;
      const double lo = data.x[order[k - 1]][f];
      const double hi = data.x[order[k]][f];
      if (lo == hi) continue;
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double cost = (left_sq - left_sum * left_sum / k) +
                          (right_sq - right_sum * right_sum / (n - k));
      if (cost < best.cost) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;
        best = {true, f, threshold, cost};
      }
    }
  }
  return best;
}

}  // namespace

TEST_CASE("single unbootstrapped tree memorizes distinct rows") {
  Rng rng(1);
  const Dataset data = random_dataset(rng, 24, 4);
  Hyperparams hp;
  hp.rf.n_trees = 1;
  hp.rf.bootstrap = false;
  hp.rf.min_samples_leaf = 1;
  hp.rf.features_per_split = 4;
  hp.seed = 9;
  const ModelArtifact model =
      train(ModelKind::random_forest, data.x, data.y, hp);
  CHECK(training_mae(model, data) == 0.0);
}

TEST_CASE("one full-shrinkage unbounded GBT stage fits residuals") {
  Rng rng(2);
  const Dataset data = random_dataset(rng, 24, 4);
  Hyperparams hp;
  hp.gbt.n_stages = 1;
  hp.gbt.shrinkage = 1.0;
  hp.gbt.max_depth = 0;  // unbounded
  const ModelArtifact model = train(ModelKind::gbt, data.x, data.y, hp);
  CHECK(training_mae(model, data) <= 1e-9);
}

TEST_CASE("constant targets give constant predictions for every kind") {
  Rng rng(3);
  Dataset data = random_dataset(rng, 12, 3);
  std::fill(data.y.begin(), data.y.end(), 50.0);
  Hyperparams hp;
  hp.rf.n_trees = 5;
  hp.gbt.n_stages = 5;
  hp.knn.k = 3;
  for (const ModelKind kind : all_model_kinds()) {
    const ModelArtifact model = train(kind, data.x, data.y, hp);
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<double> row = {rng.uniform(-2.0, 2.0),
                                 rng.uniform(-2.0, 2.0),
                                 rng.uniform(-2.0, 2.0)};
      CHECK(predict(model, row) == doctest::Approx(50.0).epsilon(1e-12));
    }
    if (kind == ModelKind::svr) {
      for (const double w : model.svr_weights) CHECK(w == 0.0);
    }
  }
}

TEST_CASE("depth-1 split equals the exhaustive best split") {
  Rng rng(4);
  for (int round = 0; round < 200; ++round) {
    const int n = rng.uniform_int(4, 50);
    const int p = rng.uniform_int(1, 5);
    const Dataset data = random_dataset(rng, n, p);

    std::vector<int> indices(n);
    std::iota(indices.begin(), indices.end(), 0);
    detail::TreeOptions options;
    options.min_samples_leaf = 1;
    options.max_depth = 1;
    const std::vector<TreeNode> tree =
        detail::build_regression_tree(data.x, data.y, indices, options,
                                      nullptr);
    const OracleSplit oracle = exhaustive_best_split(data);
    REQUIRE(oracle.found);
    REQUIRE(tree[0].feature >= 0);
    CHECK(tree[0].feature == oracle.feature);
    CHECK(tree[0].threshold == oracle.threshold);
  }
}

TEST_CASE("knn predictions equal the brute-force sort oracle") {
  Rng rng(5);
  for (int round = 0; round < 100; ++round) {
    const int n = rng.uniform_int(5, 40);
    const int p = rng.uniform_int(1, 6);
    const Dataset data = random_dataset(rng, n, p);
    Hyperparams hp;
    hp.knn.k = rng.uniform_int(1, std::min(n, 7));
    const ModelArtifact model = train(ModelKind::knn, data.x, data.y, hp);

    std::vector<double> probe;
    for (int j = 0; j < p; ++j) probe.push_back(rng.uniform(0.0, 1.0));

    // Oracle over the artifact's stored standardized rows.
    const std::vector<double> z = model.standardization->apply(probe);
    std::vector<std::pair<double, std::size_t>> by_distance;
    for (std::size_t i = 0; i < model.knn_x.size(); ++i) {
      double d = 0.0;
      for (std::size_t j = 0; j < z.size(); ++j) {
        const double diff = z[j] - model.knn_x[i][j];
        d += diff * diff;
      }
      by_distance.emplace_back(d, i);
    }
    std::sort(by_distance.begin(), by_distance.end());
    double sum = 0.0;
    for (int i = 0; i < hp.knn.k; ++i) {
      sum += model.knn_y[by_distance[i].second];
    }
    const double expected =
        std::clamp(sum / hp.knn.k, 0.0, 100.0);
    CHECK(predict(model, probe) == expected);
  }
}

TEST_CASE("knn k=1 returns the nearest neighbor's target") {
  const Dataset data = {{{0.0}, {1.0}, {2.0}, {10.0}},
                        {5.0, 25.0, 45.0, 95.0}};
  Hyperparams hp;
  hp.knn.k = 1;
  const ModelArtifact model = train(ModelKind::knn, data.x, data.y, hp);
  CHECK(predict(model, std::vector<double>{1.2}) == 25.0);
  CHECK(predict(model, std::vector<double>{9.0}) == 95.0);
}

TEST_CASE("knn k=3 on a 5-point hand dataset") {
  const Dataset data = {{{0.0}, {1.0}, {2.0}, {3.0}, {40.0}},
                        {10.0, 20.0, 30.0, 40.0, 90.0}};
  Hyperparams hp;
  hp.knn.k = 3;
  const ModelArtifact model = train(ModelKind::knn, data.x, data.y, hp);
  // Probe nearest {1,2,3}: mean of 20, 30, 40.
  CHECK(predict(model, std::vector<double>{2.1}) == doctest::Approx(30.0));
}

TEST_CASE("predictions clamp to the score range") {
  ModelArtifact model;
  model.kind = ModelKind::svr;
  model.n_features = 1;
  model.standardization = Standardization{{0.0}, {1.0}};
  model.svr_weights = {0.0};
  model.svr_bias = 104.2;
  CHECK(predict(model, std::vector<double>{0.3}) == 100.0);
  model.svr_bias = -3.0;
  CHECK(predict(model, std::vector<double>{0.3}) == 0.0);
}

TEST_CASE("forest prediction is the mean of its trees") {
  Rng rng(6);
  const Dataset data = random_dataset(rng, 40, 5);
  Hyperparams hp;
  hp.rf.n_trees = 17;
  hp.seed = 77;
  const ModelArtifact model =
      train(ModelKind::random_forest, data.x, data.y, hp);
  REQUIRE(model.trees.size() == 17);
  for (int probe = 0; probe < 20; ++probe) {
    std::vector<double> row;
    for (int j = 0; j < 5; ++j) row.push_back(rng.uniform(0.0, 1.0));
    double sum = 0.0;
    for (const auto& tree : model.trees) sum += predict_tree(tree, row);
    CHECK(predict(model, row) ==
          std::clamp(sum / 17.0, 0.0, 100.0));
  }
}

TEST_CASE("gbt training loss is nonincreasing per stage") {
  Rng rng(7);
  const Dataset data = random_dataset(rng, 60, 4);
  Hyperparams hp;
  hp.gbt.n_stages = 40;
  hp.gbt.shrinkage = 0.3;
  TrainDiagnostics diagnostics;
  train(ModelKind::gbt, data.x, data.y, hp, {}, &diagnostics);
  REQUIRE(diagnostics.gbt_stage_mse.size() == 40);
  for (std::size_t i = 1; i < diagnostics.gbt_stage_mse.size(); ++i) {
    CHECK(diagnostics.gbt_stage_mse[i] <=
          diagnostics.gbt_stage_mse[i - 1] +
              1e-9 * (1.0 + diagnostics.gbt_stage_mse[i - 1]));
  }
}

TEST_CASE("svr objective is nonincreasing per epoch") {
  Rng rng(8);
  const Dataset data = random_dataset(rng, 50, 4);
  Hyperparams hp;
  hp.svr.epochs = 200;
  TrainDiagnostics diagnostics;
  train(ModelKind::svr, data.x, data.y, hp, {}, &diagnostics);
  REQUIRE(diagnostics.svr_epoch_objective.size() == 200);
  for (std::size_t i = 1; i < diagnostics.svr_epoch_objective.size(); ++i) {
    CHECK(diagnostics.svr_epoch_objective[i] <=
          diagnostics.svr_epoch_objective[i - 1] + 1e-6);
  }
}

TEST_CASE("svr learns a linear signal") {
  Rng rng(88);
  Dataset data;
  for (int i = 0; i < 60; ++i) {
    const double a = rng.uniform(-1.0, 1.0);
    const double b = rng.uniform(-1.0, 1.0);
    data.x.push_back({a, b});
    data.y.push_back(std::clamp(50.0 + 30.0 * a - 15.0 * b, 0.0, 100.0));
  }
  Hyperparams hp;
  hp.svr.epochs = 800;
  const ModelArtifact model = train(ModelKind::svr, data.x, data.y, hp);
  CHECK(training_mae(model, data) < 5.0);
}

TEST_CASE("permuting training rows does not change predictions") {
  Rng rng(9);
  const Dataset data = random_dataset(rng, 30, 4);
  Dataset permuted = data;
  std::vector<std::size_t> order(data.x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng shuffle_rng(123);
  shuffle_rng.shuffle(order);
  for (std::size_t i = 0; i < order.size(); ++i) {
    permuted.x[i] = data.x[order[i]];
    permuted.y[i] = data.y[order[i]];
  }

  Hyperparams hp;
  hp.rf.n_trees = 9;
  hp.gbt.n_stages = 9;
  hp.knn.k = 3;
  hp.svr.epochs = 50;
  hp.seed = 2024;
  for (const ModelKind kind : all_model_kinds()) {
    const ModelArtifact a = train(kind, data.x, data.y, hp);
    const ModelArtifact b = train(kind, permuted.x, permuted.y, hp);
    CHECK(serialize(a) == serialize(b));
    for (int probe = 0; probe < 10; ++probe) {
      std::vector<double> row;
      for (int j = 0; j < 4; ++j) row.push_back(rng.uniform(0.0, 1.0));
      CHECK(predict(a, row) == predict(b, row));
    }
  }
}

TEST_CASE("serialization round-trips 100 random models") {
  Rng rng(10);
  for (int round = 0; round < 100; ++round) {
    const ModelKind kind = all_model_kinds()[round % 4];
    const int n = rng.uniform_int(4, 20);
    const int p = rng.uniform_int(1, 6);
    const Dataset data = random_dataset(rng, n, p);
    Hyperparams hp;
    hp.seed = rng.next_u64();
    hp.rf.n_trees = rng.uniform_int(1, 8);
    hp.rf.min_samples_leaf = rng.uniform_int(1, 3);
    hp.gbt.n_stages = rng.uniform_int(1, 8);
    hp.gbt.max_depth = rng.uniform_int(0, 4);
    hp.knn.k = rng.uniform_int(1, n);
    hp.svr.epochs = rng.uniform_int(1, 40);
    std::vector<std::string> names;
    for (int j = 0; j < p; ++j) names.push_back("f" + std::to_string(j));

    const ModelArtifact model = train(kind, data.x, data.y, hp, names);
    const std::string payload = serialize(model);
    const ModelArtifact restored = deserialize(payload);
    CHECK(restored == model);
    CHECK(serialize(restored) == payload);
  }
}

TEST_CASE("identical training runs serialize byte-identically") {
  Rng rng(11);
  const Dataset data = random_dataset(rng, 25, 5);
  Hyperparams hp;
  hp.seed = 424242;
  const std::string a =
      serialize(train(ModelKind::random_forest, data.x, data.y, hp));
  const std::string b =
      serialize(train(ModelKind::random_forest, data.x, data.y, hp));
  CHECK(a == b);
}

TEST_CASE("malformed payloads are rejected whole") {
  Rng rng(12);
  const Dataset data = random_dataset(rng, 10, 3);
  const std::string payload =
      serialize(train(ModelKind::gbt, data.x, data.y, Hyperparams{}));

  CHECK_THROWS_AS(deserialize(payload.substr(0, payload.size() / 2)),
                  LoadError);
  CHECK_THROWS_AS(deserialize("{}"), LoadError);

  std::string wrong_version = payload;
  const auto at = wrong_version.find("\"format_version\":1");
  REQUIRE(at != std::string::npos);
  wrong_version.replace(at, 18, "\"format_version\":9");
  CHECK_THROWS_AS(deserialize(wrong_version), LoadError);
}

TEST_CASE("training input validation") {
  Hyperparams hp;
  CHECK_THROWS_AS(train(ModelKind::knn, {{1.0}}, {10.0}, hp), DataError);
  CHECK_THROWS_AS(
      train(ModelKind::knn, {{1.0}, {2.0}}, {10.0, 200.0}, hp), DataError);

  hp.knn.k = 5;
  CHECK_THROWS_AS(
      train(ModelKind::knn, {{1.0}, {2.0}}, {10.0, 20.0}, hp), ConfigError);

  hp = Hyperparams{};
  hp.gbt.shrinkage = 0.0;
  CHECK_THROWS_AS(
      train(ModelKind::gbt, {{1.0}, {2.0}}, {10.0, 20.0}, hp), ConfigError);

  // Constant feature columns are allowed; splits just skip them.
  hp = Hyperparams{};
  hp.rf.n_trees = 3;
  const ModelArtifact model = train(
      ModelKind::random_forest,
      {{1.0, 5.0}, {1.0, 6.0}, {1.0, 7.0}, {1.0, 8.0}},
      {10.0, 20.0, 30.0, 40.0}, hp);
  CHECK_NOTHROW(predict(model, std::vector<double>{1.0, 5.5}));

  CHECK_THROWS_AS(predict(model, std::vector<double>{1.0}), InputError);
}
