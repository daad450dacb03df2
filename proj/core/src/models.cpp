#include "esg/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "esg/errors.hpp"
#include "esg/io.hpp"
#include "esg/rng.hpp"
#include "json.hpp"
#include "tree_builder.hpp"

namespace esg {

namespace {
using ordered_json = nlohmann::ordered_json;
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::random_forest: return "random_forest";
    case ModelKind::gbt: return "gbt";
    case ModelKind::knn: return "knn";
    case ModelKind::svr: return "svr";
  }
  return "random_forest";
}

std::optional<ModelKind> model_kind_from_string(std::string_view name) {
  if (name == "random_forest" || name == "rf") return ModelKind::random_forest;
  if (name == "gbt" || name == "xgboost") return ModelKind::gbt;
  if (name == "knn") return ModelKind::knn;
  if (name == "svr") return ModelKind::svr;
  return std::nullopt;
}

const std::vector<ModelKind>& all_model_kinds() {
  static const std::vector<ModelKind> kinds = {
      ModelKind::random_forest, ModelKind::gbt, ModelKind::knn,
      ModelKind::svr};
  return kinds;
}

void Hyperparams::validate() const {
  if (rf.n_trees < 1) throw ConfigError("rf.n_trees must be >= 1");
  if (rf.min_samples_leaf < 1) {
    throw ConfigError("rf.min_samples_leaf must be >= 1");
  }
  if (rf.features_per_split && *rf.features_per_split < 1) {
    throw ConfigError("rf.features_per_split must be >= 1");
  }
  if (gbt.n_stages < 1) throw ConfigError("gbt.n_stages must be >= 1");
  if (gbt.max_depth < 0) {
    throw ConfigError("gbt.max_depth must be >= 0 (0 = unbounded)");
  }
  if (!(gbt.shrinkage > 0.0) || gbt.shrinkage > 1.0) {
    throw ConfigError("gbt.shrinkage must be in (0,1]");
  }
  if (knn.k < 1) throw ConfigError("knn.k must be >= 1");
  if (svr.epsilon < 0.0) throw ConfigError("svr.epsilon must be >= 0");
  if (!(svr.l2_lambda > 0.0)) throw ConfigError("svr.l2_lambda must be > 0");
  if (svr.epochs < 1) throw ConfigError("svr.epochs must be >= 1");
}

std::vector<double> Standardization::apply(
    std::span<const double> row) const {
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) {
    out[j] = sd[j] == 0.0 ? 0.0 : (row[j] - mean[j]) / sd[j];
  }
  return out;
}

namespace {

std::uint64_t fnv1a_bytes(std::uint64_t hash, const void* data,
                          std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= bytes[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t hash_double(std::uint64_t hash, double value) {
  if (value == 0.0) value = 0.0;  // fold -0.0 into +0.0
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, sizeof bits);
  return fnv1a_bytes(hash, &bits, sizeof bits);
}

// Canonical training order: rows sorted by hash, ties by content. Seeded
// sampling indexes this order, so permuting the caller's rows cannot
// change any model.
std::vector<std::size_t> canonical_row_order(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<std::uint64_t> hashes(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t h = 1469598103934665603ULL;
    for (const double v : x[i]) h = hash_double(h, v);
    hashes[i] = hash_double(h, y[i]);
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });
  return order;
}

void validate_training_data(const std::vector<std::vector<double>>& x,
                            const std::vector<double>& y) {
  if (x.size() < 2) throw DataError("training requires at least 2 rows");
  if (x.size() != y.size()) {
    throw DataError("feature rows and targets differ in length");
  }
  const std::size_t p = x[0].size();
  if (p == 0) throw DataError("training rows have no features");
  for (const auto& row : x) {
    if (row.size() != p) throw DataError("ragged feature matrix");
    for (const double v : row) {
      if (!std::isfinite(v)) throw DataError("non-finite feature value");
    }
  }
  for (const double v : y) {
    if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
      throw DataError("target outside [0,100]");
    }
  }
}

Standardization fit_standardization(
    const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size();
  const std::size_t p = x[0].size();
  Standardization stats;
  stats.mean.assign(p, 0.0);
  stats.sd.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += x[i][j];
    stats.mean[j] = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i][j] - stats.mean[j];
      sq += d * d;
    }
    stats.sd[j] = std::sqrt(sq / static_cast<double>(n));
  }
  return stats;
}

void train_random_forest(ModelArtifact& model,
                         const std::vector<std::vector<double>>& x,
                         const std::vector<double>& y) {
  const int n = static_cast<int>(x.size());
  const int p = static_cast<int>(x[0].size());
  const RfParams& params = model.hyperparams.rf;
  int mtry = params.features_per_split
                 ? *params.features_per_split
                 : (p + 2) / 3;  // ceil(p / 3)
  mtry = std::clamp(mtry, 1, p);

  detail::TreeOptions options;
  options.min_samples_leaf = params.min_samples_leaf;
  options.max_depth = 0;
  if (mtry < p) options.mtry = mtry;

  model.trees.reserve(static_cast<std::size_t>(params.n_trees));
  for (int t = 0; t < params.n_trees; ++t) {
    Rng rng(model.hyperparams.seed + static_cast<std::uint64_t>(t));
    std::vector<int> indices;
    indices.reserve(static_cast<std::size_t>(n));
    if (params.bootstrap) {
      for (int i = 0; i < n; ++i) {
        indices.push_back(static_cast<int>(
            rng.uniform_below(static_cast<std::uint64_t>(n))));
      }
      std::sort(indices.begin(), indices.end());
    } else {
      for (int i = 0; i < n; ++i) indices.push_back(i);
    }
    model.trees.push_back(
        detail::build_regression_tree(x, y, indices, options, &rng));
  }
}

void train_gbt(ModelArtifact& model,
               const std::vector<std::vector<double>>& x,
               const std::vector<double>& y, TrainDiagnostics* diagnostics) {
  const std::size_t n = x.size();
  const GbtParams& params = model.hyperparams.gbt;

  double sum = 0.0;
  for (const double v : y) sum += v;
  model.gbt_base = sum / static_cast<double>(n);

  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i) residuals[i] = y[i] - model.gbt_base;

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  detail::TreeOptions options;
  options.min_samples_leaf = 1;
  options.max_depth = params.max_depth;

  model.trees.reserve(static_cast<std::size_t>(params.n_stages));
  for (int stage = 0; stage < params.n_stages; ++stage) {
    auto tree =
        detail::build_regression_tree(x, residuals, all, options, nullptr);
    double mse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      residuals[i] -= params.shrinkage * predict_tree(tree, x[i]);
      mse += residuals[i] * residuals[i];
    }
    model.trees.push_back(std::move(tree));
    if (diagnostics) {
      diagnostics->gbt_stage_mse.push_back(mse / static_cast<double>(n));
    }
  }
}

void train_knn(ModelArtifact& model,
               const std::vector<std::vector<double>>& x,
               const std::vector<double>& y) {
  if (model.hyperparams.knn.k > static_cast<int>(x.size())) {
    throw ConfigError("knn.k = " +
                      std::to_string(model.hyperparams.knn.k) +
                      " exceeds training size " +
                      std::to_string(x.size()));
  }
  model.standardization = fit_standardization(x);
  model.knn_x.reserve(x.size());
  for (const auto& row : x) {
    model.knn_x.push_back(model.standardization->apply(row));
  }
  model.knn_y = y;
}

double svr_objective(const std::vector<std::vector<double>>& z,
                     const std::vector<double>& y,
                     const std::vector<double>& w, double b, double epsilon,
                     double lambda) {
  const std::size_t n = z.size();
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = b;
    for (std::size_t j = 0; j < w.size(); ++j) f += w[j] * z[i][j];
    const double excess = std::abs(f - y[i]) - epsilon;
    if (excess > 0.0) loss += excess;
  }
  double penalty = 0.0;
  for (const double wj : w) penalty += wj * wj;
  return loss / static_cast<double>(n) + lambda * penalty;
}

void train_svr(ModelArtifact& model,
               const std::vector<std::vector<double>>& x,
               const std::vector<double>& y, TrainDiagnostics* diagnostics) {
  const std::size_t n = x.size();
  const std::size_t p = x[0].size();
  const SvrParams& params = model.hyperparams.svr;

  model.standardization = fit_standardization(x);
  std::vector<std::vector<double>> z;
  z.reserve(n);
  for (const auto& row : x) {
    z.push_back(model.standardization->apply(row));
  }

  double sum = 0.0;
  for (const double v : y) sum += v;
  std::vector<double> w(p, 0.0);
  double b = sum / static_cast<double>(n);
  double objective =
      svr_objective(z, y, w, b, params.epsilon, params.l2_lambda);

  std::vector<double> grad_w(p);
  for (int t = 1; t <= params.epochs; ++t) {
    const double step = 1.0 / (params.l2_lambda * static_cast<double>(t));

    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double f = b;
      for (std::size_t j = 0; j < p; ++j) f += w[j] * z[i][j];
      const double r = f - y[i];
      if (std::abs(r) <= params.epsilon) continue;
      const double s = r > 0.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < p; ++j) grad_w[j] += s * z[i][j];
      grad_b += s;
    }
    std::vector<double> w_next(p);
    for (std::size_t j = 0; j < p; ++j) {
      w_next[j] = w[j] - step * (2.0 * params.l2_lambda * w[j] +
                                 grad_w[j] / static_cast<double>(n));
    }
    const double b_next = b - step * (grad_b / static_cast<double>(n));

    // Keep the subgradient step only when it does not worsen the
    // objective; early 1/(lambda*t) steps overshoot and are discarded.
    const double candidate =
        svr_objective(z, y, w_next, b_next, params.epsilon, params.l2_lambda);
    if (candidate <= objective) {
      w = std::move(w_next);
      b = b_next;
      objective = candidate;
    }
    if (diagnostics) diagnostics->svr_epoch_objective.push_back(objective);
  }
  model.svr_weights = std::move(w);
  model.svr_bias = b;
}

}  // namespace

ModelArtifact train(ModelKind kind, const std::vector<std::vector<double>>& x,
                    const std::vector<double>& y, const Hyperparams& hp,
                    std::vector<std::string> feature_names,
                    TrainDiagnostics* diagnostics) {
  validate_training_data(x, y);
  hp.validate();
  const std::size_t p = x[0].size();
  if (!feature_names.empty() && feature_names.size() != p) {
    throw InputError("feature_names length disagrees with feature count");
  }

  const std::vector<std::size_t> order = canonical_row_order(x, y);
  std::vector<std::vector<double>> xc;
  std::vector<double> yc;
  xc.reserve(x.size());
  yc.reserve(y.size());
  for (const std::size_t i : order) {
    xc.push_back(x[i]);
    yc.push_back(y[i]);
  }

  ModelArtifact model;
  model.kind = kind;
  model.hyperparams = hp;
  model.hyperparams.kind = kind;
  model.feature_names = std::move(feature_names);
  model.n_features = static_cast<int>(p);
  model.n_train = static_cast<int>(x.size());

  switch (kind) {
    case ModelKind::random_forest:
      train_random_forest(model, xc, yc);
      break;
    case ModelKind::gbt:
      train_gbt(model, xc, yc, diagnostics);
      break;
    case ModelKind::knn:
      train_knn(model, xc, yc);
      break;
    case ModelKind::svr:
      train_svr(model, xc, yc, diagnostics);
      break;
  }
  return model;
}

double predict_tree(const std::vector<TreeNode>& nodes,
                    std::span<const double> row) {
  std::size_t at = 0;
  while (nodes[at].feature >= 0) {
    const TreeNode& node = nodes[at];
    at = static_cast<std::size_t>(
        row[static_cast<std::size_t>(node.feature)] <= node.threshold
            ? node.left
            : node.right);
  }
  return nodes[at].value;
}

double predict(const ModelArtifact& model, std::span<const double> row) {
  if (static_cast<int>(row.size()) != model.n_features) {
    throw InputError("feature row has " + std::to_string(row.size()) +
                     " values, model expects " +
                     std::to_string(model.n_features));
  }
  double raw = 0.0;
  switch (model.kind) {
    case ModelKind::random_forest: {
      double sum = 0.0;
      for (const auto& tree : model.trees) sum += predict_tree(tree, row);
      raw = sum / static_cast<double>(model.trees.size());
      break;
    }
    case ModelKind::gbt: {
      double sum = 0.0;
      for (const auto& tree : model.trees) sum += predict_tree(tree, row);
      raw = model.gbt_base + model.hyperparams.gbt.shrinkage * sum;
      break;
    }
    case ModelKind::knn: {
      const std::vector<double> z = model.standardization->apply(row);
      struct Entry {
        double dist_sq;
        std::size_t index;
      };
      std::vector<Entry> entries;
      entries.reserve(model.knn_x.size());
      for (std::size_t i = 0; i < model.knn_x.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < z.size(); ++j) {
          const double diff = z[j] - model.knn_x[i][j];
          d += diff * diff;
        }
        entries.push_back({d, i});
      }
      std::sort(entries.begin(), entries.end(),
                [](const Entry& a, const Entry& b) {
                  if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
                  return a.index < b.index;
                });
      const std::size_t k =
          static_cast<std::size_t>(model.hyperparams.knn.k);
      double sum = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        sum += model.knn_y[entries[i].index];
      }
      raw = sum / static_cast<double>(k);
      break;
    }
    case ModelKind::svr: {
      const std::vector<double> z = model.standardization->apply(row);
      double f = model.svr_bias;
      for (std::size_t j = 0; j < z.size(); ++j) {
        f += model.svr_weights[j] * z[j];
      }
      raw = f;
      break;
    }
  }
  return std::clamp(raw, 0.0, 100.0);
}

namespace {

constexpr int kFormatVersion = 1;

ordered_json hyperparams_to_json(const Hyperparams& hp) {
  ordered_json j;
  j["seed"] = hp.seed;
  j["rf"] = {
      {"n_trees", hp.rf.n_trees},
      {"min_samples_leaf", hp.rf.min_samples_leaf},
      {"features_per_split",
       hp.rf.features_per_split ? ordered_json(*hp.rf.features_per_split)
                                : ordered_json(nullptr)},
      {"bootstrap", hp.rf.bootstrap},
  };
  j["gbt"] = {
      {"n_stages", hp.gbt.n_stages},
      {"max_depth", hp.gbt.max_depth},
      {"shrinkage", hp.gbt.shrinkage},
  };
  j["knn"] = {{"k", hp.knn.k}};
  j["svr"] = {
      {"epsilon", hp.svr.epsilon},
      {"l2_lambda", hp.svr.l2_lambda},
      {"epochs", hp.svr.epochs},
  };
  return j;
}

Hyperparams hyperparams_from_json(const ordered_json& j, ModelKind kind) {
  Hyperparams hp;
  hp.kind = kind;
  hp.seed = j.at("seed").get<std::uint64_t>();
  const auto& rf = j.at("rf");
  hp.rf.n_trees = rf.at("n_trees").get<int>();
  hp.rf.min_samples_leaf = rf.at("min_samples_leaf").get<int>();
  if (!rf.at("features_per_split").is_null()) {
    hp.rf.features_per_split = rf.at("features_per_split").get<int>();
  }
  hp.rf.bootstrap = rf.at("bootstrap").get<bool>();
  const auto& gbt = j.at("gbt");
  hp.gbt.n_stages = gbt.at("n_stages").get<int>();
  hp.gbt.max_depth = gbt.at("max_depth").get<int>();
  hp.gbt.shrinkage = gbt.at("shrinkage").get<double>();
  hp.knn.k = j.at("knn").at("k").get<int>();
  const auto& svr = j.at("svr");
  hp.svr.epsilon = svr.at("epsilon").get<double>();
  hp.svr.l2_lambda = svr.at("l2_lambda").get<double>();
  hp.svr.epochs = svr.at("epochs").get<int>();
  return hp;
}

void validate_tree(const std::vector<TreeNode>& nodes, int n_features) {
  if (nodes.empty()) throw LoadError("empty tree in payload");
  const int size = static_cast<int>(nodes.size());
  for (int i = 0; i < size; ++i) {
    const TreeNode& node = nodes[static_cast<std::size_t>(i)];
    const bool leaf = node.feature < 0;
    if (leaf) {
      if (node.left != -1 || node.right != -1) {
        throw LoadError("leaf node with children");
      }
      continue;
    }
    if (node.feature >= n_features) {
      throw LoadError("tree references feature " +
                      std::to_string(node.feature) + " out of range");
    }
    // Preorder layout: children strictly after the parent.
    if (node.left <= i || node.left >= size || node.right <= i ||
        node.right >= size) {
      throw LoadError("malformed tree topology");
    }
    if (!std::isfinite(node.threshold)) {
      throw LoadError("non-finite split threshold");
    }
  }
}

}  // namespace

std::string serialize(const ModelArtifact& model) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = std::string(to_string(model.kind));
  j["hyperparams"] = hyperparams_to_json(model.hyperparams);
  j["feature_names"] = model.feature_names;
  j["n_features"] = model.n_features;
  j["n_train"] = model.n_train;
  if (model.standardization) {
    j["standardization"] = {{"mean", model.standardization->mean},
                            {"sd", model.standardization->sd}};
  } else {
    j["standardization"] = nullptr;
  }
  ordered_json trees = ordered_json::array();
  for (const auto& tree : model.trees) {
    ordered_json nodes = ordered_json::array();
    for (const TreeNode& node : tree) {
      nodes.push_back(ordered_json::array(
          {node.feature, node.threshold, node.left, node.right, node.value}));
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  j["gbt_base"] = model.gbt_base;
  if (model.kind == ModelKind::knn) {
    j["knn"] = {{"x", model.knn_x}, {"y", model.knn_y}};
  } else {
    j["knn"] = nullptr;
  }
  if (model.kind == ModelKind::svr) {
    j["svr"] = {{"weights", model.svr_weights}, {"bias", model.svr_bias}};
  } else {
    j["svr"] = nullptr;
  }
  return j.dump();
}

ModelArtifact deserialize(std::string_view payload) {
  ordered_json j;
  try {
    j = ordered_json::parse(payload);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("model payload is not valid JSON: ") +
                    e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw LoadError("unsupported model format_version " +
                      std::to_string(version));
    }
    ModelArtifact model;
    const std::string kind_name = j.at("kind").get<std::string>();
    const auto kind = model_kind_from_string(kind_name);
    if (!kind) throw LoadError("unknown model kind \"" + kind_name + "\"");
    model.kind = *kind;
    model.hyperparams = hyperparams_from_json(j.at("hyperparams"), *kind);
    model.feature_names =
        j.at("feature_names").get<std::vector<std::string>>();
    model.n_features = j.at("n_features").get<int>();
    model.n_train = j.at("n_train").get<int>();
    if (model.n_features < 1) throw LoadError("n_features must be >= 1");

    if (!j.at("standardization").is_null()) {
      Standardization stats;
      stats.mean =
          j.at("standardization").at("mean").get<std::vector<double>>();
      stats.sd = j.at("standardization").at("sd").get<std::vector<double>>();
      if (stats.mean.size() != stats.sd.size() ||
          static_cast<int>(stats.mean.size()) != model.n_features) {
        throw LoadError("standardization stats disagree with n_features");
      }
      model.standardization = std::move(stats);
    }

    for (const auto& tree_json : j.at("trees")) {
      std::vector<TreeNode> tree;
      tree.reserve(tree_json.size());
      for (const auto& node_json : tree_json) {
        if (!node_json.is_array() || node_json.size() != 5) {
          throw LoadError("tree node must be a 5-element array");
        }
        TreeNode node;
        node.feature = node_json[0].get<int>();
        node.threshold = node_json[1].get<double>();
        node.left = node_json[2].get<int>();
        node.right = node_json[3].get<int>();
        node.value = node_json[4].get<double>();
        tree.push_back(node);
      }
      validate_tree(tree, model.n_features);
      model.trees.push_back(std::move(tree));
    }
    model.gbt_base = j.at("gbt_base").get<double>();

    if (!j.at("knn").is_null()) {
      model.knn_x =
          j.at("knn").at("x").get<std::vector<std::vector<double>>>();
      model.knn_y = j.at("knn").at("y").get<std::vector<double>>();
      if (model.knn_x.size() != model.knn_y.size()) {
        throw LoadError("knn x/y size mismatch");
      }
    }
    if (!j.at("svr").is_null()) {
      model.svr_weights =
          j.at("svr").at("weights").get<std::vector<double>>();
      model.svr_bias = j.at("svr").at("bias").get<double>();
      if (static_cast<int>(model.svr_weights.size()) != model.n_features) {
        throw LoadError("svr weight count disagrees with n_features");
      }
    }

    switch (model.kind) {
      case ModelKind::random_forest:
        if (model.trees.empty()) throw LoadError("forest without trees");
        break;
      case ModelKind::gbt:
        if (model.trees.empty()) throw LoadError("gbt without stages");
        break;
      case ModelKind::knn:
        if (model.knn_x.empty() || !model.standardization) {
          throw LoadError("knn payload incomplete");
        }
        if (model.hyperparams.knn.k >
            static_cast<int>(model.knn_x.size())) {
          throw LoadError("knn.k exceeds stored training size");
        }
        break;
      case ModelKind::svr:
        if (model.svr_weights.empty() || !model.standardization) {
          throw LoadError("svr payload incomplete");
        }
        break;
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("model payload malformed: ") + e.what());
  }
}

void save_model(const ModelArtifact& model,
                const std::filesystem::path& path) {
  io::atomic_write(path, serialize(model));
}

ModelArtifact load_model(const std::filesystem::path& path) {
  return deserialize(io::read_file(path));
}

}  // namespace esg
