#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace esg {

enum class ModelKind { random_forest, gbt, knn, svr };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view name);
const std::vector<ModelKind>& all_model_kinds();

struct RfParams {
  int n_trees = 200;
  int min_samples_leaf = 2;
  // Features considered per split; unset means ceil(p / 3) at fit time.
  std::optional<int> features_per_split;
  bool bootstrap = true;

  bool operator==(const RfParams&) const = default;
};

struct GbtParams {
  int n_stages = 300;
  int max_depth = 3;  // 0 = unbounded
  double shrinkage = 0.05;

  bool operator==(const GbtParams&) const = default;
};

struct KnnParams {
  int k = 5;  // uniform weighting

  bool operator==(const KnnParams&) const = default;
};

struct SvrParams {
  double epsilon = 1.0;  // insensitive band, in score points
  double l2_lambda = 0.01;
  int epochs = 500;

  bool operator==(const SvrParams&) const = default;
};

struct Hyperparams {
  ModelKind kind = ModelKind::random_forest;
  RfParams rf;
  GbtParams gbt;
  KnnParams knn;
  SvrParams svr;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError

  bool operator==(const Hyperparams&) const = default;
};

// Flat binary-tree node. Leaves have feature == -1 and carry the
// prediction in `value`; internal nodes route x[feature] <= threshold to
// `left`, otherwise `right`. Children always follow their parent in the
// array (preorder).
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;

  bool operator==(const TreeNode&) const = default;
};

// Per-feature mean and population sd. Columns with sd 0 standardize to 0.
struct Standardization {
  std::vector<double> mean;
  std::vector<double> sd;

  std::vector<double> apply(std::span<const double> row) const;

  bool operator==(const Standardization&) const = default;
};

// Optional training traces for convergence checks.
struct TrainDiagnostics {
  std::vector<double> gbt_stage_mse;        // training MSE after each stage
  std::vector<double> svr_epoch_objective;  // objective after each epoch
};

struct ModelArtifact {
  ModelKind kind = ModelKind::random_forest;
  Hyperparams hyperparams;
  std::vector<std::string> feature_names;
  int n_features = 0;
  int n_train = 0;
  std::optional<Standardization> standardization;  // knn and svr only
  std::vector<std::vector<TreeNode>> trees;        // rf trees / gbt stages
  double gbt_base = 0.0;                           // gbt initial prediction
  std::vector<std::vector<double>> knn_x;          // standardized rows
  std::vector<double> knn_y;
  std::vector<double> svr_weights;
  double svr_bias = 0.0;

  bool operator==(const ModelArtifact&) const = default;
};

// Deterministic training: identical (x, y, hp) give identical artifacts.
// Rows are first put into a canonical order keyed by a row hash, so the
// caller's row order cannot influence seeded sampling; forest tree i draws
// from seed hp.seed + i, so trees could be built in parallel without
// changing results.
//
//   random_forest: bootstrap per tree, greedy variance-reduction splits
//                  over a random feature subset, mean-of-leaves output.
//   gbt:           stagewise depth-capped trees fit to residuals,
//                  prediction updated by shrinkage * tree.
//   knn:           standardize and memorize.
//   svr:           linear epsilon-insensitive loss + L2 penalty on
//                  standardized features, full-batch subgradient steps
//                  step_t = 1/(l2_lambda * t); an epoch's update is kept
//                  only when it does not increase the objective, so the
//                  per-epoch objective trace is nonincreasing.
ModelArtifact train(ModelKind kind, const std::vector<std::vector<double>>& x,
                    const std::vector<double>& y, const Hyperparams& hp,
                    std::vector<std::string> feature_names = {},
                    TrainDiagnostics* diagnostics = nullptr);

// Raw model output clamped to [0, 100].
double predict(const ModelArtifact& model, std::span<const double> row);

double predict_tree(const std::vector<TreeNode>& nodes,
                    std::span<const double> row);

// Versioned JSON ("format_version": 1) with explicit node arrays and
// stable field order; identical artifacts serialize to identical bytes.
std::string serialize(const ModelArtifact& model);
ModelArtifact deserialize(std::string_view payload);  // throws LoadError

void save_model(const ModelArtifact& model,
                const std::filesystem::path& path);
ModelArtifact load_model(const std::filesystem::path& path);

}  // namespace esg
