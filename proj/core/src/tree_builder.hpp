#pragma once

#include <optional>
#include <vector>

#include "esg/models.hpp"
#include "esg/rng.hpp"

namespace esg::detail {

struct TreeOptions {
  int min_samples_leaf = 1;
  int max_depth = 0;         // 0 = unbounded
  std::optional<int> mtry;   // features per split; nullopt = all
};

// Greedy variance-reduction regression tree over x[indices] (indices may
// repeat for bootstrap samples). Split search scans features in ascending
// index order and thresholds in ascending value order, keeping the first
// strictly best candidate; child index lists preserve the parent's order.
// rng is only consulted when mtry is set and smaller than the feature
// count.
std::vector<TreeNode> build_regression_tree(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y,
    const std::vector<int>& indices, const TreeOptions& options, Rng* rng);

}  // namespace esg::detail
