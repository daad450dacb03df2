#include "tree_builder.hpp"

#include <algorithm>
#include <limits>

namespace esg::detail {

namespace {

struct BestSplit {
  int feature = -1;
  double threshold = 0.0;
  double cost = std::numeric_limits<double>::infinity();

  bool found() const { return feature >= 0; }
};

// Weighted child SSE of the (feature, threshold) candidates, minimized.
// Left prefix sums run in (value, index) order; identical scan order keeps
// the arithmetic reproducible for an external re-derivation.
BestSplit find_best_split(const std::vector<std::vector<double>>& x,
                          const std::vector<double>& y,
                          const std::vector<int>& indices,
                          const std::vector<int>& features,
                          int min_samples_leaf) {
  const std::size_t n = indices.size();
  BestSplit best;

  std::vector<int> sorted(indices);
  for (const int feature : features) {
    std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
      const double va = x[static_cast<std::size_t>(a)]
                         [static_cast<std::size_t>(feature)];
      const double vb = x[static_cast<std::size_t>(b)]
                         [static_cast<std::size_t>(feature)];
      if (va != vb) return va < vb;
      return a < b;
    });

    double total_sum = 0.0;
    double total_sq = 0.0;
    for (const int i : sorted) {
      total_sum += y[static_cast<std::size_t>(i)];
      total_sq += y[static_cast<std::size_t>(i)] *
                  y[static_cast<std::size_t>(i)];
    }

    double left_sum = 0.0;
    double left_sq = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
      const double yk = y[static_cast<std::size_t>(sorted[k - 1])];
      left_sum += yk;
      left_sq += yk * yk;
      const double lo = x[static_cast<std::size_t>(sorted[k - 1])]
                         [static_cast<std::size_t>(feature)];
      const double hi = x[static_cast<std::size_t>(sorted[k])]
                         [static_cast<std::size_t>(feature)];
      if (lo == hi) continue;  // not a value boundary
      if (k < static_cast<std::size_t>(min_samples_leaf) ||
          n - k < static_cast<std::size_t>(min_samples_leaf)) {
        continue;
      }
      const double right_sum = total_sum - left_sum;
      const double right_sq = total_sq - left_sq;
      const double cost =
          (left_sq - left_sum * left_sum / static_cast<double>(k)) +
          (right_sq - right_sum * right_sum / static_cast<double>(n - k));
      if (cost < best.cost) {
        double threshold = lo + (hi - lo) / 2.0;
        if (!(threshold < hi)) threshold = lo;  // rounding guard
        best.feature = feature;
        best.threshold = threshold;
        best.cost = cost;
      }
    }
  }
  return best;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& x,
              const std::vector<double>& y, const TreeOptions& options,
              Rng* rng)
      : x_(x), y_(y), options_(options), rng_(rng),
        n_features_(static_cast<int>(x.empty() ? 0 : x[0].size())) {}

  std::vector<TreeNode> build(const std::vector<int>& indices) {
    nodes_.clear();
    grow(indices, 0);
    return std::move(nodes_);
  }

 private:
  std::vector<int> pick_features() {
    std::vector<int> all(static_cast<std::size_t>(n_features_));
    for (int f = 0; f < n_features_; ++f) {
      all[static_cast<std::size_t>(f)] = f;
    }
    if (!options_.mtry || *options_.mtry >= n_features_ || rng_ == nullptr) {
      return all;
    }
    const int mtry = *options_.mtry;
    // Partial Fisher-Yates, then ascending order for the split scan.
    for (int i = 0; i < mtry; ++i) {
      const int j = i + static_cast<int>(rng_->uniform_below(
                            static_cast<std::uint64_t>(n_features_ - i)));
      std::swap(all[static_cast<std::size_t>(i)],
                all[static_cast<std::size_t>(j)]);
    }
    all.resize(static_cast<std::size_t>(mtry));
    std::sort(all.begin(), all.end());
    return all;
  }

  int grow(const std::vector<int>& indices, int depth) {
    const int node_id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();

    const std::size_t n = indices.size();
    double sum = 0.0;
    double y_min = y_[static_cast<std::size_t>(indices[0])];
    double y_max = y_min;
    for (const int i : indices) {
      const double yi = y_[static_cast<std::size_t>(i)];
      sum += yi;
      y_min = std::min(y_min, yi);
      y_max = std::max(y_max, yi);
    }
    const double mean = sum / static_cast<double>(n);
    nodes_[static_cast<std::size_t>(node_id)].value = mean;

    const bool depth_capped =
        options_.max_depth > 0 && depth >= options_.max_depth;
    if (n < 2 * static_cast<std::size_t>(options_.min_samples_leaf) ||
        depth_capped || y_min == y_max) {
      return node_id;
    }

    const BestSplit split =
        find_best_split(x_, y_, indices, pick_features(),
                        options_.min_samples_leaf);
    if (!split.found()) return node_id;

    std::vector<int> left_idx;
    std::vector<int> right_idx;
    left_idx.reserve(n);
    right_idx.reserve(n);
    for (const int i : indices) {
      const double v = x_[static_cast<std::size_t>(i)]
                        [static_cast<std::size_t>(split.feature)];
      (v <= split.threshold ? left_idx : right_idx).push_back(i);
    }

    nodes_[static_cast<std::size_t>(node_id)].feature = split.feature;
    nodes_[static_cast<std::size_t>(node_id)].threshold = split.threshold;
    const int left = grow(left_idx, depth + 1);
    nodes_[static_cast<std::size_t>(node_id)].left = left;
    const int right = grow(right_idx, depth + 1);
    nodes_[static_cast<std::size_t>(node_id)].right = right;
    return node_id;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<double>& y_;
  TreeOptions options_;
  Rng* rng_;
  int n_features_;
  std::vector<TreeNode> nodes_;
};

}  // namespace

std::vector<TreeNode> build_regression_tree(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y,
    const std::vector<int>& indices, const TreeOptions& options, Rng* rng) {
  TreeBuilder builder(x, y, options, rng);
  return builder.build(indices);
}

}  // namespace esg::detail
