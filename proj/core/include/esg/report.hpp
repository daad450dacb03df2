#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "esg/eval.hpp"

namespace esg {

// Report-file payloads for one evaluation run. All emitters are
// deterministic: same report, same bytes.
std::string metrics_to_json(const EvalReport& report);
std::string predictions_to_csv(const EvalReport& report);
// Predicted-vs-actual scatter, both axes fixed to the 0-100 score scale.
std::string scatter_to_svg(const EvalReport& report);

void save_metrics(const EvalReport& report,
                  const std::filesystem::path& path);
void save_predictions(const EvalReport& report,
                      const std::filesystem::path& path);
void save_scatter(const EvalReport& report,
                  const std::filesystem::path& path);

struct ComparisonRow {
  ModelKind kind = ModelKind::random_forest;
  double mae = 0.0;
  std::optional<double> pearson_r;
  std::optional<double> p_value;
};

// "kind,mae,r,p" with one row per evaluated model.
std::string model_comparison_to_csv(const std::vector<ComparisonRow>& rows);
void save_model_comparison(const std::vector<ComparisonRow>& rows,
                           const std::filesystem::path& path);

}  // namespace esg
