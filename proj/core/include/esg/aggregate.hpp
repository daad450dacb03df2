#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "esg/corpus.hpp"
#include "esg/sentiment.hpp"

namespace esg {

struct SubcategoryScore {
  std::string company;
  std::string keyword;  // taxonomy keyword, or "wikipedia"
  double mean_polarity = 0.0;
  int doc_count = 0;
  bool imputed = false;
};

// Dense per-company feature rows in canonical order: taxonomy keywords
// (E, S, G) followed by the "wikipedia" pseudo-category. counts mirrors
// values; a cell with count 0 holds an imputed column mean.
struct FeatureMatrix {
  std::vector<std::string> companies;
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> values;
  std::vector<std::vector<int>> counts;  // may be empty when loaded without

  bool has_counts() const { return !counts.empty(); }
  bool is_imputed(std::size_t row, std::size_t col) const {
    return counts[row][col] == 0;
  }
  std::size_t feature_index(std::string_view name) const;
};

// Per-keyword mean polarity for one company, pooled across the text
// networks; the wikipedia category pools wikipedia documents. Results must
// already have irrelevant/excluded entries dropped. Subcategories with no
// documents come back with doc_count 0, deferred to imputation.
std::vector<SubcategoryScore> subcategory_means(
    const std::string& company, const std::vector<Document>& docs,
    const std::vector<SentimentResult>& results,
    const KeywordTaxonomy& taxonomy);

// A company is retained iff every keyword subcategory has at least
// min_docs documents. The wikipedia pseudo-category is exempt.
std::set<std::string> filter_companies(
    const std::vector<SubcategoryScore>& scores, int min_docs,
    const KeywordTaxonomy& taxonomy);

// Fills every count-0 cell with the arithmetic mean of the observed values
// in its column. Throws PipelineError when a column has no observed value.
FeatureMatrix impute(FeatureMatrix matrix);

// Feature columns per keyword pooled over the text networks (default), or
// expanded per (keyword, network) when per_network_features is set. The
// wikipedia pseudo-category is a single column either way.
std::vector<std::string> feature_columns(const KeywordTaxonomy& taxonomy,
                                         bool per_network_features);

// filter -> per-company means -> impute, with deterministic (sorted) row
// order. Drops irrelevant and self-report-excluded results; throws
// PipelineError when no company survives the gate. The coverage gate
// always counts pooled keyword documents, even with per-network columns.
FeatureMatrix build_feature_matrix(const std::vector<Document>& docs,
                                   const std::vector<SentimentResult>& results,
                                   const KeywordTaxonomy& taxonomy,
                                   int min_docs,
                                   bool per_network_features = false);

// CSV with header "company,<feature names...>"; values at 6 decimal
// places, counts as integers in a sibling file of the same shape.
std::string features_to_csv(const FeatureMatrix& matrix);
std::string counts_to_csv(const FeatureMatrix& matrix);
void save_features(const FeatureMatrix& matrix,
                   const std::filesystem::path& values_path,
                   const std::filesystem::path& counts_path);
FeatureMatrix load_features(const std::filesystem::path& values_path);
FeatureMatrix load_features(const std::filesystem::path& values_path,
                            const std::filesystem::path& counts_path);

}  // namespace esg
