#include "esg/aggregate.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <sstream>
#include <utility>

#include "esg/io.hpp"

namespace esg {

namespace {

std::string format_fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool keep_for_aggregation(const SentimentResult& result) {
  return result.relevant && result.mode != ScoreMode::excluded_self_report;
}

}  // namespace

std::size_t FeatureMatrix::feature_index(std::string_view name) const {
  const auto it =
      std::find(feature_names.begin(), feature_names.end(), name);
  if (it == feature_names.end()) {
    throw InputError("unknown feature \"" + std::string(name) + "\"");
  }
  return static_cast<std::size_t>(it - feature_names.begin());
}

std::vector<SubcategoryScore> subcategory_means(
    const std::string& company, const std::vector<Document>& docs,
    const std::vector<SentimentResult>& results,
    const KeywordTaxonomy& taxonomy) {
  if (docs.size() != results.size()) {
    throw InputError("subcategory_means: docs/results size mismatch");
  }
  const std::vector<std::string> features = taxonomy.feature_names();
  std::map<std::string, std::pair<double, int>> pooled;  // keyword -> (sum, n)

  for (std::size_t i = 0; i < docs.size(); ++i) {
    const Document& doc = docs[i];
    if (doc.company != company) {
      throw InputError("subcategory_means: document " + doc.id +
                       " belongs to \"" + doc.company + "\", not \"" +
                       company + "\"");
    }
    if (!keep_for_aggregation(results[i])) continue;
    const std::string category =
        doc.network == Network::wikipedia ? std::string(kWikipediaCategory)
                                          : doc.keyword;
    if (category != kWikipediaCategory && !taxonomy.contains(category)) {
      throw ValidationError("document " + doc.id +
                            " carries unknown keyword \"" + category + "\"");
    }
    auto& [sum, n] = pooled[category];
    sum += results[i].polarity;
    ++n;
  }

  std::vector<SubcategoryScore> scores;
  scores.reserve(features.size());
  for (const auto& feature : features) {
    SubcategoryScore score;
    score.company = company;
    score.keyword = feature;
    const auto it = pooled.find(feature);
    if (it != pooled.end() && it->second.second > 0) {
      score.doc_count = it->second.second;
      score.mean_polarity = it->second.first / it->second.second;
    }
    scores.push_back(std::move(score));
  }
  return scores;
}

std::set<std::string> filter_companies(
    const std::vector<SubcategoryScore>& scores, int min_docs,
    const KeywordTaxonomy& taxonomy) {
  if (min_docs < 0) throw InputError("min_docs must be >= 0");

  std::map<std::string, std::map<std::string, int>> counts;
  for (const auto& score : scores) {
    counts[score.company][score.keyword] += score.doc_count;
  }

  std::set<std::string> retained;
  for (const auto& [company, by_keyword] : counts) {
    bool ok = true;
    for (const auto& keyword : taxonomy.keywords()) {
      const auto it = by_keyword.find(keyword);
      const int n = it == by_keyword.end() ? 0 : it->second;
      if (n < min_docs) {
        ok = false;
        break;
      }
    }
    if (ok) retained.insert(company);
  }
  return retained;
}

FeatureMatrix impute(FeatureMatrix matrix) {
  const std::size_t rows = matrix.values.size();
  const std::size_t cols = matrix.feature_names.size();
  if (!matrix.has_counts()) {
    throw InputError("impute requires a counts matrix");
  }
  for (std::size_t j = 0; j < cols; ++j) {
    double sum = 0.0;
    long observed = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      if (matrix.counts[i][j] > 0) {
        sum += matrix.values[i][j];
        ++observed;
      }
    }
    if (observed == 0) {
      throw PipelineError("imputation impossible: feature \"" +
                          matrix.feature_names[j] +
                          "\" has no observed values");
    }
    const double mean = sum / static_cast<double>(observed);
    for (std::size_t i = 0; i < rows; ++i) {
      if (matrix.counts[i][j] == 0) matrix.values[i][j] = mean;
    }
  }
  return matrix;
}

std::vector<std::string> feature_columns(const KeywordTaxonomy& taxonomy,
                                         bool per_network_features) {
  if (!per_network_features) return taxonomy.feature_names();
  std::vector<std::string> names;
  for (const auto& keyword : taxonomy.keywords()) {
    for (const Network network : kTextNetworks) {
      names.push_back(keyword + "@" + std::string(to_string(network)));
    }
  }
  names.emplace_back(kWikipediaCategory);
  return names;
}

FeatureMatrix build_feature_matrix(const std::vector<Document>& docs,
                                   const std::vector<SentimentResult>& results,
                                   const KeywordTaxonomy& taxonomy,
                                   int min_docs,
                                   bool per_network_features) {
  if (docs.size() != results.size()) {
    throw InputError("build_feature_matrix: docs/results size mismatch");
  }
  taxonomy.validate();

  // Group retained documents per company, preserving input order.
  std::map<std::string, std::pair<std::vector<Document>,
                                  std::vector<SentimentResult>>>
      by_company;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    if (!keep_for_aggregation(results[i])) continue;
    auto& [company_docs, company_results] = by_company[docs[i].company];
    company_docs.push_back(docs[i]);
    company_results.push_back(results[i]);
  }

  std::vector<SubcategoryScore> all_scores;
  for (const auto& [company, pair] : by_company) {
    auto scores =
        subcategory_means(company, pair.first, pair.second, taxonomy);
    all_scores.insert(all_scores.end(), scores.begin(), scores.end());
  }

  // Retention is decided on pooled keyword counts in either column layout.
  const std::set<std::string> retained =
      filter_companies(all_scores, min_docs, taxonomy);
  if (retained.empty()) {
    throw PipelineError(
        "no company passed the min_docs=" + std::to_string(min_docs) +
        " coverage gate");
  }

  FeatureMatrix matrix;
  matrix.feature_names = feature_columns(taxonomy, per_network_features);
  const std::size_t cols = matrix.feature_names.size();
  std::map<std::string, std::size_t> column_of;
  for (std::size_t j = 0; j < cols; ++j) {
    column_of[matrix.feature_names[j]] = j;
  }

  for (const auto& company : retained) {
    matrix.companies.push_back(company);
    matrix.values.emplace_back(cols, 0.0);
    matrix.counts.emplace_back(cols, 0);
  }
  std::map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < matrix.companies.size(); ++i) {
    row_of[matrix.companies[i]] = i;
  }

  if (per_network_features) {
    // Per-cell sums keyed by (keyword, network), wikipedia pooled.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<double, int>>
        sums;
    for (const auto& [company, pair] : by_company) {
      const auto row = row_of.find(company);
      if (row == row_of.end()) continue;
      const auto& [company_docs, company_results] = pair;
      for (std::size_t i = 0; i < company_docs.size(); ++i) {
        const Document& doc = company_docs[i];
        const std::string column =
            doc.network == Network::wikipedia
                ? std::string(kWikipediaCategory)
                : doc.keyword + "@" + std::string(to_string(doc.network));
        auto& [sum, n] = sums[{row->second, column_of.at(column)}];
        sum += company_results[i].polarity;
        ++n;
      }
    }
    for (const auto& [cell, pooled] : sums) {
      matrix.values[cell.first][cell.second] = pooled.first / pooled.second;
      matrix.counts[cell.first][cell.second] = pooled.second;
    }
  } else {
    for (const auto& score : all_scores) {
      const auto row = row_of.find(score.company);
      if (row == row_of.end()) continue;
      const std::size_t j = column_of.at(score.keyword);
      matrix.values[row->second][j] = score.mean_polarity;
      matrix.counts[row->second][j] = score.doc_count;
    }
  }
  return impute(std::move(matrix));
}

namespace {

std::string matrix_to_csv(const FeatureMatrix& matrix, bool counts) {
  std::string out = "company";
  for (const auto& name : matrix.feature_names) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (std::size_t i = 0; i < matrix.companies.size(); ++i) {
    out += matrix.companies[i];
    for (std::size_t j = 0; j < matrix.feature_names.size(); ++j) {
      out += ',';
      out += counts ? std::to_string(matrix.counts[i][j])
                    : format_fixed6(matrix.values[i][j]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace

std::string features_to_csv(const FeatureMatrix& matrix) {
  return matrix_to_csv(matrix, /*counts=*/false);
}

std::string counts_to_csv(const FeatureMatrix& matrix) {
  if (!matrix.has_counts()) {
    throw InputError("matrix has no counts to write");
  }
  return matrix_to_csv(matrix, /*counts=*/true);
}

void save_features(const FeatureMatrix& matrix,
                   const std::filesystem::path& values_path,
                   const std::filesystem::path& counts_path) {
  io::atomic_write(values_path, features_to_csv(matrix));
  io::atomic_write(counts_path, counts_to_csv(matrix));
}

namespace {

// Parses one CSV of the shared shape; `into_counts` selects the target.
void parse_matrix_csv(const std::string& text, const std::string& name,
                      FeatureMatrix& matrix, bool into_counts) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(name + ": empty file");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header[0] != "company") {
    throw ParseError(name + ": header must start with \"company\"");
  }
  std::vector<std::string> features(header.begin() + 1, header.end());
  if (matrix.feature_names.empty()) {
    matrix.feature_names = features;
  } else if (matrix.feature_names != features) {
    throw ParseError(name + ": feature names disagree with values file");
  }

  long line_no = 1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != features.size() + 1) {
      throw ParseError(name + ":" + std::to_string(line_no) +
                       ": expected " + std::to_string(features.size() + 1) +
                       " fields, got " + std::to_string(fields.size()));
    }
    if (into_counts) {
      if (row >= matrix.companies.size() ||
          matrix.companies[row] != fields[0]) {
        throw ParseError(name + ":" + std::to_string(line_no) +
                         ": company order disagrees with values file");
      }
    } else {
      if (std::find(matrix.companies.begin(), matrix.companies.end(),
                    fields[0]) != matrix.companies.end()) {
        throw ValidationError(name + ":" + std::to_string(line_no) +
                              ": duplicate company \"" + fields[0] + "\"");
      }
      matrix.companies.push_back(fields[0]);
    }
    std::vector<double> values;
    std::vector<int> counts;
    for (std::size_t j = 1; j < fields.size(); ++j) {
      try {
        if (into_counts) {
          counts.push_back(std::stoi(fields[j]));
        } else {
          values.push_back(std::stod(fields[j]));
        }
      } catch (const std::exception&) {
        throw ParseError(name + ":" + std::to_string(line_no) +
                         ": invalid number \"" + fields[j] + "\"");
      }
    }
    if (into_counts) {
      matrix.counts.push_back(std::move(counts));
    } else {
      matrix.values.push_back(std::move(values));
    }
    ++row;
  }
  if (into_counts && row != matrix.companies.size()) {
    throw ParseError(name + ": row count disagrees with values file");
  }
}

}  // namespace

FeatureMatrix load_features(const std::filesystem::path& values_path) {
  FeatureMatrix matrix;
  parse_matrix_csv(io::read_file(values_path), values_path.string(), matrix,
                   /*into_counts=*/false);
  return matrix;
}

FeatureMatrix load_features(const std::filesystem::path& values_path,
                            const std::filesystem::path& counts_path) {
  FeatureMatrix matrix = load_features(values_path);
  parse_matrix_csv(io::read_file(counts_path), counts_path.string(), matrix,
                   /*into_counts=*/true);
  return matrix;
}

}  // namespace esg
