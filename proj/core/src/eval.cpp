#include "esg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "esg/io.hpp"
#include "esg/rng.hpp"
#include "esg/stats.hpp"

namespace esg {

std::vector<RatingRecord> parse_ratings(std::istream& in,
                                        const std::string& source_name) {
  std::vector<RatingRecord> ratings;
  std::set<std::string> seen;
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) {
    throw ParseError(source_name + ": empty ratings file");
  }
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "company,score") {
    throw ParseError(source_name + ": expected header \"company,score\"");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0) {
      throw ParseError(where + ": expected \"company,score\"");
    }
    RatingRecord record;
    record.company = line.substr(0, comma);
    try {
      std::size_t consumed = 0;
      record.reference_score = std::stod(line.substr(comma + 1), &consumed);
      if (consumed != line.size() - comma - 1) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw ParseError(where + ": invalid score");
    }
    if (record.reference_score < 0.0 || record.reference_score > 100.0) {
      throw ValidationError(where + ": score outside [0,100]");
    }
    if (!seen.insert(record.company).second) {
      throw ValidationError(where + ": duplicate company \"" +
                            record.company + "\"");
    }
    ratings.push_back(std::move(record));
  }
  return ratings;
}

std::vector<RatingRecord> load_ratings(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  return parse_ratings(in, path.string());
}

std::string ratings_to_csv(const std::vector<RatingRecord>& ratings) {
  std::string out = "company,score\n";
  char buf[64];
  for (const auto& record : ratings) {
    std::snprintf(buf, sizeof buf, "%.6f", record.reference_score);
    out += record.company;
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

void save_ratings(const std::vector<RatingRecord>& ratings,
                  const std::filesystem::path& path) {
  io::atomic_write(path, ratings_to_csv(ratings));
}

SplitResult split(std::vector<std::string> companies, double test_fraction,
                  std::uint64_t seed) {
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0)) {
    throw ConfigError("test_fraction must be in (0,1)");
  }
  if (companies.size() < 2) {
    throw ConfigError("split requires at least 2 companies");
  }
  std::sort(companies.begin(), companies.end());
  Rng rng(seed);
  rng.shuffle(companies);

  const std::size_t n = companies.size();
  const std::size_t n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) {
    throw ConfigError("degenerate split: test side would hold " +
                      std::to_string(n_test) + " of " + std::to_string(n));
  }
  SplitResult result;
  result.test.assign(companies.begin(),
                     companies.begin() + static_cast<std::ptrdiff_t>(n_test));
  result.train.assign(companies.begin() + static_cast<std::ptrdiff_t>(n_test),
                      companies.end());
  std::sort(result.test.begin(), result.test.end());
  std::sort(result.train.begin(), result.train.end());
  return result;
}

double mae(std::span<const double> actual,
           std::span<const double> predicted) {
  if (actual.size() != predicted.size() || actual.empty()) {
    throw InputError("mae requires equal nonzero lengths");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    sum += std::abs(actual[i] - predicted[i]);
  }
  return sum / static_cast<double>(actual.size());
}

double pearson_r(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InputError("pearson_r requires equal lengths");
  }
  if (a.size() < 3) {
    throw InputError("pearson_r requires at least 3 points");
  }
  const double n = static_cast<double>(a.size());
  double mean_a = 0.0;
  double mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;
  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a == 0.0 || var_b == 0.0) {
    throw DataError("correlation undefined: zero variance");
  }
  double r = cov / std::sqrt(var_a * var_b);
  return std::clamp(r, -1.0, 1.0);
}

double p_value(double r, int n) {
  if (n < 3) throw InputError("p_value requires n >= 3");
  if (std::abs(r) > 1.0) throw InputError("|r| must be <= 1");
  if (std::abs(r) == 1.0) return 0.0;
  const double dof = static_cast<double>(n - 2);
  const double t = r * std::sqrt(dof / (1.0 - r * r));
  return stats::student_t_two_sided_p(t, n - 2);
}

EvalReport evaluate(ModelKind kind, const FeatureMatrix& features,
                    const std::vector<RatingRecord>& ratings,
                    double test_fraction, const Hyperparams& hp) {
  std::map<std::string, double> rating_of;
  for (const auto& record : ratings) {
    rating_of[record.company] = record.reference_score;
  }

  EvalReport report;
  report.kind = kind;
  report.seed = hp.seed;
  report.split_ratio = test_fraction;

  std::map<std::string, std::size_t> row_of;
  std::vector<std::string> usable;
  for (std::size_t i = 0; i < features.companies.size(); ++i) {
    const std::string& company = features.companies[i];
    if (rating_of.contains(company)) {
      row_of[company] = i;
      usable.push_back(company);
    } else {
      report.warnings.push_back("no rating for \"" + company +
                                "\"; excluded from evaluation");
    }
  }
  if (usable.size() < 2) {
    throw DataError("fewer than 2 companies have both features and ratings");
  }

  const SplitResult sides = split(usable, test_fraction, hp.seed);

  std::vector<std::vector<double>> x_train;
  std::vector<double> y_train;
  x_train.reserve(sides.train.size());
  for (const auto& company : sides.train) {
    x_train.push_back(features.values[row_of.at(company)]);
    y_train.push_back(rating_of.at(company));
  }
  const ModelArtifact model =
      train(kind, x_train, y_train, hp, features.feature_names);

  report.n_test = static_cast<int>(sides.test.size());
  for (const auto& company : sides.test) {
    report.companies.push_back(company);
    report.actual.push_back(rating_of.at(company));
    report.predicted.push_back(
        predict(model, features.values[row_of.at(company)]));
  }

  report.mae = mae(report.actual, report.predicted);
  if (report.n_test < 3) {
    report.warnings.push_back(
        "test side smaller than 3; correlation not computed");
    return report;
  }
  try {
    const double r = pearson_r(report.actual, report.predicted);
    report.pearson_r = r;
    report.p_value = p_value(r, report.n_test);
  } catch (const DataError& e) {
    report.warnings.push_back(std::string("correlation unavailable: ") +
                              e.what());
  }
  return report;
}

}  // namespace esg
