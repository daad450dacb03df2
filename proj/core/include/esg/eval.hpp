#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "esg/aggregate.hpp"
#include "esg/models.hpp"

namespace esg {

struct RatingRecord {
  std::string company;
  double reference_score = 0.0;  // 0..100

  bool operator==(const RatingRecord&) const = default;
};

// Ratings CSV: header "company,score", one record per company.
std::vector<RatingRecord> parse_ratings(std::istream& in,
                                        const std::string& source_name);
std::vector<RatingRecord> load_ratings(const std::filesystem::path& path);
std::string ratings_to_csv(const std::vector<RatingRecord>& ratings);
void save_ratings(const std::vector<RatingRecord>& ratings,
                  const std::filesystem::path& path);

struct SplitResult {
  std::vector<std::string> train;
  std::vector<std::string> test;
};

// Seed-deterministic shuffle split; |test| = round(test_fraction * n).
// Input order does not matter (companies are sorted before shuffling).
// Throws ConfigError when either side would be empty.
SplitResult split(std::vector<std::string> companies, double test_fraction,
                  std::uint64_t seed);

// Mean absolute error in score points on the 0-100 scale (the value that
// reads as "MAAE N%" in reports).
double mae(std::span<const double> actual, std::span<const double> predicted);

// Sample Pearson correlation; requires length >= 3 and nonzero variance on
// both sides (DataError otherwise).
double pearson_r(std::span<const double> a, std::span<const double> b);

// Two-sided significance of a Pearson correlation at sample size n, from
// t = r * sqrt((n-2)/(1-r^2)) against Student's t with n-2 dof.
// |r| = 1 gives exactly 0.
double p_value(double r, int n);

struct EvalReport {
  ModelKind kind = ModelKind::random_forest;
  int n_test = 0;
  std::vector<std::string> companies;  // test side, aligned with pairs
  std::vector<double> actual;
  std::vector<double> predicted;
  double mae = 0.0;
  std::optional<double> pearson_r;  // absent when variance vanished
  std::optional<double> p_value;
  std::uint64_t seed = 0;
  double split_ratio = 0.2;
  std::vector<std::string> warnings;
};

// Splits the companies shared by features and ratings, trains on the train
// side and fills the report from holdout predictions. Companies without a
// rating are excluded and listed in warnings.
EvalReport evaluate(ModelKind kind, const FeatureMatrix& features,
                    const std::vector<RatingRecord>& ratings,
                    double test_fraction, const Hyperparams& hp);

}  // namespace esg
