#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "esg/corpus.hpp"
#include "esg/models.hpp"
#include "esg/sentiment.hpp"

namespace esg {

struct ModelSettings {
  RfParams rf;
  GbtParams gbt;
  KnnParams knn;
  SvrParams svr;
};

// One JSON file drives the whole pipeline: taxonomy, company profiles,
// lexicon location, gates, rate policy, per-kind hyperparameters, split
// fraction and the master seed. Unknown keys are rejected; file references
// resolve relative to the config file's directory.
struct PipelineConfig {
  KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  std::vector<CompanyProfile> companies;
  std::filesystem::path lexicon_path;  // empty = not configured
  std::optional<std::vector<std::string>> negators;
  std::optional<std::vector<std::pair<std::string, double>>> intensifiers;
  int min_docs = 5;
  int target_count = 100;
  bool per_network_features = false;  // expand columns per (keyword, network)
  RatePolicy rate_policy;
  ModelSettings models;
  double split_fraction = 0.2;
  std::uint64_t seed = 0;
  std::filesystem::path base_dir;  // directory of the config file

  Hyperparams hyperparams_for(ModelKind kind) const;
  ProfileMap profile_map() const;
  std::filesystem::path resolved_lexicon_path() const;

  // Loads the valence table from lexicon_path and applies the negator /
  // intensifier overrides when present.
  Lexicon load_configured_lexicon() const;

  // Structural checks; with check_files also verifies referenced files
  // exist. Throws ConfigError / ValidationError.
  void validate(bool check_files) const;
};

PipelineConfig parse_config(const std::string& json_text,
                            const std::filesystem::path& base_dir,
                            const std::string& source_name);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& config);
void save_config(const PipelineConfig& config,
                 const std::filesystem::path& path);

}  // namespace esg
