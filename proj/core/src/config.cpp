#include "esg/config.hpp"

#include <algorithm>
#include <set>

#include "esg/io.hpp"
#include "json.hpp"

namespace esg {

namespace {
using ordered_json = nlohmann::ordered_json;

void check_keys(const ordered_json& j,
                std::initializer_list<const char*> allowed,
                const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) {
          return key == a;
        }) == allowed.end()) {
      throw ConfigError(where + ": unknown key \"" + key + "\"");
    }
  }
}

std::vector<std::string> string_list(const ordered_json& j,
                                     const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array");
  std::vector<std::string> out;
  for (const auto& item : j) {
    if (!item.is_string()) {
      throw ConfigError(where + " must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

KeywordTaxonomy taxonomy_from_json(const ordered_json& j) {
  check_keys(j, {"E", "S", "G"}, "taxonomy");
  KeywordTaxonomy taxonomy;
  taxonomy.environment.clear();
  taxonomy.social.clear();
  taxonomy.governance.clear();
  if (j.contains("E")) taxonomy.environment = string_list(j["E"], "taxonomy.E");
  if (j.contains("S")) taxonomy.social = string_list(j["S"], "taxonomy.S");
  if (j.contains("G")) taxonomy.governance = string_list(j["G"], "taxonomy.G");
  return taxonomy;
}

CompanyProfile company_from_json(const ordered_json& j,
                                 const std::string& where) {
  check_keys(j,
             {"canonical_name", "aliases", "ambiguous_aliases", "sector",
              "blocklist_nouns"},
             where);
  CompanyProfile profile;
  if (!j.contains("canonical_name") || !j["canonical_name"].is_string()) {
    throw ConfigError(where + ": canonical_name is required");
  }
  profile.canonical_name = j["canonical_name"].get<std::string>();
  if (j.contains("aliases")) {
    profile.aliases = string_list(j["aliases"], where + ".aliases");
  }
  if (j.contains("ambiguous_aliases")) {
    profile.ambiguous_aliases =
        string_list(j["ambiguous_aliases"], where + ".ambiguous_aliases");
  }
  if (j.contains("sector") && j["sector"].is_string()) {
    profile.sector = j["sector"].get<std::string>();
  }
  if (j.contains("blocklist_nouns")) {
    profile.blocklist_nouns =
        string_list(j["blocklist_nouns"], where + ".blocklist_nouns");
  }
  return profile;
}

template <typename T>
T number_or(const ordered_json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) {
    throw ConfigError(std::string("\"") + key + "\" must be a number");
  }
  return j[key].get<T>();
}

}  // namespace

Hyperparams PipelineConfig::hyperparams_for(ModelKind kind) const {
  Hyperparams hp;
  hp.kind = kind;
  hp.rf = models.rf;
  hp.gbt = models.gbt;
  hp.knn = models.knn;
  hp.svr = models.svr;
  hp.seed = seed;
  return hp;
}

ProfileMap PipelineConfig::profile_map() const {
  ProfileMap map;
  for (const auto& profile : companies) {
    if (!map.emplace(profile.canonical_name, profile).second) {
      throw ConfigError("duplicate company \"" + profile.canonical_name +
                        "\" in config");
    }
  }
  return map;
}

std::filesystem::path PipelineConfig::resolved_lexicon_path() const {
  if (lexicon_path.empty()) return {};
  if (lexicon_path.is_absolute() || base_dir.empty()) return lexicon_path;
  return base_dir / lexicon_path;
}

Lexicon PipelineConfig::load_configured_lexicon() const {
  if (lexicon_path.empty()) {
    throw ConfigError("config does not set lexicon_path");
  }
  Lexicon lexicon = load_lexicon(resolved_lexicon_path());
  if (negators) {
    lexicon.negators.clear();
    lexicon.negators.insert(negators->begin(), negators->end());
  }
  if (intensifiers) {
    lexicon.intensifiers.clear();
    for (const auto& [token, delta] : *intensifiers) {
      lexicon.intensifiers.emplace(token, delta);
    }
  }
  lexicon.validate();
  return lexicon;
}

void PipelineConfig::validate(bool check_files) const {
  taxonomy.validate();
  for (const auto& profile : companies) profile.validate();
  profile_map();  // rejects duplicates
  if (min_docs < 0) throw ConfigError("min_docs must be >= 0");
  if (target_count < 1) throw ConfigError("target_count must be >= 1");
  rate_policy.validate();
  if (!(split_fraction > 0.0) || !(split_fraction < 1.0)) {
    throw ConfigError("split_fraction must be in (0,1)");
  }
  hyperparams_for(ModelKind::random_forest).validate();
  if (check_files && !lexicon_path.empty() &&
      !std::filesystem::exists(resolved_lexicon_path())) {
    throw ConfigError("lexicon file not found: " +
                      resolved_lexicon_path().string());
  }
}

PipelineConfig parse_config(const std::string& json_text,
                            const std::filesystem::path& base_dir,
                            const std::string& source_name) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(source_name + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError(source_name + ": not a JSON object");
  check_keys(j,
             {"taxonomy", "companies", "lexicon_path", "negators",
              "intensifiers", "min_docs", "target_count",
              "per_network_features", "rate_policy", "models",
              "split_fraction", "seed"},
             source_name);

  PipelineConfig config;
  config.base_dir = base_dir;

  if (j.contains("taxonomy")) {
    config.taxonomy = taxonomy_from_json(j["taxonomy"]);
  }
  if (j.contains("companies")) {
    if (!j["companies"].is_array()) {
      throw ConfigError(source_name + ": \"companies\" must be an array");
    }
    std::size_t index = 0;
    for (const auto& item : j["companies"]) {
      config.companies.push_back(company_from_json(
          item, source_name + ": companies[" + std::to_string(index) + "]"));
      ++index;
    }
  }
  if (j.contains("lexicon_path")) {
    if (!j["lexicon_path"].is_string()) {
      throw ConfigError(source_name + ": \"lexicon_path\" must be a string");
    }
    config.lexicon_path = j["lexicon_path"].get<std::string>();
  }
  if (j.contains("negators")) {
    config.negators = string_list(j["negators"], "negators");
  }
  if (j.contains("intensifiers")) {
    if (!j["intensifiers"].is_object()) {
      throw ConfigError(source_name + ": \"intensifiers\" must be an object");
    }
    std::vector<std::pair<std::string, double>> entries;
    for (const auto& [token, delta] : j["intensifiers"].items()) {
      if (!delta.is_number()) {
        throw ConfigError(source_name + ": intensifier \"" + token +
                          "\" must map to a number");
      }
      entries.emplace_back(token, delta.get<double>());
    }
    config.intensifiers = std::move(entries);
  }
  config.min_docs = number_or(j, "min_docs", config.min_docs);
  config.target_count = number_or(j, "target_count", config.target_count);
  if (j.contains("per_network_features")) {
    if (!j["per_network_features"].is_boolean()) {
      throw ConfigError(source_name +
                        ": \"per_network_features\" must be a bool");
    }
    config.per_network_features = j["per_network_features"].get<bool>();
  }
  if (j.contains("rate_policy")) {
    const auto& rp = j["rate_policy"];
    check_keys(rp, {"base_delay_ms", "max_delay_ms", "multiplier",
                    "max_retries"},
               "rate_policy");
    config.rate_policy.base_delay = std::chrono::milliseconds(
        number_or<long long>(rp, "base_delay_ms", 1000));
    config.rate_policy.max_delay = std::chrono::milliseconds(
        number_or<long long>(rp, "max_delay_ms", 60000));
    config.rate_policy.multiplier = number_or(rp, "multiplier", 2.0);
    config.rate_policy.max_retries = number_or(rp, "max_retries", 5);
  }
  if (j.contains("models")) {
    const auto& m = j["models"];
    check_keys(m, {"random_forest", "gbt", "knn", "svr"}, "models");
    if (m.contains("random_forest")) {
      const auto& rf = m["random_forest"];
      check_keys(rf, {"n_trees", "min_samples_leaf", "features_per_split",
                      "bootstrap"},
                 "models.random_forest");
      config.models.rf.n_trees =
          number_or(rf, "n_trees", config.models.rf.n_trees);
      config.models.rf.min_samples_leaf = number_or(
          rf, "min_samples_leaf", config.models.rf.min_samples_leaf);
      if (rf.contains("features_per_split") &&
          !rf["features_per_split"].is_null()) {
        if (!rf["features_per_split"].is_number_integer()) {
          throw ConfigError(
              "models.random_forest.features_per_split must be an integer");
        }
        config.models.rf.features_per_split =
            rf["features_per_split"].get<int>();
      }
      if (rf.contains("bootstrap")) {
        if (!rf["bootstrap"].is_boolean()) {
          throw ConfigError("models.random_forest.bootstrap must be a bool");
        }
        config.models.rf.bootstrap = rf["bootstrap"].get<bool>();
      }
    }
    if (m.contains("gbt")) {
      const auto& gbt = m["gbt"];
      check_keys(gbt, {"n_stages", "max_depth", "shrinkage"}, "models.gbt");
      config.models.gbt.n_stages =
          number_or(gbt, "n_stages", config.models.gbt.n_stages);
      config.models.gbt.max_depth =
          number_or(gbt, "max_depth", config.models.gbt.max_depth);
      config.models.gbt.shrinkage =
          number_or(gbt, "shrinkage", config.models.gbt.shrinkage);
    }
    if (m.contains("knn")) {
      check_keys(m["knn"], {"k"}, "models.knn");
      config.models.knn.k = number_or(m["knn"], "k", config.models.knn.k);
    }
    if (m.contains("svr")) {
      const auto& svr = m["svr"];
      check_keys(svr, {"epsilon", "l2_lambda", "epochs"}, "models.svr");
      config.models.svr.epsilon =
          number_or(svr, "epsilon", config.models.svr.epsilon);
      config.models.svr.l2_lambda =
          number_or(svr, "l2_lambda", config.models.svr.l2_lambda);
      config.models.svr.epochs =
          number_or(svr, "epochs", config.models.svr.epochs);
    }
  }
  config.split_fraction =
      number_or(j, "split_fraction", config.split_fraction);
  config.seed = number_or<std::uint64_t>(j, "seed", config.seed);

  config.validate(/*check_files=*/false);
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig config = parse_config(
      io::read_file(path), path.parent_path(), path.string());
  config.validate(/*check_files=*/true);
  return config;
}

std::string config_to_json(const PipelineConfig& config) {
  ordered_json j;
  j["taxonomy"] = {{"E", config.taxonomy.environment},
                   {"S", config.taxonomy.social},
                   {"G", config.taxonomy.governance}};
  ordered_json companies = ordered_json::array();
  for (const auto& profile : config.companies) {
    ordered_json c;
    c["canonical_name"] = profile.canonical_name;
    c["aliases"] = profile.aliases;
    c["ambiguous_aliases"] = profile.ambiguous_aliases;
    c["sector"] = profile.sector;
    c["blocklist_nouns"] = profile.blocklist_nouns;
    companies.push_back(std::move(c));
  }
  j["companies"] = std::move(companies);
  if (!config.lexicon_path.empty()) {
    j["lexicon_path"] = config.lexicon_path.string();
  }
  if (config.negators) j["negators"] = *config.negators;
  if (config.intensifiers) {
    ordered_json intensifiers;
    for (const auto& [token, delta] : *config.intensifiers) {
      intensifiers[token] = delta;
    }
    j["intensifiers"] = std::move(intensifiers);
  }
  j["min_docs"] = config.min_docs;
  j["target_count"] = config.target_count;
  j["per_network_features"] = config.per_network_features;
  j["rate_policy"] = {
      {"base_delay_ms", config.rate_policy.base_delay.count()},
      {"max_delay_ms", config.rate_policy.max_delay.count()},
      {"multiplier", config.rate_policy.multiplier},
      {"max_retries", config.rate_policy.max_retries},
  };
  j["models"] = {
      {"random_forest",
       {{"n_trees", config.models.rf.n_trees},
        {"min_samples_leaf", config.models.rf.min_samples_leaf},
        {"features_per_split",
         config.models.rf.features_per_split
             ? ordered_json(*config.models.rf.features_per_split)
             : ordered_json(nullptr)},
        {"bootstrap", config.models.rf.bootstrap}}},
      {"gbt",
       {{"n_stages", config.models.gbt.n_stages},
        {"max_depth", config.models.gbt.max_depth},
        {"shrinkage", config.models.gbt.shrinkage}}},
      {"knn", {{"k", config.models.knn.k}}},
      {"svr",
       {{"epsilon", config.models.svr.epsilon},
        {"l2_lambda", config.models.svr.l2_lambda},
        {"epochs", config.models.svr.epochs}}},
  };
  j["split_fraction"] = config.split_fraction;
  j["seed"] = config.seed;
  return j.dump(2) + "\n";
}

void save_config(const PipelineConfig& config,
                 const std::filesystem::path& path) {
  io::atomic_write(path, config_to_json(config));
}

}  // namespace esg
