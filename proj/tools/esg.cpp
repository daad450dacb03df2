// esg: command-line front end chaining the pipeline stages
// (ingest | score | aggregate | train | evaluate | predict | report).
// Exit codes: 0 success, 1 user error, 2 internal error. Diagnostics go to
// stderr; data goes to files or stdout only.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "esg/aggregate.hpp"
#include "esg/config.hpp"
#include "esg/corpus.hpp"
#include "esg/eval.hpp"
#include "esg/io.hpp"
#include "esg/models.hpp"
#include "esg/report.hpp"
#include "esg/sentiment.hpp"

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;

  esg::PipelineConfig load() const {
    esg::PipelineConfig config;
    if (!config_path.empty()) {
      config = esg::load_config(config_path);
    }
    if (seed) config.seed = *seed;
    return config;
  }
};

esg::ModelKind parse_kind(const std::string& name) {
  const auto kind = esg::model_kind_from_string(name);
  if (!kind) {
    throw esg::ConfigError("unknown model kind \"" + name +
                           "\" (expected random_forest|gbt|knn|svr)");
  }
  return *kind;
}

int run_ingest(const GlobalOptions& global, const std::string& fixtures,
               const std::string& out, std::optional<int> target_count,
               int rate_limit_every) {
  const esg::PipelineConfig config = global.load();
  if (config.companies.empty()) {
    throw esg::ConfigError("config lists no companies to ingest");
  }
  const int target = target_count.value_or(config.target_count);

  const std::vector<esg::Document> pool = esg::load_corpus(fixtures);
  std::map<esg::Network, esg::FixtureAdapter> adapters;
  for (const esg::Network network :
       {esg::Network::twitter, esg::Network::linkedin, esg::Network::news,
        esg::Network::wikipedia}) {
    adapters.emplace(network,
                     esg::FixtureAdapter(network, pool, rate_limit_every));
  }

  std::vector<esg::Document> corpus;
  long shortfalls = 0;
  for (const auto& company : config.companies) {
    for (const auto& query : esg::build_queries(company, config.taxonomy)) {
      esg::CollectResult result =
          esg::collect(adapters.at(query.network), query.text, target,
                       config.rate_policy);
      if (result.shortfall) {
        if (++shortfalls <= 5) {
          std::cerr << "warning: " << result.warning << "\n";
        }
      }
      corpus.insert(corpus.end(),
                    std::make_move_iterator(result.docs.begin()),
                    std::make_move_iterator(result.docs.end()));
    }
  }
  if (shortfalls > 5) {
    std::cerr << "warning: " << (shortfalls - 5)
              << " further queries returned fewer documents than requested\n";
  }
  esg::save_corpus(corpus, out);
  std::cerr << "ingested " << corpus.size() << " documents -> " << out
            << "\n";
  return 0;
}

int run_score(const GlobalOptions& global, const std::string& corpus_path,
              const std::string& out, int workers) {
  const esg::PipelineConfig config = global.load();
  const std::vector<esg::Document> corpus = esg::load_corpus(corpus_path);
  if (corpus.empty()) {
    throw esg::ValidationError("empty corpus: " + corpus_path);
  }
  const esg::Lexicon lexicon = config.load_configured_lexicon();
  const std::vector<esg::SentimentResult> results = esg::score_batch(
      corpus, lexicon, config.profile_map(), config.taxonomy, workers);
  esg::save_scores(corpus, results, out);

  long relevant = 0;
  long excluded = 0;
  for (const auto& result : results) {
    relevant += result.relevant ? 1 : 0;
    excluded +=
        result.mode == esg::ScoreMode::excluded_self_report ? 1 : 0;
  }
  std::cerr << "scored " << corpus.size() << " documents (" << relevant
            << " relevant, " << excluded << " self-report excluded) -> "
            << out << "\n";
  return 0;
}

int run_aggregate(const GlobalOptions& global, const std::string& corpus_path,
                  const std::string& scores_path,
                  const std::string& out_features,
                  const std::string& out_counts,
                  std::optional<int> min_docs) {
  const esg::PipelineConfig config = global.load();
  const std::vector<esg::Document> corpus = esg::load_corpus(corpus_path);
  std::map<std::string, const esg::Document*> by_id;
  for (const auto& doc : corpus) by_id[doc.id] = &doc;

  std::vector<esg::Document> docs;
  std::vector<esg::SentimentResult> results;
  for (const auto& scored : esg::load_scores(scores_path)) {
    const auto it = by_id.find(scored.id);
    if (it == by_id.end()) {
      throw esg::ValidationError("scored id \"" + scored.id +
                                 "\" is not in the corpus");
    }
    docs.push_back(*it->second);
    results.push_back(scored.result);
  }
  const esg::FeatureMatrix matrix = esg::build_feature_matrix(
      docs, results, config.taxonomy, min_docs.value_or(config.min_docs),
      config.per_network_features);
  esg::save_features(matrix, out_features, out_counts);
  std::cerr << "feature matrix " << matrix.companies.size() << " x "
            << matrix.feature_names.size() << " -> " << out_features << "\n";
  return 0;
}

int run_train(const GlobalOptions& global, const std::string& features_path,
              const std::string& ratings_path, const std::string& kind_name,
              const std::string& out) {
  const esg::PipelineConfig config = global.load();
  const esg::ModelKind kind = parse_kind(kind_name);
  const esg::FeatureMatrix features = esg::load_features(features_path);
  std::map<std::string, double> rating_of;
  for (const auto& record : esg::load_ratings(ratings_path)) {
    rating_of[record.company] = record.reference_score;
  }
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < features.companies.size(); ++i) {
    const auto it = rating_of.find(features.companies[i]);
    if (it == rating_of.end()) {
      std::cerr << "warning: no rating for \"" << features.companies[i]
                << "\"; excluded from training\n";
      continue;
    }
    x.push_back(features.values[i]);
    y.push_back(it->second);
  }
  const esg::ModelArtifact model =
      esg::train(kind, x, y, config.hyperparams_for(kind),
                 features.feature_names);
  esg::save_model(model, out);
  std::cerr << "trained " << esg::to_string(kind) << " on " << x.size()
            << " companies -> " << out << "\n";
  return 0;
}

void emit_report_files(const esg::EvalReport& report, const fs::path& dir) {
  esg::save_metrics(report, dir / "metrics.json");
  esg::save_predictions(report, dir / "predictions.csv");
  esg::save_scatter(report, dir / "scatter.svg");
  for (const auto& warning : report.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
}

int run_evaluate(const GlobalOptions& global, const std::string& features_path,
                 const std::string& ratings_path, const std::string& kind_name,
                 std::optional<double> split_fraction,
                 const std::string& out_dir) {
  const esg::PipelineConfig config = global.load();
  const esg::ModelKind kind = parse_kind(kind_name);
  const esg::FeatureMatrix features = esg::load_features(features_path);
  const std::vector<esg::RatingRecord> ratings =
      esg::load_ratings(ratings_path);
  const esg::EvalReport report =
      esg::evaluate(kind, features, ratings,
                    split_fraction.value_or(config.split_fraction),
                    config.hyperparams_for(kind));
  emit_report_files(report, out_dir);
  std::cerr << "evaluated " << esg::to_string(kind) << ": mae=" << report.mae
            << " n_test=" << report.n_test << " -> " << out_dir << "\n";
  return 0;
}

int run_predict(const GlobalOptions&, const std::string& model_path,
                const std::string& features_path, const std::string& out) {
  const esg::ModelArtifact model = esg::load_model(model_path);
  const esg::FeatureMatrix features = esg::load_features(features_path);
  if (!model.feature_names.empty() && !features.feature_names.empty() &&
      model.feature_names != features.feature_names) {
    throw esg::ValidationError(
        "feature names in the matrix disagree with the model");
  }
  std::string csv = "company,predicted\n";
  char buf[64];
  for (std::size_t i = 0; i < features.companies.size(); ++i) {
    const double score = esg::predict(model, features.values[i]);
    std::snprintf(buf, sizeof buf, "%.6f", score);
    csv += features.companies[i];
    csv += ',';
    csv += buf;
    csv += '\n';
  }
  if (out.empty()) {
    std::cout << csv;
  } else {
    esg::io::atomic_write(out, csv);
    std::cerr << "predictions for " << features.companies.size()
              << " companies -> " << out << "\n";
  }
  return 0;
}

int run_report(const GlobalOptions& global, const std::string& features_path,
               const std::string& ratings_path,
               std::optional<double> split_fraction,
               const std::string& out_dir) {
  const esg::PipelineConfig config = global.load();
  const esg::FeatureMatrix features = esg::load_features(features_path);
  const std::vector<esg::RatingRecord> ratings =
      esg::load_ratings(ratings_path);
  const double fraction = split_fraction.value_or(config.split_fraction);

  std::vector<esg::ComparisonRow> rows;
  for (const esg::ModelKind kind : esg::all_model_kinds()) {
    const esg::EvalReport report = esg::evaluate(
        kind, features, ratings, fraction, config.hyperparams_for(kind));
    emit_report_files(report,
                      fs::path(out_dir) / std::string(esg::to_string(kind)));
    rows.push_back({kind, report.mae, report.pearson_r, report.p_value});
    std::cerr << esg::to_string(kind) << ": mae=" << report.mae;
    if (report.pearson_r) {
      std::cerr << " r=" << *report.pearson_r << " p=" << *report.p_value;
    }
    std::cerr << "\n";
  }
  esg::save_model_comparison(rows,
                             fs::path(out_dir) / "model_comparison.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Social-sentiment ESG scoring pipeline"};
  app.require_subcommand(1);
  // Global flags (--config, --seed) are accepted before or after the
  // subcommand name.
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "Pipeline config JSON (flags override config values)");
  std::uint64_t seed_flag = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed_flag, "Master seed override");

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "Collect documents from a fixture pool into a corpus");
  std::string fixtures, ingest_out;
  std::optional<int> target_count;
  int rate_limit_every = 0;
  ingest->add_option("--fixtures", fixtures, "Fixture pool JSONL")
      ->required();
  ingest->add_option("--out", ingest_out, "Corpus JSONL to write")
      ->required();
  ingest->add_option("--target-count", target_count,
                     "Documents to request per query");
  ingest->add_option("--rate-limit-every", rate_limit_every,
                     "Simulate a rate-limit signal every Nth adapter call");

  // score
  auto* score = app.add_subcommand("score", "Score a corpus with the lexicon");
  std::string score_corpus, score_out;
  int workers = 1;
  score->add_option("--corpus", score_corpus, "Corpus JSONL")->required();
  score->add_option("--out", score_out, "Scored JSONL to write")->required();
  score->add_option("--workers", workers, "Parallel scoring workers");

  // aggregate
  auto* aggregate = app.add_subcommand(
      "aggregate", "Build the per-company feature matrix");
  std::string agg_corpus, agg_scores, out_features, out_counts;
  std::optional<int> min_docs;
  aggregate->add_option("--corpus", agg_corpus, "Corpus JSONL")->required();
  aggregate->add_option("--scores", agg_scores, "Scored JSONL")->required();
  aggregate->add_option("--out-features", out_features, "Feature CSV")
      ->required();
  aggregate->add_option("--out-counts", out_counts, "Counts CSV")
      ->required();
  aggregate->add_option("--min-docs", min_docs,
                        "Coverage gate per keyword subcategory");

  // train
  auto* train = app.add_subcommand("train", "Train one model on all rows");
  std::string train_features, train_ratings, train_kind, train_out;
  train->add_option("--features", train_features, "Feature CSV")->required();
  train->add_option("--ratings", train_ratings, "Ratings CSV")->required();
  train->add_option("--model", train_kind, "random_forest|gbt|knn|svr")
      ->required();
  train->add_option("--out", train_out, "Model JSON to write")->required();

  // evaluate
  auto* evaluate = app.add_subcommand(
      "evaluate", "Split, train and report holdout metrics for one model");
  std::string eval_features, eval_ratings, eval_kind, eval_out;
  std::optional<double> split_fraction;
  evaluate->add_option("--features", eval_features, "Feature CSV")
      ->required();
  evaluate->add_option("--ratings", eval_ratings, "Ratings CSV")->required();
  evaluate->add_option("--model", eval_kind, "random_forest|gbt|knn|svr")
      ->required();
  evaluate->add_option("--split-fraction", split_fraction,
                       "Holdout fraction (default 0.2)");
  evaluate->add_option("--out", eval_out, "Output directory")->required();

  // predict
  auto* predict = app.add_subcommand(
      "predict", "Apply a trained model to a feature matrix");
  std::string predict_model, predict_features, predict_out;
  predict->add_option("--model", predict_model, "Model JSON")->required();
  predict->add_option("--features", predict_features, "Feature CSV")
      ->required();
  predict->add_option("--out", predict_out,
                      "Predictions CSV (stdout when omitted)");

  // report
  auto* report = app.add_subcommand(
      "report", "Evaluate all four models and write the comparison table");
  std::string report_features, report_ratings, report_out;
  std::optional<double> report_split;
  report->add_option("--features", report_features, "Feature CSV")
      ->required();
  report->add_option("--ratings", report_ratings, "Ratings CSV")->required();
  report->add_option("--split-fraction", report_split,
                     "Holdout fraction (default 0.2)");
  report->add_option("--out", report_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 1;
  }
  if (*seed_opt) global.seed = seed_flag;

  try {
    if (*ingest) {
      return run_ingest(global, fixtures, ingest_out, target_count,
                        rate_limit_every);
    }
    if (*score) return run_score(global, score_corpus, score_out, workers);
    if (*aggregate) {
      return run_aggregate(global, agg_corpus, agg_scores, out_features,
                           out_counts, min_docs);
    }
    if (*train) {
      return run_train(global, train_features, train_ratings, train_kind,
                       train_out);
    }
    if (*evaluate) {
      return run_evaluate(global, eval_features, eval_ratings, eval_kind,
                          split_fraction, eval_out);
    }
    if (*predict) {
      return run_predict(global, predict_model, predict_features,
                         predict_out);
    }
    if (*report) {
      return run_report(global, report_features, report_ratings,
                        report_split, report_out);
    }
  } catch (const esg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable with require_subcommand(1)
}
