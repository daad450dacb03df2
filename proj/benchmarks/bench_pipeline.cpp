#include <benchmark/benchmark.h>

#include "esg/aggregate.hpp"
#include "esg/preprocess.hpp"
#include "esg/sentiment.hpp"
#include "esg/synthetic.hpp"

namespace {

const esg::SyntheticData& fixture() {
  static const esg::SyntheticData data = [] {
    esg::SyntheticSpec spec;
    spec.n_companies = 40;
    spec.docs_per_keyword = 6;
    return esg::generate_synthetic(spec);
  }();
  return data;
}

void BM_CleanText(benchmark::State& state) {
  const std::string text =
      "Great move by @Acme \xE2\x80\x94 see https://x.co/ab! "
      "Emission cuts look solid, not bad at all.";
  for (auto _ : state) {
    benchmark::DoNotOptimize(esg::clean_text(text));
  }
}
BENCHMARK(BM_CleanText);

void BM_ScoreTokens(benchmark::State& state) {
  const auto& data = fixture();
  const auto tokens = esg::tokenize(
      "Company007 climate efforts look admirable and commendable, frankly "
      "exemplary this quarter.");
  for (auto _ : state) {
    benchmark::DoNotOptimize(esg::score_tokens(tokens, data.lexicon));
  }
}
BENCHMARK(BM_ScoreTokens);

void BM_ScoreBatch(benchmark::State& state) {
  const auto& data = fixture();
  const auto profiles = data.config.profile_map();
  const int workers = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(esg::score_batch(
        data.corpus, data.lexicon, profiles, data.config.taxonomy, workers));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(data.corpus.size()));
}
BENCHMARK(BM_ScoreBatch)->Arg(1)->Arg(4)->Arg(8);

void BM_BuildFeatureMatrix(benchmark::State& state) {
  const auto& data = fixture();
  const auto profiles = data.config.profile_map();
  const auto results = esg::score_batch(data.corpus, data.lexicon, profiles,
                                        data.config.taxonomy, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(esg::build_feature_matrix(
        data.corpus, results, data.config.taxonomy, data.config.min_docs));
  }
}
BENCHMARK(BM_BuildFeatureMatrix);

}  // namespace
