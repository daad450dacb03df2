#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "esg/config.hpp"
#include "esg/corpus.hpp"
#include "esg/eval.hpp"
#include "esg/sentiment.hpp"

namespace esg {

// Parameters for the planted-signal corpus: each company gets a latent
// polarity q in [-0.9, 0.9]; document wording is tilted by q and the
// reference score is an affine function of q plus bounded noise:
//   score = clamp(50 + 45 * q + U(-noise_points, +noise_points), 0, 100)
struct SyntheticSpec {
  int n_companies = 100;
  int docs_per_keyword = 7;  // pooled across twitter/linkedin/news
  int wikipedia_docs = 2;
  std::uint64_t seed = 20240501;
  double noise_points = 3.0;
  int min_docs = 5;
};

struct SyntheticData {
  PipelineConfig config;  // profiles + defaults; lexicon_path left empty
  std::vector<Document> corpus;
  std::vector<RatingRecord> ratings;
  std::vector<double> planted;  // q per company, config.companies order
  Lexicon lexicon;              // generator vocabulary incl. default modifiers
  std::string lexicon_tsv;      // same vocabulary as a lexicon file payload
};

// Deterministic for a given spec. The corpus also contains documents that
// the pipeline must reject (self-reported LinkedIn posts, lowercase company
// mentions, keyword-free posts) and link-carrying tweets whose resolved
// article routes through the long-article path.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace esg
