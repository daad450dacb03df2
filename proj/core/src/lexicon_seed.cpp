#include "esg/sentiment.hpp"

namespace esg {

// Modifier tables shared by every lexicon unless the pipeline config
// replaces them. Negators must never carry a valence of their own.
const std::vector<std::string>& default_negators() {
  static const std::vector<std::string> negators = {
      "not",    "no",      "never",    "neither",   "nor",      "cannot",
      "can't",  "won't",   "don't",    "doesn't",   "didn't",   "isn't",
      "aren't", "wasn't",  "weren't",  "shouldn't", "wouldn't", "couldn't",
      "hardly", "rarely",  "scarcely", "without",   "lacks",    "lacking",
  };
  return negators;
}

const std::vector<std::pair<std::string, double>>& default_intensifiers() {
  static const std::vector<std::pair<std::string, double>> intensifiers = {
      {"very", 0.30},       {"extremely", 0.40}, {"incredibly", 0.40},
      {"really", 0.25},     {"highly", 0.30},    {"hugely", 0.35},
      {"deeply", 0.25},     {"totally", 0.30},   {"remarkably", 0.30},
      {"quite", 0.20},      {"notably", 0.15},   {"somewhat", -0.20},
      {"slightly", -0.30},  {"barely", -0.40},   {"marginally", -0.35},
      {"moderately", -0.15},
  };
  return intensifiers;
}

}  // namespace esg
