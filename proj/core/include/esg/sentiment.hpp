#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "esg/corpus.hpp"

namespace esg {

// Deterministic valence table driving the sentiment engine. Negators flip
// and dampen a valenced token when they occur in the three tokens before
// it; an intensifier directly before a valenced token scales it by
// (1 + delta).
struct Lexicon {
  std::unordered_map<std::string, double> valences;  // token -> [-1, +1]
  std::unordered_set<std::string> negators;
  std::unordered_map<std::string, double> intensifiers;  // token -> delta

  // Throws ConfigError on out-of-range valences/deltas or a token listed
  // both as negator and valence carrier.
  void validate() const;
};

// Built-in negator and intensifier tables, used unless the pipeline config
// overrides them. The valence table always comes from a lexicon file.
const std::vector<std::string>& default_negators();
const std::vector<std::pair<std::string, double>>& default_intensifiers();

// Lexicon file: UTF-8 lines "token<TAB>valence"; lines starting with "#"
// and blank lines ignored. Tokens are lowercased on load. Negators and
// intensifiers are filled from the built-in defaults.
Lexicon parse_lexicon(std::istream& in, const std::string& source_name);
Lexicon load_lexicon(const std::filesystem::path& path);

inline constexpr double kNegationFactor = -0.75;
inline constexpr int kNegationWindow = 3;
// Raw valence sums are squashed to (-1, +1) via s / sqrt(s^2 + alpha).
inline constexpr double kNormalizationAlpha = 15.0;

struct TokenScore {
  double polarity = 0.0;
  int valenced_tokens = 0;
};

// Sums adjusted valences over the token list and normalizes:
//   adjusted = valence * (1 + intensifier delta of the preceding token)
//                      * (kNegationFactor if a negator occurs within the
//                         kNegationWindow preceding tokens)
//   polarity = s / sqrt(s^2 + kNormalizationAlpha)
TokenScore score_tokens(const std::vector<std::string>& tokens,
                        const Lexicon& lexicon);

enum class ScoreMode { short_post, long_article, excluded_self_report };

std::string_view to_string(ScoreMode mode);
std::optional<ScoreMode> score_mode_from_string(std::string_view name);

struct SentimentResult {
  bool relevant = false;
  double polarity = 0.0;  // unused by aggregation when !relevant
  int valenced_token_count = 0;
  ScoreMode mode = ScoreMode::short_post;

  bool operator==(const SentimentResult&) const = default;
};

// Twitter/LinkedIn path. When the post carries a link with pre-fetched
// body text, scoring reroutes to the long-article path on that body.
// Throws InputError when the document is irrelevant or not a short-post
// network.
SentimentResult score_short_post(const Document& doc, const Lexicon& lexicon,
                                 const CompanyProfile& profile,
                                 const KeywordTaxonomy& taxonomy);

// News/Wikipedia path: mean of score_tokens polarity over the paragraphs
// that mention the company. Zero mentioning paragraphs means irrelevant.
SentimentResult score_long_article(std::string_view text,
                                   const Lexicon& lexicon,
                                   const CompanyProfile& profile);

// Full per-document dispatch: LinkedIn self-reports are excluded, short
// and long paths chosen by network, irrelevant documents come back with
// relevant=false. Total for any validated document.
SentimentResult score_document(const Document& doc, const Lexicon& lexicon,
                               const CompanyProfile& profile,
                               const KeywordTaxonomy& taxonomy);

using ProfileMap = std::map<std::string, CompanyProfile>;

// Order-preserving batch scoring; results are identical for any worker
// count. Per-document failures (unknown company) are aggregated into one
// ValidationError naming the document ids.
std::vector<SentimentResult> score_batch(const std::vector<Document>& docs,
                                         const Lexicon& lexicon,
                                         const ProfileMap& profiles,
                                         const KeywordTaxonomy& taxonomy,
                                         int workers = 1);

struct ScoredDocument {
  std::string id;
  SentimentResult result;

  bool operator==(const ScoredDocument&) const = default;
};

// Scored output: JSONL of document id + SentimentResult fields.
std::string scores_to_jsonl(const std::vector<Document>& docs,
                            const std::vector<SentimentResult>& results);
std::vector<ScoredDocument> parse_scores(std::istream& in,
                                         const std::string& source_name);
std::vector<ScoredDocument> load_scores(const std::filesystem::path& path);
void save_scores(const std::vector<Document>& docs,
                 const std::vector<SentimentResult>& results,
                 const std::filesystem::path& path);

}  // namespace esg
