#include "esg/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <thread>

#include "esg/io.hpp"
#include "esg/preprocess.hpp"
#include "esg/relevance.hpp"
#include "json.hpp"

namespace esg {

namespace {
using ordered_json = nlohmann::ordered_json;

std::string lower_ascii(std::string s) {
  for (char& c : s) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return s;
}
}  // namespace

void Lexicon::validate() const {
  for (const auto& [token, valence] : valences) {
    if (valence < -1.0 || valence > 1.0) {
      throw ConfigError("lexicon valence out of [-1,1] for \"" + token +
                        "\"");
    }
    if (negators.contains(token)) {
      throw ConfigError("token \"" + token +
                        "\" is both a negator and a valence carrier");
    }
  }
  for (const auto& [token, delta] : intensifiers) {
    if (delta < -0.5 || delta > 0.5) {
      throw ConfigError("intensifier delta out of [-0.5,0.5] for \"" +
                        token + "\"");
    }
  }
}

Lexicon parse_lexicon(std::istream& in, const std::string& source_name) {
  Lexicon lexicon;
  for (const auto& negator : default_negators()) {
    lexicon.negators.insert(negator);
  }
  for (const auto& [token, delta] : default_intensifiers()) {
    lexicon.intensifiers.emplace(token, delta);
  }

  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw ParseError(source_name + ":" + std::to_string(line_no) +
                       ": expected \"token<TAB>valence\"");
    }
    const std::string token = lower_ascii(line.substr(0, tab));
    double valence = 0.0;
    try {
      std::size_t consumed = 0;
      valence = std::stod(line.substr(tab + 1), &consumed);
      if (consumed != line.size() - tab - 1) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::exception&) {
      throw ParseError(source_name + ":" + std::to_string(line_no) +
                       ": invalid valence for \"" + token + "\"");
    }
    lexicon.valences[token] = valence;
  }
  lexicon.validate();
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  return parse_lexicon(in, path.string());
}

TokenScore score_tokens(const std::vector<std::string>& tokens,
                        const Lexicon& lexicon) {
  TokenScore score;
  double sum = 0.0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto value = lexicon.valences.find(tokens[i]);
    if (value == lexicon.valences.end()) continue;
    double adjusted = value->second;
    if (i > 0) {
      const auto boost = lexicon.intensifiers.find(tokens[i - 1]);
      if (boost != lexicon.intensifiers.end()) {
        adjusted *= 1.0 + boost->second;
      }
    }
    for (std::size_t back = 1;
         back <= static_cast<std::size_t>(kNegationWindow) && back <= i;
         ++back) {
      if (lexicon.negators.contains(tokens[i - back])) {
        adjusted *= kNegationFactor;
        break;
      }
    }
    sum += adjusted;
    ++score.valenced_tokens;
  }
  score.polarity = sum / std::sqrt(sum * sum + kNormalizationAlpha);
  return score;
}

std::string_view to_string(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::short_post: return "short_post";
    case ScoreMode::long_article: return "long_article";
    case ScoreMode::excluded_self_report: return "excluded_self_report";
  }
  return "short_post";
}

std::optional<ScoreMode> score_mode_from_string(std::string_view name) {
  if (name == "short_post") return ScoreMode::short_post;
  if (name == "long_article") return ScoreMode::long_article;
  if (name == "excluded_self_report") return ScoreMode::excluded_self_report;
  return std::nullopt;
}

SentimentResult score_long_article(std::string_view text,
                                   const Lexicon& lexicon,
                                   const CompanyProfile& profile) {
  SentimentResult result;
  result.mode = ScoreMode::long_article;

  double polarity_sum = 0.0;
  int relevant_paragraphs = 0;
  for (const std::string& paragraph : split_paragraphs(text)) {
    if (!entity_mention(paragraph, profile).mentioned) continue;
    const TokenScore ts =
        score_tokens(tokenize(clean_text(paragraph).cleaned), lexicon);
    polarity_sum += ts.polarity;
    result.valenced_token_count += ts.valenced_tokens;
    ++relevant_paragraphs;
  }
  if (relevant_paragraphs == 0) {
    result.relevant = false;
    result.valenced_token_count = 0;
    return result;
  }
  result.relevant = true;
  result.polarity = polarity_sum / relevant_paragraphs;
  return result;
}

SentimentResult score_short_post(const Document& doc, const Lexicon& lexicon,
                                 const CompanyProfile& profile,
                                 const KeywordTaxonomy& taxonomy) {
  if (doc.network != Network::twitter && doc.network != Network::linkedin) {
    throw InputError("score_short_post on network " +
                     std::string(to_string(doc.network)) + " (document " +
                     doc.id + ")");
  }
  if (!is_relevant(doc, profile, taxonomy).relevant) {
    throw InputError("score_short_post on irrelevant document " + doc.id);
  }
  if (doc.link_url && doc.resolved_link_text &&
      !doc.resolved_link_text->empty()) {
    return score_long_article(*doc.resolved_link_text, lexicon, profile);
  }
  SentimentResult result;
  result.mode = ScoreMode::short_post;
  result.relevant = true;
  const TokenScore ts =
      score_tokens(tokenize(clean_text(doc.text).cleaned), lexicon);
  result.polarity = ts.polarity;
  result.valenced_token_count = ts.valenced_tokens;
  return result;
}

SentimentResult score_document(const Document& doc, const Lexicon& lexicon,
                               const CompanyProfile& profile,
                               const KeywordTaxonomy& taxonomy) {
  if (doc.network == Network::linkedin && doc.author_affiliation &&
      entity_mention(*doc.author_affiliation, profile).mentioned) {
    SentimentResult result;
    result.relevant = false;
    result.mode = ScoreMode::excluded_self_report;
    return result;
  }
  const bool short_network = doc.network == Network::twitter ||
                             doc.network == Network::linkedin;
  if (!is_relevant(doc, profile, taxonomy).relevant) {
    SentimentResult result;
    result.relevant = false;
    result.mode =
        short_network ? ScoreMode::short_post : ScoreMode::long_article;
    return result;
  }
  if (short_network) {
    return score_short_post(doc, lexicon, profile, taxonomy);
  }
  return score_long_article(doc.text, lexicon, profile);
}

std::vector<SentimentResult> score_batch(const std::vector<Document>& docs,
                                         const Lexicon& lexicon,
                                         const ProfileMap& profiles,
                                         const KeywordTaxonomy& taxonomy,
                                         int workers) {
  std::vector<SentimentResult> results(docs.size());
  std::vector<std::string> failures(docs.size());

  const auto score_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Document& doc = docs[i];
      const auto profile = profiles.find(doc.company);
      if (profile == profiles.end()) {
        failures[i] = doc.id + ": no profile for company \"" + doc.company +
                      "\"";
        continue;
      }
      try {
        results[i] = score_document(doc, lexicon, profile->second, taxonomy);
      } catch (const Error& e) {
        failures[i] = doc.id + ": " + e.what();
      }
    }
  };

  const std::size_t n = docs.size();
  const std::size_t thread_count =
      std::min<std::size_t>(std::max(workers, 1), std::max<std::size_t>(n, 1));
  if (thread_count <= 1) {
    score_range(0, n);
  } else {
    // Contiguous slices into a preallocated result vector: worker count can
    // never change values or order.
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    const std::size_t chunk = (n + thread_count - 1) / thread_count;
    for (std::size_t t = 0; t < thread_count; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(score_range, begin, end);
    }
    for (auto& thread : threads) thread.join();
  }

  std::string combined;
  int failure_count = 0;
  for (const auto& failure : failures) {
    if (failure.empty()) continue;
    ++failure_count;
    if (!combined.empty()) combined += "; ";
    combined += failure;
  }
  if (failure_count > 0) {
    throw ValidationError("scoring failed for " +
                          std::to_string(failure_count) + " document(s): " +
                          combined);
  }
  return results;
}

std::string scores_to_jsonl(const std::vector<Document>& docs,
                            const std::vector<SentimentResult>& results) {
  if (docs.size() != results.size()) {
    throw InputError("scores_to_jsonl: size mismatch");
  }
  std::string out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    ordered_json j;
    j["id"] = docs[i].id;
    j["relevant"] = results[i].relevant;
    j["polarity"] = results[i].polarity;
    j["valenced_token_count"] = results[i].valenced_token_count;
    j["mode"] = std::string(to_string(results[i].mode));
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ScoredDocument> parse_scores(std::istream& in,
                                         const std::string& source_name) {
  std::vector<ScoredDocument> scores;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": invalid JSON: " + e.what());
    }
    try {
      ScoredDocument scored;
      scored.id = j.at("id").get<std::string>();
      scored.result.relevant = j.at("relevant").get<bool>();
      scored.result.polarity = j.at("polarity").get<double>();
      scored.result.valenced_token_count =
          j.at("valenced_token_count").get<int>();
      const auto mode =
          score_mode_from_string(j.at("mode").get<std::string>());
      if (!mode) throw ParseError("unknown mode");
      scored.result.mode = *mode;
      scores.push_back(std::move(scored));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return scores;
}

std::vector<ScoredDocument> load_scores(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  return parse_scores(in, path.string());
}

void save_scores(const std::vector<Document>& docs,
                 const std::vector<SentimentResult>& results,
                 const std::filesystem::path& path) {
  io::atomic_write(path, scores_to_jsonl(docs, results));
}

}  // namespace esg
