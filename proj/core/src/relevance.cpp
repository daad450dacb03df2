#include "esg/relevance.hpp"

#include <algorithm>
#include <cctype>

#include "esg/preprocess.hpp"

namespace esg {

namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

bool sequence_at(const std::vector<std::string>& tokens, std::size_t at,
                 const std::vector<std::string>& needle) {
  if (at + needle.size() > tokens.size()) return false;
  for (std::size_t i = 0; i < needle.size(); ++i) {
    if (tokens[at + i] != needle[i]) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::no_alias: return "no_alias";
    case RejectionReason::lowercase_ambiguous: return "lowercase_ambiguous";
    case RejectionReason::blocklisted_sense: return "blocklisted_sense";
  }
  return "no_alias";
}

std::string_view to_string(RelevanceReason reason) {
  switch (reason) {
    case RelevanceReason::relevant: return "relevant";
    case RelevanceReason::no_alias: return "no_alias";
    case RelevanceReason::lowercase_ambiguous: return "lowercase_ambiguous";
    case RelevanceReason::blocklisted_sense: return "blocklisted_sense";
    case RelevanceReason::no_keyword: return "no_keyword";
  }
  return "relevant";
}

std::set<std::string> detect_keywords(const std::vector<std::string>& tokens,
                                      const KeywordTaxonomy& taxonomy) {
  std::set<std::string> matched;
  for (const auto& keyword : taxonomy.keywords()) {
    const std::vector<std::string> parts = tokenize(keyword);
    if (parts.empty()) continue;
    for (std::size_t i = 0; i + parts.size() <= tokens.size(); ++i) {
      if (sequence_at(tokens, i, parts)) {
        matched.insert(keyword);
        break;
      }
    }
  }
  return matched;
}

MentionVerdict entity_mention(std::string_view original_text,
                              const CompanyProfile& profile) {
  const std::vector<std::string> tokens =
      tokenize_preserving_case(original_text);
  std::vector<std::string> tokens_lower(tokens.size());
  std::transform(tokens.begin(), tokens.end(), tokens_lower.begin(),
                 [](const std::string& t) { return lower_ascii(t); });

  std::vector<std::string> blocklist_lower;
  blocklist_lower.reserve(profile.blocklist_nouns.size());
  for (const auto& noun : profile.blocklist_nouns) {
    blocklist_lower.push_back(lower_ascii(noun));
  }

  bool saw_blocklisted = false;
  bool saw_wrong_case_ambiguous = false;

  for (const auto& alias : profile.match_aliases()) {
    const std::vector<std::string> alias_tokens =
        tokenize_preserving_case(alias);
    if (alias_tokens.empty()) continue;
    std::vector<std::string> alias_lower(alias_tokens.size());
    std::transform(alias_tokens.begin(), alias_tokens.end(),
                   alias_lower.begin(),
                   [](const std::string& t) { return lower_ascii(t); });
    const bool ambiguous = profile.is_ambiguous(alias);

    for (std::size_t i = 0; i + alias_tokens.size() <= tokens.size(); ++i) {
      if (!sequence_at(tokens_lower, i, alias_lower)) continue;
      if (!sequence_at(tokens, i, alias_tokens)) {
        // Occurrence with the wrong casing never matches.
        if (ambiguous) saw_wrong_case_ambiguous = true;
        continue;
      }
      if (ambiguous) {
        const std::size_t after = i + alias_tokens.size();
        if (after < tokens.size() &&
            std::find(blocklist_lower.begin(), blocklist_lower.end(),
                      tokens_lower[after]) != blocklist_lower.end()) {
          saw_blocklisted = true;
          continue;
        }
      }
      MentionVerdict verdict;
      verdict.mentioned = true;
      verdict.matched_alias = alias;
      return verdict;
    }
  }

  MentionVerdict verdict;
  verdict.mentioned = false;
  if (saw_blocklisted) {
    verdict.rejection_reason = RejectionReason::blocklisted_sense;
  } else if (saw_wrong_case_ambiguous) {
    verdict.rejection_reason = RejectionReason::lowercase_ambiguous;
  } else {
    verdict.rejection_reason = RejectionReason::no_alias;
  }
  return verdict;
}

RelevanceVerdict is_relevant(const Document& doc,
                             const CompanyProfile& profile,
                             const KeywordTaxonomy& taxonomy) {
  RelevanceVerdict verdict;
  const MentionVerdict mention = entity_mention(doc.text, profile);
  if (!mention.mentioned) {
    verdict.relevant = false;
    switch (*mention.rejection_reason) {
      case RejectionReason::no_alias:
        verdict.reason = RelevanceReason::no_alias;
        break;
      case RejectionReason::lowercase_ambiguous:
        verdict.reason = RelevanceReason::lowercase_ambiguous;
        break;
      case RejectionReason::blocklisted_sense:
        verdict.reason = RelevanceReason::blocklisted_sense;
        break;
    }
    return verdict;
  }
  verdict.matched_alias = mention.matched_alias;
  verdict.matched_keywords = detect_keywords(tokenize(doc.text), taxonomy);
  if (verdict.matched_keywords.empty() &&
      doc.network != Network::wikipedia) {
    verdict.relevant = false;
    verdict.reason = RelevanceReason::no_keyword;
    return verdict;
  }
  verdict.relevant = true;
  verdict.reason = RelevanceReason::relevant;
  return verdict;
}

}  // namespace esg
