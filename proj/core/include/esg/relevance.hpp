#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "esg/corpus.hpp"

namespace esg {

enum class RejectionReason { no_alias, lowercase_ambiguous, blocklisted_sense };

std::string_view to_string(RejectionReason reason);

// Outcome of the company-mention heuristic (a deterministic stand-in for a
// named-entity recognizer). Exactly one of matched_alias / rejection_reason
// is set.
struct MentionVerdict {
  bool mentioned = false;
  std::optional<std::string> matched_alias;
  std::optional<RejectionReason> rejection_reason;
};

// Exact token matches against taxonomy keywords; multi-word keywords match
// as consecutive token runs. Tokens must already be lowercased.
std::set<std::string> detect_keywords(const std::vector<std::string>& tokens,
                                      const KeywordTaxonomy& taxonomy);

// Case-sensitive alias scan over text with original casing. An alias listed
// in ambiguous_aliases is additionally rejected when the token right after
// it is a blocklisted noun. When no occurrence survives, the reason reports
// the closest miss: blocklisted_sense, then lowercase_ambiguous (a
// wrong-case occurrence of an ambiguous alias), then no_alias.
MentionVerdict entity_mention(std::string_view original_text,
                              const CompanyProfile& profile);

enum class RelevanceReason {
  relevant,
  no_alias,
  lowercase_ambiguous,
  blocklisted_sense,
  no_keyword,
};

std::string_view to_string(RelevanceReason reason);

struct RelevanceVerdict {
  bool relevant = false;
  RelevanceReason reason = RelevanceReason::relevant;
  std::optional<std::string> matched_alias;
  std::set<std::string> matched_keywords;
};

// Relevant iff the company is mentioned and at least one taxonomy keyword
// occurs in the text. Wikipedia documents waive the keyword requirement:
// the article is the company page itself.
RelevanceVerdict is_relevant(const Document& doc,
                             const CompanyProfile& profile,
                             const KeywordTaxonomy& taxonomy);

}  // namespace esg
