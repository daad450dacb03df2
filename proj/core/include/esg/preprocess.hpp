#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace esg {

// Result of the deterministic cleaning pass. `cleaned` contains no URL
// spans and no raw @-mentions, and clean_text(cleaned) == cleaned.
struct CleanText {
  std::string original;
  std::string cleaned;
  int removed_urls = 0;
  int replaced_mentions = 0;
};

// Applies the cleaning rules in contract order:
//   1. URL spans (scheme:// and www.-led tokens) deleted, along with the
//      whitespace run directly before them; trailing sentence punctuation
//      is not part of the span.
//   2. @-mentions replaced by the literal token "user".
//   3. Characters outside the retained set {ASCII letters, digits,
//      whitespace, . , ! ? ' " -} removed. Multi-byte UTF-8 sequences are
//      outside the set and are dropped whole.
//   4. Whitespace runs collapsed to single spaces, ends trimmed.
// The pass repeats until a fixpoint so the result is idempotent even when
// character removal uncovers a new URL or mention.
CleanText clean_text(std::string_view text);

// Splits on blank-line boundaries (lines that are empty or all whitespace).
// Paragraphs keep their inner newlines and are trimmed; empty ones dropped.
std::vector<std::string> split_paragraphs(std::string_view text);

// Lowercased tokens split on whitespace and punctuation, keeping apostrophes
// and hyphens that sit between word characters ("state-of-the-art", "isn't").
std::vector<std::string> tokenize(std::string_view text);

// Same segmentation as tokenize() but with original casing, for
// case-sensitive alias matching.
std::vector<std::string> tokenize_preserving_case(std::string_view text);

}  // namespace esg
