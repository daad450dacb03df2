#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "esg/errors.hpp"

namespace esg {

enum class Network { twitter, linkedin, news, wikipedia };

std::string_view to_string(Network network);
std::optional<Network> network_from_string(std::string_view name);

// The three text networks queried per keyword, in enum order. Wikipedia is
// queried once per company instead.
inline constexpr Network kTextNetworks[] = {Network::twitter,
                                            Network::linkedin, Network::news};

// Pillar keyword lists. The canonical feature order is the concatenation
// E, S, G plus a trailing "wikipedia" pseudo-category, stable across runs
// for a given configuration.
struct KeywordTaxonomy {
  std::vector<std::string> environment;
  std::vector<std::string> social;
  std::vector<std::string> governance;

  // 6 environment + 6 social + 7 governance keywords.
  static KeywordTaxonomy default_taxonomy();

  std::vector<std::string> keywords() const;       // E then S then G
  std::vector<std::string> feature_names() const;  // keywords() + "wikipedia"
  std::size_t keyword_count() const;
  bool contains(std::string_view keyword) const;

  // Throws ConfigError on duplicates, empty keywords, or an empty taxonomy.
  void validate() const;
};

inline constexpr std::string_view kWikipediaCategory = "wikipedia";

struct CompanyProfile {
  std::string canonical_name;
  std::vector<std::string> aliases;            // ticker, short names
  std::vector<std::string> ambiguous_aliases;  // subset that are common words
  std::string sector;
  std::vector<std::string> blocklist_nouns;    // product/botanical senses

  // canonical_name plus aliases, deduplicated, order preserved.
  std::vector<std::string> match_aliases() const;
  bool is_ambiguous(std::string_view alias) const;

  // Throws ValidationError when canonical_name is empty or
  // ambiguous_aliases is not a subset of aliases.
  void validate() const;
};

struct Document {
  std::string id;
  std::string company;  // canonical_name
  Network network = Network::twitter;
  std::string keyword;  // taxonomy keyword, or "wikipedia"
  std::string text;
  std::optional<std::string> timestamp;  // ISO-8601
  std::optional<std::string> author_name;
  std::optional<std::string> author_affiliation;
  std::optional<std::string> link_url;
  std::optional<std::string> resolved_link_text;

  bool operator==(const Document&) const = default;
};

// Exponential backoff parameters for rate-limited collection.
struct RatePolicy {
  std::chrono::milliseconds base_delay{1000};
  std::chrono::milliseconds max_delay{60000};
  double multiplier = 2.0;
  int max_retries = 5;

  // delay_k = min(base_delay * multiplier^k, max_delay)
  std::chrono::milliseconds delay_for(int retry) const;
  void validate() const;
};

struct Query {
  Network network = Network::twitter;
  std::string text;

  bool operator==(const Query&) const = default;
};

// One query per (keyword x text network) of the form
// "<canonical_name> <keyword>", in taxonomy order then network enum order,
// plus one trailing wikipedia query "<canonical_name>".
std::vector<Query> build_queries(const CompanyProfile& company,
                                 const KeywordTaxonomy& taxonomy);

// Injectable clock so tests can record backoff sleeps instead of waiting.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual void sleep_for(std::chrono::milliseconds delay) = 0;
};

class SystemClock final : public Clock {
 public:
  void sleep_for(std::chrono::milliseconds delay) override;
};

class RecordingClock final : public Clock {
 public:
  void sleep_for(std::chrono::milliseconds delay) override {
    sleeps.push_back(delay);
  }
  std::vector<std::chrono::milliseconds> sleeps;
};

// Pluggable document provider. One call yields at most one document;
// rate limits surface as a status, hard failures as SourceError.
class SourceAdapter {
 public:
  enum class Status { ok, rate_limited, exhausted };
  struct Fetch {
    Status status = Status::exhausted;
    std::optional<Document> doc;
  };

  virtual ~SourceAdapter() = default;
  virtual Fetch next(const std::string& query) = 0;
  virtual std::string name() const = 0;
};

// Serves documents from an in-memory pool, keyed by the query string the
// collection layer would build for them. Optionally emits a rate-limit
// signal every `rate_limit_every`-th call to exercise the backoff path.
class FixtureAdapter final : public SourceAdapter {
 public:
  FixtureAdapter(Network network, std::vector<Document> pool,
                 int rate_limit_every = 0);

  Fetch next(const std::string& query) override;
  std::string name() const override;

 private:
  Network network_;
  std::map<std::string, std::vector<Document>> by_query_;
  std::map<std::string, std::size_t> cursor_;
  int rate_limit_every_ = 0;
  long calls_ = 0;
};

struct CollectResult {
  std::vector<Document> docs;
  bool shortfall = false;  // adapter ran out before target_count
  std::string warning;     // human-readable shortfall note
  int retries = 0;         // rate-limit retries consumed
};

// Raised when RatePolicy::max_retries is exceeded; carries what was
// gathered before giving up.
class CollectionError : public Error {
 public:
  CollectionError(const std::string& message, std::vector<Document> partial)
      : Error(message), partial_(std::move(partial)) {}
  const std::vector<Document>& partial() const { return partial_; }

 private:
  std::vector<Document> partial_;
};

// Pulls up to target_count documents for one query. Rate-limit signals
// sleep delay_k = min(base * multiplier^k, max) on the given clock and
// retry; the retry budget spans the whole call, so recorded delays are
// nondecreasing. Total adapter calls <= target_count + max_retries.
CollectResult collect(SourceAdapter& adapter, const std::string& query,
                      int target_count, const RatePolicy& policy,
                      Clock& clock);

// Convenience overload sleeping on the system clock.
CollectResult collect(SourceAdapter& adapter, const std::string& query,
                      int target_count, const RatePolicy& policy);

// Corpus files are JSONL, UTF-8, one Document per line with field names
// matching the Document members. Parse errors carry 1-based line numbers;
// duplicate ids are rejected.
std::vector<Document> load_corpus(const std::filesystem::path& path);
std::vector<Document> parse_corpus(std::istream& in,
                                   const std::string& source_name);
void save_corpus(const std::vector<Document>& docs,
                 const std::filesystem::path& path);
std::string corpus_to_jsonl(const std::vector<Document>& docs);

}  // namespace esg
