#include "esg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "esg/io.hpp"
#include "json.hpp"

namespace esg {

namespace {
using ordered_json = nlohmann::ordered_json;
}

std::string_view to_string(Network network) {
  switch (network) {
    case Network::twitter: return "twitter";
    case Network::linkedin: return "linkedin";
    case Network::news: return "news";
    case Network::wikipedia: return "wikipedia";
  }
  return "twitter";
}

std::optional<Network> network_from_string(std::string_view name) {
  if (name == "twitter") return Network::twitter;
  if (name == "linkedin") return Network::linkedin;
  if (name == "news") return Network::news;
  if (name == "wikipedia") return Network::wikipedia;
  return std::nullopt;
}

KeywordTaxonomy KeywordTaxonomy::default_taxonomy() {
  KeywordTaxonomy t;
  t.environment = {"environment", "carbon",    "climate",
                   "emission",    "pollution", "sustainability"};
  t.social = {"social",    "community",    "discrimination",
              "diversity", "human rights", "labor"};
  t.governance = {"governance", "compensation", "corruption", "ethical",
                  "fraud",      "justice",      "transparency"};
  return t;
}

std::vector<std::string> KeywordTaxonomy::keywords() const {
  std::vector<std::string> all;
  all.reserve(environment.size() + social.size() + governance.size());
  all.insert(all.end(), environment.begin(), environment.end());
  all.insert(all.end(), social.begin(), social.end());
  all.insert(all.end(), governance.begin(), governance.end());
  return all;
}

std::vector<std::string> KeywordTaxonomy::feature_names() const {
  std::vector<std::string> names = keywords();
  names.emplace_back(kWikipediaCategory);
  return names;
}

std::size_t KeywordTaxonomy::keyword_count() const {
  return environment.size() + social.size() + governance.size();
}

bool KeywordTaxonomy::contains(std::string_view keyword) const {
  const auto in = [&](const std::vector<std::string>& v) {
    return std::find(v.begin(), v.end(), keyword) != v.end();
  };
  return in(environment) || in(social) || in(governance);
}

void KeywordTaxonomy::validate() const {
  if (keyword_count() == 0) {
    throw ConfigError("taxonomy has no keywords");
  }
  std::set<std::string> seen;
  for (const auto& kw : keywords()) {
    if (kw.empty()) throw ConfigError("taxonomy contains an empty keyword");
    if (kw == kWikipediaCategory) {
      throw ConfigError("\"wikipedia\" is reserved for the pseudo-category");
    }
    if (!seen.insert(kw).second) {
      throw ConfigError("duplicate keyword across pillars: " + kw);
    }
  }
}

std::vector<std::string> CompanyProfile::match_aliases() const {
  std::vector<std::string> out;
  out.push_back(canonical_name);
  for (const auto& a : aliases) {
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

bool CompanyProfile::is_ambiguous(std::string_view alias) const {
  return std::find(ambiguous_aliases.begin(), ambiguous_aliases.end(),
                   alias) != ambiguous_aliases.end();
}

void CompanyProfile::validate() const {
  if (canonical_name.empty()) {
    throw ValidationError("company profile with empty canonical_name");
  }
  if (canonical_name.find_first_of(",\n\r") != std::string::npos) {
    throw ValidationError("company name unusable in CSV output: " +
                          canonical_name);
  }
  for (const auto& a : ambiguous_aliases) {
    if (std::find(aliases.begin(), aliases.end(), a) == aliases.end()) {
      throw ValidationError("ambiguous alias \"" + a +
                            "\" of " + canonical_name +
                            " is not listed in aliases");
    }
  }
}

std::chrono::milliseconds RatePolicy::delay_for(int retry) const {
  double ms = static_cast<double>(base_delay.count());
  for (int i = 0; i < retry; ++i) {
    ms *= multiplier;
    if (ms >= static_cast<double>(max_delay.count())) break;
  }
  ms = std::min(ms, static_cast<double>(max_delay.count()));
  return std::chrono::milliseconds(static_cast<long long>(std::llround(ms)));
}

void RatePolicy::validate() const {
  if (base_delay.count() < 0 || max_delay < base_delay) {
    throw ConfigError("rate policy requires 0 <= base_delay <= max_delay");
  }
  if (multiplier <= 1.0) {
    throw ConfigError("rate policy multiplier must be > 1");
  }
  if (max_retries < 0) {
    throw ConfigError("rate policy max_retries must be >= 0");
  }
}

std::vector<Query> build_queries(const CompanyProfile& company,
                                 const KeywordTaxonomy& taxonomy) {
  taxonomy.validate();
  company.validate();
  std::vector<Query> queries;
  queries.reserve(taxonomy.keyword_count() * 3 + 1);
  for (const auto& keyword : taxonomy.keywords()) {
    for (const Network network : kTextNetworks) {
      queries.push_back(
          {network, company.canonical_name + " " + keyword});
    }
  }
  queries.push_back({Network::wikipedia, company.canonical_name});
  return queries;
}

void SystemClock::sleep_for(std::chrono::milliseconds delay) {
  std::this_thread::sleep_for(delay);
}

FixtureAdapter::FixtureAdapter(Network network, std::vector<Document> pool,
                               int rate_limit_every)
    : network_(network), rate_limit_every_(rate_limit_every) {
  for (auto& doc : pool) {
    if (doc.network != network_) continue;
    const std::string query =
        doc.network == Network::wikipedia
            ? doc.company
            : doc.company + " " + doc.keyword;
    by_query_[query].push_back(std::move(doc));
  }
}

SourceAdapter::Fetch FixtureAdapter::next(const std::string& query) {
  ++calls_;
  if (rate_limit_every_ > 0 && calls_ % rate_limit_every_ == 0) {
    return {Status::rate_limited, std::nullopt};
  }
  const auto it = by_query_.find(query);
  if (it == by_query_.end()) return {Status::exhausted, std::nullopt};
  std::size_t& pos = cursor_[query];
  if (pos >= it->second.size()) return {Status::exhausted, std::nullopt};
  return {Status::ok, it->second[pos++]};
}

std::string FixtureAdapter::name() const {
  return "fixture:" + std::string(to_string(network_));
}

CollectResult collect(SourceAdapter& adapter, const std::string& query,
                      int target_count, const RatePolicy& policy,
                      Clock& clock) {
  if (target_count < 1) {
    throw InputError("collect target_count must be >= 1");
  }
  policy.validate();

  CollectResult result;
  while (static_cast<int>(result.docs.size()) < target_count) {
    const SourceAdapter::Fetch fetch = adapter.next(query);
    switch (fetch.status) {
      case SourceAdapter::Status::ok:
        if (fetch.doc) result.docs.push_back(*fetch.doc);
        break;
      case SourceAdapter::Status::rate_limited: {
        if (result.retries >= policy.max_retries) {
          throw CollectionError(
              "rate limit retries exhausted for \"" + query + "\" on " +
                  adapter.name() + " after " +
                  std::to_string(result.retries) + " retries",
              std::move(result.docs));
        }
        clock.sleep_for(policy.delay_for(result.retries));
        ++result.retries;
        break;
      }
      case SourceAdapter::Status::exhausted: {
        result.shortfall = true;
        result.warning = adapter.name() + " exhausted for \"" + query +
                         "\": got " + std::to_string(result.docs.size()) +
                         " of " + std::to_string(target_count);
        return result;
      }
    }
  }
  return result;
}

CollectResult collect(SourceAdapter& adapter, const std::string& query,
                      int target_count, const RatePolicy& policy) {
  SystemClock clock;
  return collect(adapter, query, target_count, policy, clock);
}

namespace {

void set_optional(ordered_json& j, const char* key,
                  const std::optional<std::string>& value) {
  if (value) j[key] = *value;
}

std::optional<std::string> get_optional(const ordered_json& j,
                                        const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw ParseError(std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

std::string require_string(const ordered_json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    throw ParseError(std::string("missing required field \"") + key + "\"");
  }
  if (!it->is_string()) {
    throw ParseError(std::string("field \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

Document document_from_json(const ordered_json& j) {
  if (!j.is_object()) throw ParseError("document record is not an object");
  Document doc;
  doc.id = require_string(j, "id");
  doc.company = require_string(j, "company");
  const std::string network = require_string(j, "network");
  const auto parsed = network_from_string(network);
  if (!parsed) throw ParseError("unknown network \"" + network + "\"");
  doc.network = *parsed;
  doc.keyword = require_string(j, "keyword");
  doc.text = require_string(j, "text");
  doc.timestamp = get_optional(j, "timestamp");
  doc.author_name = get_optional(j, "author_name");
  doc.author_affiliation = get_optional(j, "author_affiliation");
  doc.link_url = get_optional(j, "link_url");
  doc.resolved_link_text = get_optional(j, "resolved_link_text");

  if (doc.id.empty()) throw ValidationError("document has empty id");
  if (doc.text.empty()) {
    throw ValidationError("document " + doc.id + " has empty text");
  }
  if (doc.network == Network::wikipedia &&
      doc.keyword != kWikipediaCategory) {
    throw ValidationError("wikipedia document " + doc.id +
                          " must use keyword \"wikipedia\"");
  }
  return doc;
}

ordered_json document_to_json(const Document& doc) {
  ordered_json j;
  j["id"] = doc.id;
  j["company"] = doc.company;
  j["network"] = std::string(to_string(doc.network));
  j["keyword"] = doc.keyword;
  j["text"] = doc.text;
  set_optional(j, "timestamp", doc.timestamp);
  set_optional(j, "author_name", doc.author_name);
  set_optional(j, "author_affiliation", doc.author_affiliation);
  set_optional(j, "link_url", doc.link_url);
  set_optional(j, "resolved_link_text", doc.resolved_link_text);
  return j;
}

}  // namespace

std::vector<Document> parse_corpus(std::istream& in,
                                   const std::string& source_name) {
  std::vector<Document> docs;
  std::set<std::string> ids;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ordered_json j;
    try {
      j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source_name + ":" + std::to_string(line_no) +
                       ": invalid JSON: " + e.what());
    }
    Document doc;
    try {
      doc = document_from_json(j);
    } catch (const ValidationError& e) {
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(source_name + ":" + std::to_string(line_no) + ": " +
                       e.what());
    }
    if (!ids.insert(doc.id).second) {
      throw ValidationError(source_name + ":" + std::to_string(line_no) +
                            ": duplicate document id \"" + doc.id + "\"");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  return parse_corpus(in, path.string());
}

std::string corpus_to_jsonl(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& doc : docs) {
    out += document_to_json(doc).dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const std::vector<Document>& docs,
                 const std::filesystem::path& path) {
  io::atomic_write(path, corpus_to_jsonl(docs));
}

}  // namespace esg
