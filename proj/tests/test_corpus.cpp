#include "esg/corpus.hpp"

#include <fstream>
#include <sstream>

#include "doctest.h"
#include "esg/rng.hpp"
#include "helpers.hpp"

using namespace esg;
using namespace esg::test;
using namespace std::chrono_literals;

TEST_CASE("default taxonomy matches the pillar keyword lists") {
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  CHECK(taxonomy.environment.size() == 6);
  CHECK(taxonomy.social.size() == 6);
  CHECK(taxonomy.governance.size() == 7);
  CHECK(taxonomy.keyword_count() == 19);
  CHECK_NOTHROW(taxonomy.validate());

  const auto features = taxonomy.feature_names();
  CHECK(features.size() == 20);
  CHECK(features.front() == "environment");
  CHECK(features.back() == "wikipedia");
  CHECK(taxonomy.contains("human rights"));
  CHECK(!taxonomy.contains("wikipedia"));
  // Stable order across calls.
  CHECK(features == taxonomy.feature_names());
}

TEST_CASE("taxonomy validation rejects duplicates and emptiness") {
  KeywordTaxonomy taxonomy;
  CHECK_THROWS_AS(taxonomy.validate(), ConfigError);
  taxonomy.environment = {"carbon"};
  taxonomy.social = {"carbon"};
  CHECK_THROWS_AS(taxonomy.validate(), ConfigError);
  taxonomy.social = {"wikipedia"};
  CHECK_THROWS_AS(taxonomy.validate(), ConfigError);
}

TEST_CASE("build_queries enumerates keyword x network plus wikipedia") {
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  const CompanyProfile apple = apple_profile();
  const auto queries = build_queries(apple, taxonomy);
  REQUIRE(queries.size() == 58);  // 19 x 3 + 1

  CHECK(queries[0] == Query{Network::twitter, "Apple environment"});
  CHECK(queries[1] == Query{Network::linkedin, "Apple environment"});
  CHECK(queries[2] == Query{Network::news, "Apple environment"});
  CHECK(queries.back() == Query{Network::wikipedia, "Apple"});

  bool has_news_climate = false;
  for (const auto& query : queries) {
    if (query.network == Network::news && query.text == "Apple climate") {
      has_news_climate = true;
    }
  }
  CHECK(has_news_climate);

  // Pure function: identical output on a second call.
  CHECK(build_queries(apple, taxonomy) == queries);
}

TEST_CASE("build_queries with one keyword gives four queries") {
  KeywordTaxonomy taxonomy;
  taxonomy.environment = {"carbon"};
  const auto queries = build_queries(acme_profile(), taxonomy);
  REQUIRE(queries.size() == 4);
  CHECK(queries[3].network == Network::wikipedia);
}

TEST_CASE("two companies differ only in the company token") {
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  CompanyProfile a = acme_profile();
  CompanyProfile b = acme_profile();
  b.canonical_name = "Borg";
  b.aliases = {"Borg"};
  const auto qa = build_queries(a, taxonomy);
  const auto qb = build_queries(b, taxonomy);
  REQUIRE(qa.size() == qb.size());
  for (std::size_t i = 0; i < qa.size(); ++i) {
    CHECK(qa[i].network == qb[i].network);
    std::string swapped = qb[i].text;
    swapped.replace(swapped.find("Borg"), 4, "Acme");
    CHECK(qa[i].text == swapped);
  }
}

TEST_CASE("build_queries rejects an empty taxonomy") {
  CHECK_THROWS_AS(build_queries(acme_profile(), KeywordTaxonomy{}),
                  ConfigError);
}

namespace {

std::vector<Document> pool_docs(int count) {
  std::vector<Document> docs;
  for (int i = 0; i < count; ++i) {
    docs.push_back(make_doc("p" + std::to_string(i), "Acme",
                            Network::twitter, "carbon",
                            "Acme carbon note " + std::to_string(i)));
  }
  return docs;
}

}  // namespace

TEST_CASE("collect caps at target_count") {
  FixtureAdapter adapter(Network::twitter, pool_docs(150));
  RecordingClock clock;
  const CollectResult result =
      collect(adapter, "Acme carbon", 100, RatePolicy{}, clock);
  CHECK(result.docs.size() == 100);
  CHECK(!result.shortfall);
  CHECK(clock.sleeps.empty());
  CHECK(result.docs.front().id == "p0");
}

TEST_CASE("collect reports a shortfall when the adapter runs dry") {
  FixtureAdapter adapter(Network::twitter, pool_docs(40));
  RecordingClock clock;
  const CollectResult result =
      collect(adapter, "Acme carbon", 100, RatePolicy{}, clock);
  CHECK(result.docs.size() == 40);
  CHECK(result.shortfall);
  CHECK(result.warning.find("40 of 100") != std::string::npos);
}

TEST_CASE("collect backs off once on a single rate-limit signal") {
  ScriptedAdapter adapter({rate_limited_fetch(),
                           ok_fetch(pool_docs(2)[0]),
                           ok_fetch(pool_docs(2)[1])});
  RatePolicy policy;
  policy.base_delay = 1000ms;
  policy.max_retries = 3;
  RecordingClock clock;
  const CollectResult result = collect(adapter, "q", 2, policy, clock);
  CHECK(result.docs.size() == 2);
  CHECK(result.retries == 1);
  REQUIRE(clock.sleeps.size() == 1);
  CHECK(clock.sleeps[0] == 1000ms);
}

TEST_CASE("collect raises CollectionError with partial results") {
  ScriptedAdapter adapter({ok_fetch(pool_docs(1)[0]), rate_limited_fetch(),
                           rate_limited_fetch(), rate_limited_fetch(),
                           rate_limited_fetch()});
  RatePolicy policy;
  policy.base_delay = 10ms;
  policy.max_retries = 2;
  RecordingClock clock;
  try {
    collect(adapter, "q", 5, policy, clock);
    FAIL("expected CollectionError");
  } catch (const CollectionError& e) {
    CHECK(e.partial().size() == 1);
    CHECK(clock.sleeps.size() == 2);
  }
}

TEST_CASE("backoff delays are nondecreasing and capped") {
  RatePolicy policy;
  policy.base_delay = 100ms;
  policy.max_delay = 1000ms;
  policy.multiplier = 3.0;
  policy.max_retries = 6;

  CHECK(policy.delay_for(0) == 100ms);
  CHECK(policy.delay_for(1) == 300ms);
  CHECK(policy.delay_for(2) == 900ms);
  CHECK(policy.delay_for(3) == 1000ms);
  CHECK(policy.delay_for(6) == 1000ms);

  std::vector<SourceAdapter::Fetch> script(7, rate_limited_fetch());
  ScriptedAdapter adapter(script);
  RecordingClock clock;
  CHECK_THROWS_AS(collect(adapter, "q", 3, policy, clock), CollectionError);
  REQUIRE(clock.sleeps.size() == 6);
  for (std::size_t i = 1; i < clock.sleeps.size(); ++i) {
    CHECK(clock.sleeps[i] >= clock.sleeps[i - 1]);
    CHECK(clock.sleeps[i] <= policy.max_delay);
  }
}

TEST_CASE("collect stays within the adapter call budget") {
  Rng rng(99);
  for (int round = 0; round < 50; ++round) {
    const int target = rng.uniform_int(1, 20);
    const int docs_available = rng.uniform_int(0, 25);
    const int limit_events = rng.uniform_int(0, 4);
    RatePolicy policy;
    policy.base_delay = 1ms;
    policy.max_retries = 5;

    std::vector<SourceAdapter::Fetch> script;
    auto docs = pool_docs(docs_available);
    std::size_t doc_at = 0;
    int limits_left = limit_events;
    while (doc_at < docs.size() || limits_left > 0) {
      if (limits_left > 0 && rng.uniform01() < 0.3) {
        script.push_back(rate_limited_fetch());
        --limits_left;
      } else if (doc_at < docs.size()) {
        script.push_back(ok_fetch(docs[doc_at++]));
      } else {
        break;
      }
    }
    ScriptedAdapter adapter(std::move(script));
    RecordingClock clock;
    try {
      collect(adapter, "q", target, policy, clock);
    } catch (const CollectionError&) {
    }
    CHECK(adapter.calls <= target + policy.max_retries);
  }
}

namespace {

class FailingAdapter final : public SourceAdapter {
 public:
  Fetch next(const std::string&) override {
    throw SourceError("connection reset");
  }
  std::string name() const override { return "failing"; }
};

}  // namespace

TEST_CASE("adapter failures propagate as source errors") {
  FailingAdapter adapter;
  RecordingClock clock;
  CHECK_THROWS_AS(collect(adapter, "q", 3, RatePolicy{}, clock),
                  SourceError);
}

TEST_CASE("rate policy validation") {
  RatePolicy policy;
  policy.multiplier = 1.0;
  CHECK_THROWS_AS(policy.validate(), ConfigError);
  policy = RatePolicy{};
  policy.max_delay = 1ms;
  CHECK_THROWS_AS(policy.validate(), ConfigError);
  policy = RatePolicy{};
  policy.max_retries = -1;
  CHECK_THROWS_AS(policy.validate(), ConfigError);
}

TEST_CASE("corpus JSONL round-trips") {
  TempDir dir("corpus_rt");
  std::vector<Document> docs = pool_docs(3);
  docs[1].timestamp = "2021-05-01T10:00:00Z";
  docs[1].author_name = "jo";
  docs[1].author_affiliation = "SomeCo";
  docs[1].link_url = "https://x.co/a";
  docs[1].resolved_link_text = "Acme carbon body\n\nmore";
  docs[2].network = Network::wikipedia;
  docs[2].keyword = "wikipedia";

  const auto path = dir.path() / "corpus.jsonl";
  save_corpus(docs, path);
  const std::vector<Document> loaded = load_corpus(path);
  CHECK(loaded == docs);

  // Round-trip is byte-stable too.
  const std::string once = corpus_to_jsonl(docs);
  CHECK(corpus_to_jsonl(loaded) == once);
}

TEST_CASE("corpus parsing reports line numbers and duplicates") {
  {
    std::istringstream in("");
    CHECK(parse_corpus(in, "t").empty());
  }
  {
    std::istringstream in(
        R"({"id":"a","company":"X","network":"twitter","keyword":"carbon","text":"x carbon"})"
        "\n"
        R"({"id":"b","company":"X","network":"twitter","keyword":"carbon"})"
        "\n");
    try {
      parse_corpus(in, "corpus.jsonl");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("corpus.jsonl:2") !=
            std::string::npos);
      CHECK(std::string(e.what()).find("text") != std::string::npos);
    }
  }
  {
    std::istringstream in("{not json\n");
    CHECK_THROWS_AS(parse_corpus(in, "t"), ParseError);
  }
  {
    const std::string line =
        R"({"id":"a","company":"X","network":"twitter","keyword":"carbon","text":"x"})";
    std::istringstream in(line + "\n" + line + "\n");
    CHECK_THROWS_AS(parse_corpus(in, "t"), ValidationError);
  }
  {
    std::istringstream in(
        R"({"id":"a","company":"X","network":"wikipedia","keyword":"carbon","text":"x"})"
        "\n");
    CHECK_THROWS_AS(parse_corpus(in, "t"), ValidationError);
  }
}

TEST_CASE("fixture adapter serves per-query cursors") {
  std::vector<Document> pool = pool_docs(2);
  pool.push_back(make_doc("w1", "Acme", Network::wikipedia, "wikipedia",
                          "Acme is a company."));
  FixtureAdapter twitter(Network::twitter, pool);
  FixtureAdapter wikipedia(Network::wikipedia, pool);

  CHECK(twitter.next("Acme carbon").status == SourceAdapter::Status::ok);
  CHECK(twitter.next("Acme carbon").status == SourceAdapter::Status::ok);
  CHECK(twitter.next("Acme carbon").status ==
        SourceAdapter::Status::exhausted);
  CHECK(twitter.next("Acme climate").status ==
        SourceAdapter::Status::exhausted);
  CHECK(wikipedia.next("Acme").status == SourceAdapter::Status::ok);
}

TEST_CASE("company profile validation") {
  CompanyProfile profile;
  CHECK_THROWS_AS(profile.validate(), ValidationError);
  profile.canonical_name = "Acme";
  profile.ambiguous_aliases = {"Acme"};
  CHECK_THROWS_AS(profile.validate(), ValidationError);  // not in aliases
  profile.aliases = {"Acme"};
  CHECK_NOTHROW(profile.validate());
  CHECK(profile.match_aliases() == std::vector<std::string>{"Acme"});
}
