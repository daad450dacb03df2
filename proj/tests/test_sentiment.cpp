#include "esg/sentiment.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "esg/preprocess.hpp"
#include "esg/rng.hpp"
#include "helpers.hpp"

using namespace esg;
using namespace esg::test;

namespace {

Lexicon toy_lexicon() {
  Lexicon lexicon;
  lexicon.valences = {{"good", 0.5}, {"bad", -0.5}, {"solid", 0.6}};
  for (const auto& negator : default_negators()) {
    lexicon.negators.insert(negator);
  }
  for (const auto& [token, delta] : default_intensifiers()) {
    lexicon.intensifiers.emplace(token, delta);
  }
  return lexicon;
}

}  // namespace

TEST_CASE("score_tokens closed-form examples") {
  const Lexicon lexicon = toy_lexicon();

  const TokenScore empty = score_tokens({}, lexicon);
  CHECK(empty.polarity == 0.0);
  CHECK(empty.valenced_tokens == 0);

  const TokenScore good = score_tokens({"good"}, lexicon);
  CHECK(good.valenced_tokens == 1);
  CHECK(good.polarity ==
        doctest::Approx(0.12803687993289598).epsilon(1e-12));

  const TokenScore negated = score_tokens({"not", "good"}, lexicon);
  CHECK(negated.valenced_tokens == 1);
  CHECK(negated.polarity ==
        doctest::Approx(-0.09637388493048533).epsilon(1e-12));
}

TEST_CASE("negation window spans three tokens") {
  const Lexicon lexicon = toy_lexicon();
  const double plain = score_tokens({"good"}, lexicon).polarity;
  CHECK(score_tokens({"not", "good"}, lexicon).polarity < 0);
  CHECK(score_tokens({"not", "so", "good"}, lexicon).polarity < 0);
  CHECK(score_tokens({"not", "at", "all", "good"}, lexicon).polarity < 0);
  // Four tokens back is outside the window.
  CHECK(score_tokens({"not", "a", "b", "c", "good"}, lexicon).polarity ==
        plain);
}

TEST_CASE("intensifier scales the following valenced token") {
  const Lexicon lexicon = toy_lexicon();
  const double s = 0.5 * 1.3;  // "very" carries +0.30
  CHECK(score_tokens({"very", "good"}, lexicon).polarity ==
        doctest::Approx(s / std::sqrt(s * s + 15.0)).epsilon(1e-12));
  const double sn = 0.5 * 1.3 * -0.75;
  CHECK(score_tokens({"not", "very", "good"}, lexicon).polarity ==
        doctest::Approx(sn / std::sqrt(sn * sn + 15.0)).epsilon(1e-12));
}

TEST_CASE("polarity matches the closed form on random token streams") {
  Lexicon lexicon = toy_lexicon();
  lexicon.valences["grim"] = -0.8;
  lexicon.valences["fine"] = 0.2;

  const std::vector<std::string> words = {
      "good", "bad",  "solid", "grim", "fine",  "not",  "never",
      "very", "some", "word",  "the",  "quite", "slightly"};
  Rng rng(31337);
  for (int round = 0; round < 400; ++round) {
    std::vector<std::string> tokens;
    const int n = rng.uniform_int(0, 14);
    for (int i = 0; i < n; ++i) {
      tokens.push_back(words[rng.uniform_below(words.size())]);
    }

    // Re-derive the raw sum independently of score_tokens.
    double expected_sum = 0.0;
    int expected_count = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const auto it = lexicon.valences.find(tokens[i]);
      if (it == lexicon.valences.end()) continue;
      double v = it->second;
      if (i > 0 && lexicon.intensifiers.contains(tokens[i - 1])) {
        v *= 1.0 + lexicon.intensifiers.at(tokens[i - 1]);
      }
      bool negated = false;
      for (std::size_t back = 1; back <= 3 && back <= i; ++back) {
        if (lexicon.negators.contains(tokens[i - back])) negated = true;
      }
      if (negated) v *= -0.75;
      expected_sum += v;
      ++expected_count;
    }
    const TokenScore score = score_tokens(tokens, lexicon);
    CHECK(score.valenced_tokens == expected_count);
    CHECK(std::abs(score.polarity -
                   expected_sum /
                       std::sqrt(expected_sum * expected_sum + 15.0)) <=
          1e-12);
    CHECK(std::abs(score.polarity) < 1.0);
    if (expected_sum != 0.0) {
      CHECK((score.polarity > 0) == (expected_sum > 0));
    }
  }
}

TEST_CASE("score_short_post on a plain tweet") {
  const Lexicon lexicon = toy_lexicon();
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  const CompanyProfile acme = acme_profile();
  const Document doc = make_doc("t1", "Acme", Network::twitter, "emission",
                                "Acme cut emission levels, good!");
  const SentimentResult result =
      score_short_post(doc, lexicon, acme, taxonomy);
  CHECK(result.relevant);
  CHECK(result.mode == ScoreMode::short_post);
  CHECK(result.polarity > 0.0);
  CHECK(result.valenced_token_count == 1);
}

TEST_CASE("link-carrying tweet reroutes to the long-article path") {
  const Lexicon lexicon = toy_lexicon();
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  const CompanyProfile acme = acme_profile();

  Document doc = make_doc("t2", "Acme", Network::twitter, "emission",
                          "Acme emission report, see link");
  doc.link_url = "https://news.example/a";
  doc.resolved_link_text =
      "Acme agreed the figures are solid.\n\nAcme was called bad by critics.";

  const SentimentResult result =
      score_short_post(doc, lexicon, acme, taxonomy);
  CHECK(result.mode == ScoreMode::long_article);

  const double first =
      score_tokens(tokenize("Acme agreed the figures are solid."), lexicon)
          .polarity;
  const double second =
      score_tokens(tokenize("Acme was called bad by critics."), lexicon)
          .polarity;
  CHECK(result.polarity == doctest::Approx((first + second) / 2.0));

  // Without the resolved body the tweet itself is scored.
  doc.resolved_link_text.reset();
  CHECK(score_short_post(doc, lexicon, acme, taxonomy).mode ==
        ScoreMode::short_post);
}

TEST_CASE("score_short_post enforces its contract") {
  const Lexicon lexicon = toy_lexicon();
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  const CompanyProfile acme = acme_profile();
  const Document irrelevant = make_doc("t3", "Acme", Network::twitter,
                                       "emission", "nothing to see");
  CHECK_THROWS_AS(score_short_post(irrelevant, lexicon, acme, taxonomy),
                  InputError);
  const Document news = make_doc("t4", "Acme", Network::news, "emission",
                                 "Acme emission good");
  CHECK_THROWS_AS(score_short_post(news, lexicon, acme, taxonomy),
                  InputError);
}

TEST_CASE("score_long_article averages mentioning paragraphs") {
  const Lexicon lexicon = toy_lexicon();
  const CompanyProfile acme = acme_profile();

  const std::string text =
      "Acme posted solid results.\n\n"
      "Unrelated paragraph about weather, good day.\n\n"
      "Critics called Acme bad.";
  const SentimentResult result = score_long_article(text, lexicon, acme);
  CHECK(result.relevant);
  CHECK(result.mode == ScoreMode::long_article);

  const double para1 =
      score_tokens(tokenize("Acme posted solid results."), lexicon).polarity;
  const double para3 =
      score_tokens(tokenize("Critics called Acme bad."), lexicon).polarity;
  CHECK(result.polarity == doctest::Approx((para1 + para3) / 2.0));

  // Single relevant paragraph: polarity passes through unchanged.
  const SentimentResult single =
      score_long_article("Acme posted solid results.", lexicon, acme);
  CHECK(single.polarity == para1);

  // No mention in any paragraph: irrelevant.
  const SentimentResult none = score_long_article(
      "A good day.\n\nNothing about the firm.", lexicon, acme);
  CHECK(!none.relevant);
}

TEST_CASE("score_document dispatch") {
  const Lexicon lexicon = toy_lexicon();
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  const CompanyProfile acme = acme_profile();

  Document selfie = make_doc("l1", "Acme", Network::linkedin, "diversity",
                             "Acme diversity wins, good!");
  selfie.author_affiliation = "Acme Corp";
  const SentimentResult excluded =
      score_document(selfie, lexicon, acme, taxonomy);
  CHECK(excluded.mode == ScoreMode::excluded_self_report);
  CHECK(!excluded.relevant);

  const Document news = make_doc("n1", "Acme", Network::news, "emission",
                                 "Acme emission data look good.");
  CHECK(score_document(news, lexicon, acme, taxonomy).mode ==
        ScoreMode::long_article);

  const Document wiki = make_doc("w1", "Acme", Network::wikipedia,
                                 "wikipedia", "Acme is a good business.");
  const SentimentResult wiki_result =
      score_document(wiki, lexicon, acme, taxonomy);
  CHECK(wiki_result.relevant);
  CHECK(wiki_result.mode == ScoreMode::long_article);

  const Document irrelevant = make_doc("t9", "Acme", Network::twitter,
                                       "emission", "moving on, good day");
  CHECK(!score_document(irrelevant, lexicon, acme, taxonomy).relevant);
}

namespace {

std::vector<Document> batch_fixture(int n) {
  Rng rng(606);
  const std::vector<std::string> texts = {
      "Acme emission cuts look good",
      "Acme fraud claims are bad",
      "nothing relevant here",
      "acme lowercase emission",
      "Acme climate plan is solid",
  };
  std::vector<Document> docs;
  for (int i = 0; i < n; ++i) {
    Document doc = make_doc("b" + std::to_string(i), "Acme",
                            i % 3 == 0 ? Network::linkedin : Network::twitter,
                            "emission",
                            texts[rng.uniform_below(texts.size())]);
    if (i % 7 == 0) doc.author_affiliation = "Acme";
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace

TEST_CASE("score_batch equals per-document scoring in order") {
  const Lexicon lexicon = toy_lexicon();
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  const CompanyProfile acme = acme_profile();
  ProfileMap profiles{{"Acme", acme}};

  const std::vector<Document> docs = batch_fixture(97);
  const auto batch = score_batch(docs, lexicon, profiles, taxonomy, 1);
  REQUIRE(batch.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(batch[i] == score_document(docs[i], lexicon, acme, taxonomy));
  }

  CHECK(score_batch({}, lexicon, profiles, taxonomy, 4).empty());

  for (const int workers : {2, 3, 8, 64}) {
    CHECK(score_batch(docs, lexicon, profiles, taxonomy, workers) == batch);
  }
}

TEST_CASE("score_batch aggregates unknown-company failures") {
  const Lexicon lexicon = toy_lexicon();
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  ProfileMap profiles{{"Acme", acme_profile()}};
  std::vector<Document> docs = batch_fixture(3);
  docs[1].company = "Ghost";
  try {
    score_batch(docs, lexicon, profiles, taxonomy, 2);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("b1") != std::string::npos);
    CHECK(std::string(e.what()).find("Ghost") != std::string::npos);
  }
}

TEST_CASE("scored results round-trip through JSONL") {
  const Lexicon lexicon = toy_lexicon();
  const KeywordTaxonomy taxonomy = KeywordTaxonomy::default_taxonomy();
  ProfileMap profiles{{"Acme", acme_profile()}};
  const std::vector<Document> docs = batch_fixture(20);
  const auto results = score_batch(docs, lexicon, profiles, taxonomy, 1);

  const std::string jsonl = scores_to_jsonl(docs, results);
  std::istringstream in(jsonl);
  const auto parsed = parse_scores(in, "scores");
  REQUIRE(parsed.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) {
    CHECK(parsed[i].id == docs[i].id);
    CHECK(parsed[i].result == results[i]);
  }
}

TEST_CASE("lexicon file parsing") {
  std::istringstream in(
      "# comment line\n"
      "good\t0.5\n"
      "BAD\t-0.25\n"
      "\n"
      "solid\t6e-1\n");
  const Lexicon lexicon = parse_lexicon(in, "lex");
  CHECK(lexicon.valences.at("good") == 0.5);
  CHECK(lexicon.valences.at("bad") == -0.25);  // lowercased on load
  CHECK(lexicon.valences.at("solid") == 0.6);
  CHECK(lexicon.negators.contains("not"));
  CHECK(lexicon.intensifiers.contains("very"));

  std::istringstream bad_line("good 0.5\n");
  CHECK_THROWS_AS(parse_lexicon(bad_line, "lex"), ParseError);
  std::istringstream bad_value("good\tzero\n");
  CHECK_THROWS_AS(parse_lexicon(bad_value, "lex"), ParseError);
  std::istringstream out_of_range("good\t1.5\n");
  CHECK_THROWS_AS(parse_lexicon(out_of_range, "lex"), ConfigError);
  std::istringstream negator_overlap("not\t0.5\n");
  CHECK_THROWS_AS(parse_lexicon(negator_overlap, "lex"), ConfigError);
}

TEST_CASE("seed lexicon file loads and avoids taxonomy keywords") {
  const Lexicon lexicon = load_lexicon(ESG_SEED_LEXICON_PATH);
  CHECK(lexicon.valences.size() > 100);
  for (const auto& keyword : KeywordTaxonomy::default_taxonomy().keywords()) {
    CHECK(!lexicon.valences.contains(keyword));
  }
}
