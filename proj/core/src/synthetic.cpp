#include "esg/synthetic.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iterator>

#include "esg/rng.hpp"

namespace esg {

namespace {

struct Vocab {
  const char* token;
  double valence;
};

constexpr Vocab kPositive[] = {
    {"admirable", 0.7},  {"commendable", 0.8}, {"favorable", 0.5},
    {"promising", 0.45}, {"laudable", 0.65},   {"exemplary", 0.75},
};
constexpr Vocab kNegative[] = {
    {"dismal", -0.6},    {"shameful", -0.7}, {"egregious", -0.8},
    {"troubling", -0.5}, {"alarming", -0.55}, {"appalling", -0.75},
};
constexpr const char* kFiller[] = {
    "efforts", "stance",  "record",   "approach", "initiatives",
    "policy",  "conduct", "practices", "posture",  "performance",
};

std::string company_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "Company%03d", index);
  return buf;
}

const Vocab& draw_valenced(Rng& rng, double q) {
  const double tilt = (1.0 + q) / 2.0;
  if (rng.uniform01() < tilt) {
    return kPositive[rng.uniform_below(std::size(kPositive))];
  }
  return kNegative[rng.uniform_below(std::size(kNegative))];
}

std::string short_text(Rng& rng, const std::string& company,
                       const std::string& keyword, double q) {
  const char* filler = kFiller[rng.uniform_below(std::size(kFiller))];
  const Vocab& first = draw_valenced(rng, q);
  const Vocab& second = draw_valenced(rng, q);
  std::string text = company + " " + keyword + " " + filler + " look " +
                     first.token + " and " + second.token;
  if (rng.uniform01() < 0.5) {
    const Vocab& third = draw_valenced(rng, q);
    text += ", frankly ";
    text += third.token;
  }
  text += " this quarter.";
  return text;
}

std::string article_text(Rng& rng, const std::string& company,
                         const std::string& keyword, double q) {
  const char* filler_a = kFiller[rng.uniform_below(std::size(kFiller))];
  const char* filler_b = kFiller[rng.uniform_below(std::size(kFiller))];
  const Vocab& first = draw_valenced(rng, q);
  const Vocab& second = draw_valenced(rng, q);
  const Vocab& third = draw_valenced(rng, q);
  std::string text = "Coverage of " + company + " " + keyword + " " +
                     filler_a + " calls them " + first.token + " and " +
                     second.token + ".";
  text += "\n\n";
  text += "Observers add that " + company + " " + filler_b +
          " remain " + std::string(third.token) + " overall.";
  return text;
}

std::string wiki_text(Rng& rng, const std::string& company, double q) {
  const Vocab& first = draw_valenced(rng, q);
  const Vocab& second = draw_valenced(rng, q);
  std::string text = company +
                     " is a listed corporation with operations in several "
                     "regions.";
  text += "\n\n";
  text += "Commentary describes " + company + " as " + first.token +
          " in its public record and " + second.token +
          " in recent reviews.";
  return text;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  SyntheticData data;
  Rng rng(spec.seed);

  data.config.taxonomy = KeywordTaxonomy::default_taxonomy();
  data.config.min_docs = spec.min_docs;
  data.config.seed = spec.seed;
  const std::vector<std::string> keywords = data.config.taxonomy.keywords();

  // Vocabulary doubles as the lexicon the chain scores with.
  data.lexicon_tsv =
      "# Synthetic fixture vocabulary: token<TAB>valence.\n";
  char line[64];
  for (const Vocab& v : kPositive) {
    data.lexicon.valences[v.token] = v.valence;
    std::snprintf(line, sizeof line, "%s\t%g\n", v.token, v.valence);
    data.lexicon_tsv += line;
  }
  for (const Vocab& v : kNegative) {
    data.lexicon.valences[v.token] = v.valence;
    std::snprintf(line, sizeof line, "%s\t%g\n", v.token, v.valence);
    data.lexicon_tsv += line;
  }
  for (const auto& negator : default_negators()) {
    data.lexicon.negators.insert(negator);
  }
  for (const auto& [token, delta] : default_intensifiers()) {
    data.lexicon.intensifiers.emplace(token, delta);
  }

  long doc_serial = 0;
  const auto next_id = [&doc_serial] {
    char buf[24];
    std::snprintf(buf, sizeof buf, "doc-%06ld", doc_serial++);
    return std::string(buf);
  };
  constexpr Network kCycle[] = {Network::twitter, Network::linkedin,
                                Network::news};

  for (int c = 0; c < spec.n_companies; ++c) {
    const std::string name = company_name(c);
    const double q = rng.uniform(-0.9, 0.9);
    data.planted.push_back(q);

    CompanyProfile profile;
    profile.canonical_name = name;
    profile.aliases = {name};
    profile.sector = "synthetic";
    data.config.companies.push_back(profile);

    for (std::size_t k = 0; k < keywords.size(); ++k) {
      const std::string& keyword = keywords[k];
      for (int j = 0; j < spec.docs_per_keyword; ++j) {
        const Network network = kCycle[j % 3];
        Document doc;
        doc.id = next_id();
        doc.company = name;
        doc.network = network;
        doc.keyword = keyword;
        doc.timestamp = "2021-06-01T00:00:00Z";
        doc.text = network == Network::news
                       ? article_text(rng, name, keyword, q)
                       : short_text(rng, name, keyword, q);
        data.corpus.push_back(std::move(doc));
      }
    }

    for (int j = 0; j < spec.wikipedia_docs; ++j) {
      Document doc;
      doc.id = next_id();
      doc.company = name;
      doc.network = Network::wikipedia;
      doc.keyword = std::string(kWikipediaCategory);
      doc.text = wiki_text(rng, name, q);
      data.corpus.push_back(std::move(doc));
    }

    // A LinkedIn post by the company's own staff: the self-reporting
    // filter must drop it no matter how glowing it reads.
    {
      Document doc;
      doc.id = next_id();
      doc.company = name;
      doc.network = Network::linkedin;
      doc.keyword = keywords[static_cast<std::size_t>(c) % keywords.size()];
      doc.author_name = "Staff Member";
      doc.author_affiliation = name;
      doc.text = name + " " + doc.keyword +
                 " exemplary commendable admirable achievements.";
      data.corpus.push_back(std::move(doc));
    }

    // A tweet whose link body carries the substance.
    {
      const std::string& keyword =
          keywords[static_cast<std::size_t>(c + 1) % keywords.size()];
      Document doc;
      doc.id = next_id();
      doc.company = name;
      doc.network = Network::twitter;
      doc.keyword = keyword;
      doc.link_url = "https://news.example/" + std::to_string(c);
      doc.resolved_link_text = article_text(rng, name, keyword, q);
      doc.text = name + " " + keyword + " coverage, see link.";
      data.corpus.push_back(std::move(doc));
    }

    // Noise the relevance filter must reject: a lowercase mention and a
    // keyword-free post.
    {
      Document doc;
      doc.id = next_id();
      doc.company = name;
      doc.network = Network::twitter;
      doc.keyword = keywords[0];
      std::string lower = name;
      for (char& ch : lower) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      }
      doc.text = lower + " " + keywords[0] + " chatter admirable.";
      data.corpus.push_back(std::move(doc));
    }
    {
      Document doc;
      doc.id = next_id();
      doc.company = name;
      doc.network = Network::twitter;
      doc.keyword = keywords[1];
      doc.text = name + " quarterly numbers released today.";
      data.corpus.push_back(std::move(doc));
    }

    RatingRecord rating;
    rating.company = name;
    rating.reference_score = std::clamp(
        50.0 + 45.0 * q + rng.uniform(-spec.noise_points, spec.noise_points),
        0.0, 100.0);
    data.ratings.push_back(std::move(rating));
  }
  return data;
}

}  // namespace esg
