// esg-synth: writes the planted-signal synthetic fixture set used for
// end-to-end runs: fixture pool, pipeline config, reference ratings and
// the vocabulary lexicon.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "esg/config.hpp"
#include "esg/corpus.hpp"
#include "esg/eval.hpp"
#include "esg/io.hpp"
#include "esg/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic planted-signal fixture set"};
  std::string out_dir;
  esg::SyntheticSpec spec;
  app.add_option("--out", out_dir, "Output directory")->required();
  app.add_option("--companies", spec.n_companies, "Companies to plant");
  app.add_option("--docs-per-keyword", spec.docs_per_keyword,
                 "Documents per keyword subcategory");
  app.add_option("--seed", spec.seed, "Generator seed");
  app.add_option("--noise", spec.noise_points,
                 "Bounded rating noise, score points");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 1;
  }

  try {
    const std::filesystem::path dir(out_dir);
    esg::SyntheticData data = esg::generate_synthetic(spec);
    data.config.lexicon_path = "lexicon.tsv";
    esg::io::atomic_write(dir / "lexicon.tsv", data.lexicon_tsv);
    esg::save_config(data.config, dir / "config.json");
    esg::save_corpus(data.corpus, dir / "pool.jsonl");
    esg::save_ratings(data.ratings, dir / "ratings.csv");
    std::cerr << "wrote " << data.corpus.size() << " documents for "
              << spec.n_companies << " companies under " << dir.string()
              << "\n";
    return 0;
  } catch (const esg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
