// Writes the planted-signal benchmark corpora as ordinary corpus JSONL files
// so the main binary can run on them end to end.
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "edurank/corpus.hpp"
#include "edurank/synth.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate the synthetic retrieval benchmark"};
  std::string out_dir = "synth";
  edurank::SynthConfig cfg;
  app.add_option("--out", out_dir, "directory for train.jsonl / test.jsonl");
  app.add_option("--train-sets", cfg.train_sets, "number of training sets");
  app.add_option("--test-sets", cfg.test_sets, "number of held-out sets");
  app.add_option("--seed", cfg.seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    edurank::SynthCorpus corpus = edurank::generate_synthetic(cfg);
    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    edurank::write_corpus(dir / "train.jsonl", corpus.train);
    edurank::write_corpus(dir / "test.jsonl", corpus.test);
    std::cout << corpus.train.size() << " train / " << corpus.test.size() << " test sets -> "
              << out_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
