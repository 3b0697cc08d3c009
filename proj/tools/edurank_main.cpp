#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "edurank/pipeline.hpp"

namespace {

struct Overrides {
  std::string config;
  std::uint64_t seed = 0;
  int budget = 0;
  std::string variant;
  double few_shot = 0.0;
  std::string out;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config, "JSON run description")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", ov.seed, "master seed for every stochastic component");
  cmd->add_option("--budget", ov.budget, "token budget for assembled inputs");
  cmd->add_option("--variant", ov.variant, "plan variant: full|no_rank|no_filter|no_both|even");
  cmd->add_option("--few-shot", ov.few_shot, "fraction of training sets to use, in (0, 1]");
  cmd->add_option("--out", ov.out, "output directory for run artifacts");
}

edurank::PipelineConfig resolve(const CLI::App* cmd, const Overrides& ov) {
  edurank::PipelineConfig cfg;
  if (!ov.config.empty()) cfg = edurank::PipelineConfig::from_file(ov.config);
  if (cmd->count("--seed")) cfg.seed = ov.seed;
  if (cmd->count("--budget")) cfg.budget = ov.budget;
  if (cmd->count("--variant")) cfg.variant = ov.variant;
  if (cmd->count("--few-shot")) cfg.few_shot = ov.few_shot;
  if (cmd->count("--out")) cfg.out_dir = ov.out;
  cfg.training.seed = cfg.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EDU-level retrieval, ranking and truncation for multi-document input assembly"};
  app.require_subcommand(1);

  Overrides ov;
  CLI::App* prepare = app.add_subcommand("prepare", "segment corpora and build oracle labels");
  CLI::App* train = app.add_subcommand("train", "EM-train the retriever");
  CLI::App* retrieve = app.add_subcommand("retrieve", "score a split and emit truncation plans");
  CLI::App* evaluate = app.add_subcommand("evaluate", "write metric reports for every method");
  for (CLI::App* cmd : {prepare, train, retrieve, evaluate}) add_common_flags(cmd, ov);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : edurank::kExitInput;
  }

  try {
    if (prepare->parsed()) return edurank::cmd_prepare(resolve(prepare, ov));
    if (train->parsed()) return edurank::cmd_train(resolve(train, ov));
    if (retrieve->parsed()) return edurank::cmd_retrieve(resolve(retrieve, ov));
    if (evaluate->parsed()) return edurank::cmd_evaluate(resolve(evaluate, ov));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return edurank::kExitInput;
  }
  return edurank::kExitInput;
}
