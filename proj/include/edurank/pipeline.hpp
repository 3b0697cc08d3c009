#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "edurank/retriever.hpp"

namespace edurank {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;       // unreadable inputs / unknown backends
inline constexpr int kExitDivergence = 3;  // non-finite training loss
inline constexpr int kExitCheckpoint = 4;  // checkpoint/config mismatch

// Declarative run description. A JSON config file populates it; CLI flags
// override individual fields; the effective config is echoed into out_dir.
struct PipelineConfig {
  std::string train_corpus;
  std::string val_corpus;   // optional; empty = no validation split
  std::string test_corpus;  // optional; retrieve/evaluate fall back to train
  std::string segmenter_id = "fallback-v1";
  std::string embedder_id = "hash-unigram-256";
  std::string backend_id = "hash-token-64";
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int budget = 4096;
  std::string variant = "full";
  std::string separator = "<doc-sep>";
  double few_shot = 1.0;  // fraction of training sets used
  std::string aggregation = "mean";
  std::string checkpoint;   // path for retrieve/evaluate; empty = out_dir/best.ckpt
  std::string resume_from;  // checkpoint to continue training from
  TrainingConfig training;

  static PipelineConfig from_file(const std::filesystem::path& path);
  void validate() const;
  std::string to_json_string() const;
};

// Each command returns one of the exit codes above and reports failures on
// stderr. All inputs are validated before any artifact is written.

// Segments every configured split and writes segmented.<split>.jsonl plus
// oracle labels.<split>.jsonl under out_dir.
int cmd_prepare(const PipelineConfig& cfg);
// EM training; writes train-log.jsonl, best.ckpt (highest validation NDCG@3)
// and last.ckpt.
int cmd_train(const PipelineConfig& cfg);
// Scores the evaluation split with the checkpoint and writes truncation
// plans.jsonl + assembled inputs.jsonl for the configured variant.
int cmd_retrieve(const PipelineConfig& cfg);
// Metric reports for the model, BM25+RAKE, BM25+Gold, and the truncation
// ablation variants, one JSON file per method.
int cmd_evaluate(const PipelineConfig& cfg);

}  // namespace edurank
