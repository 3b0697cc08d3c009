#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edurank/autodiff.hpp"
#include "edurank/corpus.hpp"
#include "edurank/encoder.hpp"
#include "edurank/oracle.hpp"
#include "edurank/rng.hpp"

namespace edurank {

// Single-head scaled dot-product cross-attention, no residual: EDU rows are
// queries, document rows are keys and values.
struct CrossAttn {
  Parameter wq, wk, wv, wo;  // each d x d

  CrossAttn() = default;
  CrossAttn(int d, Rng& rng);
  std::vector<Parameter*> params();
  int dim() const { return static_cast<int>(wq.value.rows()); }
};

// Two-class EDU classifier; logit row 0 is the salient class, salience is its
// softmax probability.
struct FilterHead {
  Parameter w;  // 2 x d
  Parameter b;  // 1 x 2

  FilterHead() = default;
  FilterHead(int d, Rng& rng);
  std::vector<Parameter*> params();
};

struct RetrieverModel {
  SpanPooler span_pooler;
  GatedPooler gated_pooler;
  CrossAttn cross_attn;
  FilterHead filter_head;
  int d = 0;
  int d_h = 0;

  RetrieverModel() = default;
  RetrieverModel(int d, int d_h, std::uint64_t seed);
  std::vector<Parameter*> parameters();
  void zero_grads();
};

struct LatentQuerySet {
  Eigen::MatrixXd queries;            // |Q| x d rows of refined EDU embeddings
  std::vector<EduId> source_edu_ids;  // distinct, one per query
  std::vector<int> flat_indices;      // rows into the set-wide EDU matrix
};

struct RelevanceScores {
  Eigen::MatrixXd per_query;  // n x k; each column a distribution over documents
  Eigen::VectorXd aggregate;  // n; row-mean of per_query
};

// ---- evaluation-mode operations ----

Eigen::MatrixXd refine_edus(const Eigen::MatrixXd& E, const Eigen::MatrixXd& D, CrossAttn& attn);
Eigen::VectorXd score_salience(const Eigen::MatrixXd& E_refined, FilterHead& head);
// Top-k by salience, ties broken by ascending (doc_index, edu_index); k is
// clipped to the EDU count. `edu_ids` maps flat row -> (doc, edu) and must be
// in ascending order.
LatentQuerySet select_queries(const Eigen::VectorXd& salience, const Eigen::MatrixXd& E_refined,
                              int k, const std::vector<EduId>& edu_ids);
RelevanceScores score_relevance(const Eigen::MatrixXd& D, const LatentQuerySet& queries);

// ---- pair construction for the BPR losses ----

// pair_samples_per_set = 0 enumerates every pair (full-sum mode); otherwise
// that many pairs are drawn uniformly with replacement per loss term.
struct PairSampler {
  int pair_samples_per_set = 64;
  Rng* rng = nullptr;  // required when sampling
};

struct PairSet {
  std::vector<std::pair<int, int>> query_side;   // (in query set, not in query set)
  std::vector<std::pair<int, int>> filter_side;  // (not in filter set, in filter set)
  std::vector<std::pair<int, int>> ranking;      // (higher-ranked doc, lower-ranked doc)
};

PairSet make_pairs(const OracleLabels& labels, const PairSampler& sampler);

// Scalar loss forms used by tests and the spec examples. Pair means are taken
// per term and the two filter terms are summed.
double filtering_loss(const Eigen::VectorXd& salience, const OracleLabels& labels,
                      const PairSampler& sampler);
double ranking_loss(const Eigen::VectorXd& relevance, const OracleLabels& labels,
                    const PairSampler& sampler);
double total_loss(double rank_l, double filter_l, double lambda);

// ---- training-mode graph ----

struct Forward {
  Tape tape;
  Var edu_matrix;   // m x d (pre-attention E)
  Var doc_matrix;   // n x d
  Var refined;      // m x d (E after cross-attention)
  Var salience;     // m x 1
  Var per_query;    // n x |Q|
  Var relevance;    // n x 1
  LatentQuerySet queries;
  std::vector<EduId> edu_ids;  // flat row -> (doc, edu)
};

// Full forward pass for one set. When `fixed_query_rows` is given those rows
// are used verbatim instead of the top-k selection (selection is piecewise
// constant, so finite-difference checks hold the rows fixed).
Forward build_forward(const SegmentedSet& set, const TokenEncoderBackend& backend, int c,
                      RetrieverModel& model, int k,
                      const std::vector<int>* fixed_query_rows = nullptr);

struct LossVars {
  Var rank;
  Var filter;
  Var total;
};

LossVars build_loss(Forward& fwd, double lambda, const PairSet& pairs);

// ---- optimizer ----

class Adam {
 public:
  Adam(std::vector<Parameter*> params, double lr, double beta1 = 0.9, double beta2 = 0.999,
       double eps = 1e-8);
  void step();
  void zero_grad();

  int steps() const { return t_; }
  double lr() const { return lr_; }
  const std::vector<Parameter*>& params() const { return params_; }
  // Serialized as part of checkpoints so training can resume on the same
  // trajectory.
  Eigen::MatrixXd& moment1(std::size_t i) { return m_[i]; }
  Eigen::MatrixXd& moment2(std::size_t i) { return v_[i]; }
  const Eigen::MatrixXd& moment1(std::size_t i) const { return m_[i]; }
  const Eigen::MatrixXd& moment2(std::size_t i) const { return v_[i]; }
  void set_steps(int t) { t_ = t; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Eigen::MatrixXd> m_, v_;
  double lr_, beta1_, beta2_, eps_;
  int t_ = 0;
};

// ---- EM training ----

struct TrainingConfig {
  double lambda = 1.0;
  int k = 10;
  int k_q = 10;
  double k_f_fraction = 0.2;  // bottom share per set when labels are built here
  double learning_rate = 3e-5;
  int batch_size = 16;
  int epochs = 1;
  int pair_samples_per_set = 64;
  std::uint64_t seed = 1;
  int chunk_size = 1024;

  void validate() const;
};

struct EpochStats {
  int epoch = 0;
  double rank_loss = 0.0;
  double filter_loss = 0.0;
  double total = 0.0;
  double precision_at_k = 0.0;
  double ndcg_at_3 = 0.0;
  double mrr_1st = 0.0;
  double wall_seconds = 0.0;
};

using LabeledSet = std::pair<const SegmentedSet*, const OracleLabels*>;

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = -1;        // by eval NDCG@3, ties -> earliest
  double best_ndcg_at_3 = -1.0;
};

// Alternates the query-selection E-step (inside each forward pass) with
// gradient M-steps on the combined loss. One optimizer step per batch; batch
// loss is the mean of per-set losses. Deterministic for a fixed cfg.seed.
// `eval_split` drives the per-epoch metrics and best-epoch selection; when
// null the training sets are reused. `on_epoch` fires after each epoch with
// is_best = true when that epoch set a new best metric. Epochs run from
// start_epoch + 1 through cfg.epochs, so a resumed run continues the exact
// seed streams of an uninterrupted one.
TrainResult em_train(const std::vector<LabeledSet>& train, RetrieverModel& model, Adam& opt,
                     const TrainingConfig& cfg, const TokenEncoderBackend& backend,
                     const std::vector<LabeledSet>* eval_split = nullptr,
                     const std::function<void(const EpochStats&, bool is_best)>& on_epoch = {},
                     int start_epoch = 0);

struct InferenceResult {
  Eigen::VectorXd edu_salience;  // flat, (doc, edu) ascending
  Eigen::VectorXd doc_relevance;
  LatentQuerySet queries;
  std::vector<EduId> edu_ids;
};

InferenceResult infer_scores(RetrieverModel& model, const SegmentedSet& set,
                             const TokenEncoderBackend& backend, int c, int k);

// Per-epoch retrieval metrics over a labeled split: query-selection
// precision at each set's k_q, ranking NDCG@3, and MRR of the top oracle doc.
EpochStats evaluate_split(RetrieverModel& model, const std::vector<LabeledSet>& split,
                          const TokenEncoderBackend& backend, int c, int k);

// ---- checkpoints ----

struct CheckpointMeta {
  int d = 0;
  int d_h = 0;
  int c = 0;
  std::string backend_id;
};

void save_checkpoint(const std::filesystem::path& path, RetrieverModel& model,
                     const CheckpointMeta& meta, const Adam* opt = nullptr, int epoch = 0);
// Restores parameters in place; throws CheckpointMismatch when the stored
// fingerprint or any shape disagrees with `expected` / the model. The saved
// epoch number lands in `epoch_out` when given.
void load_checkpoint(const std::filesystem::path& path, RetrieverModel& model,
                     const CheckpointMeta& expected, Adam* opt = nullptr,
                     int* epoch_out = nullptr);

}  // namespace edurank
