#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "edurank/autodiff.hpp"
#include "edurank/corpus.hpp"
#include "edurank/rng.hpp"

namespace edurank {

// Maps a token sequence to one d-dimensional row per token. Implementations
// must be deterministic unless stated otherwise; the trainer treats the
// backend as frozen.
class TokenEncoderBackend {
 public:
  virtual ~TokenEncoderBackend() = default;
  virtual Eigen::MatrixXd encode(const std::vector<std::string>& tokens) const = 0;
  virtual int dim() const = 0;
  virtual std::string id() const = 0;
};

// Signed feature-hash rows: each token activates one bucket with sign +-1.
// Stands in for a pretrained contextual encoder in tests and the synthetic
// benchmark.
// Each token becomes a signed one-hot row of norm `row_norm` (default √dim,
// the magnitude of a unit-variance dense embedding). The norm matters: the
// attention and relevance logits downstream scale with its square, and
// unit-norm rows leave them too flat to train.
class HashTokenEncoder : public TokenEncoderBackend {
 public:
  explicit HashTokenEncoder(int dim = 64, double row_norm = 0.0);
  Eigen::MatrixXd encode(const std::vector<std::string>& tokens) const override;
  int dim() const override { return dim_; }
  std::string id() const override;

 private:
  int dim_;
  double row_norm_;
};

std::unique_ptr<TokenEncoderBackend> make_token_encoder(const std::string& id);

// Per-document token embedding matrix: |tokens| x d.
using TokenEmbeddings = Eigen::MatrixXd;

// Encodes the document chunk by chunk (chunk size c) and concatenates the
// per-chunk outputs in order. Throws ContractViolation if the backend returns
// the wrong number of rows for any chunk.
TokenEmbeddings encode_tokens(const Document& doc, const TokenEncoderBackend& backend, int c);

Parameter make_param(const std::string& name, int rows, int cols, double scale, Rng& rng);

// Span attention: alpha_k = W2 * relu(W1 * t_k + b1) + b2 over the span's
// tokens, a = softmax(alpha), pooled = sum_k a_k t_k.
struct SpanPooler {
  Parameter w1;  // d_h x d
  Parameter b1;  // 1 x d_h
  Parameter w2;  // 1 x d_h
  Parameter b2;  // 1 x 1

  SpanPooler() = default;
  SpanPooler(int d, int d_h, Rng& rng);
  std::vector<Parameter*> params();
  int hidden_dim() const { return static_cast<int>(w1.value.rows()); }
  int input_dim() const { return static_cast<int>(w1.value.cols()); }
};

// Gated pooling over a document's EDU vectors: d_i = sum_j beta_j g(e_j),
// beta = softmax_j(gate . g(e_j)), g a one-hidden-layer ReLU network d -> d.
struct GatedPooler {
  Parameter g_w1;  // d x d
  Parameter g_b1;  // 1 x d
  Parameter g_w2;  // d x d
  Parameter g_b2;  // 1 x d
  Parameter gate;  // d x 1

  GatedPooler() = default;
  GatedPooler(int d, Rng& rng);
  std::vector<Parameter*> params();
  int dim() const { return static_cast<int>(gate.value.rows()); }
};

// Graph-building forms (for training). `span_tokens` is L x d, L >= 1;
// `edus` is m x d, m >= 1. Both return a 1 x d row.
Var pool_edu_graph(Tape& tape, Var span_tokens, SpanPooler& pooler);
Var pool_document_graph(Tape& tape, Var edus, GatedPooler& pooler);

// Evaluation-only forms.
Eigen::VectorXd pool_edu(const Eigen::MatrixXd& span_tokens, SpanPooler& pooler);
Eigen::VectorXd pool_document(const std::vector<Eigen::VectorXd>& edus, GatedPooler& pooler);

struct SetEmbeddings {
  Eigen::MatrixXd edu_matrix;  // (total EDUs) x d, docs in order, EDUs in order
  Eigen::MatrixXd doc_matrix;  // n x d
};

SetEmbeddings encode_set(const SegmentedSet& set, const TokenEncoderBackend& backend, int c,
                         SpanPooler& span_pooler, GatedPooler& gated_pooler);

}  // namespace edurank
