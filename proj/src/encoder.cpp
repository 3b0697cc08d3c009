#include "edurank/encoder.hpp"

#include <cmath>
#include <string>

#include "edurank/errors.hpp"
#include "edurank/hashing.hpp"

namespace edurank {

HashTokenEncoder::HashTokenEncoder(int dim, double row_norm)
    : dim_(dim), row_norm_(row_norm) {
  if (dim < 1) throw ConfigError("token encoder dimension must be >= 1");
  if (row_norm_ <= 0.0) row_norm_ = std::sqrt(static_cast<double>(dim));
}

Eigen::MatrixXd HashTokenEncoder::encode(const std::vector<std::string>& tokens) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(tokens.size()), dim_);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    BucketSign bs = bucket_sign(to_lower_ascii(tokens[i]), dim_);
    out(static_cast<Eigen::Index>(i), bs.bucket) = bs.sign * row_norm_;
  }
  return out;
}

std::string HashTokenEncoder::id() const { return "hash-token-" + std::to_string(dim_); }

std::unique_ptr<TokenEncoderBackend> make_token_encoder(const std::string& id) {
  const std::string prefix = "hash-token-";
  if (id.rfind(prefix, 0) == 0) {
    int d = 0;
    try {
      d = std::stoi(id.substr(prefix.size()));
    } catch (const std::exception&) {
      throw ConfigError("bad token encoder id '" + id + "'");
    }
    return std::make_unique<HashTokenEncoder>(d);
  }
  throw ConfigError("unknown token encoder id '" + id + "'");
}

TokenEmbeddings encode_tokens(const Document& doc, const TokenEncoderBackend& backend, int c) {
  std::vector<Chunk> chunks = chunk_document(doc, 0, c);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(doc.tokens.size()), backend.dim());
  Eigen::Index at = 0;
  for (const Chunk& ch : chunks) {
    std::vector<std::string> piece(doc.tokens.begin() + ch.start, doc.tokens.begin() + ch.end);
    Eigen::MatrixXd rows = backend.encode(piece);
    if (rows.rows() != static_cast<Eigen::Index>(piece.size()) || rows.cols() != backend.dim())
      throw ContractViolation("token encoder returned " + std::to_string(rows.rows()) + "x" +
                              std::to_string(rows.cols()) + " for a chunk of " +
                              std::to_string(piece.size()) + " tokens");
    out.middleRows(at, rows.rows()) = rows;
    at += rows.rows();
  }
  return out;
}

Parameter make_param(const std::string& name, int rows, int cols, double scale, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int col = 0; col < cols; ++col) m(r, col) = rng.uniform(-scale, scale);
  return Parameter(name, std::move(m));
}

// Weights start uniform at scale 1/sqrt(d); biases start at zero so the
// (twice-contracted) signal is not swamped by a shared additive offset.
SpanPooler::SpanPooler(int d, int d_h, Rng& rng) {
  if (d < 1 || d_h < 1) throw ConfigError("span pooler dimensions must be >= 1");
  double s = 1.0 / std::sqrt(static_cast<double>(d));
  w1 = make_param("span.w1", d_h, d, s, rng);
  b1 = make_param("span.b1", 1, d_h, 0.0, rng);
  w2 = make_param("span.w2", 1, d_h, s, rng);
  b2 = make_param("span.b2", 1, 1, 0.0, rng);
}

std::vector<Parameter*> SpanPooler::params() { return {&w1, &b1, &w2, &b2}; }

GatedPooler::GatedPooler(int d, Rng& rng) {
  if (d < 1) throw ConfigError("gated pooler dimension must be >= 1");
  double s = 1.0 / std::sqrt(static_cast<double>(d));
  g_w1 = make_param("gated.g_w1", d, d, s, rng);
  g_b1 = make_param("gated.g_b1", 1, d, 0.0, rng);
  g_w2 = make_param("gated.g_w2", d, d, s, rng);
  g_b2 = make_param("gated.g_b2", 1, d, 0.0, rng);
  gate = make_param("gated.gate", d, 1, s, rng);
}

std::vector<Parameter*> GatedPooler::params() { return {&g_w1, &g_b1, &g_w2, &g_b2, &gate}; }

Var pool_edu_graph(Tape& tape, Var span_tokens, SpanPooler& pooler) {
  if (tape.value(span_tokens).rows() < 1)
    throw ContractViolation("span pooling requires at least one token");
  Var w1 = tape.param(pooler.w1);
  Var b1 = tape.param(pooler.b1);
  Var w2 = tape.param(pooler.w2);
  Var b2 = tape.param(pooler.b2);
  Var hidden = tape.relu(
      tape.add_row_broadcast(tape.matmul(span_tokens, tape.transpose(w1)), b1));
  Var alpha = tape.add_row_broadcast(tape.matmul(hidden, tape.transpose(w2)), b2);
  Var attn = tape.softmax_cols(alpha);  // L x 1, sums to 1
  return tape.matmul(tape.transpose(attn), span_tokens);
}

Var pool_document_graph(Tape& tape, Var edus, GatedPooler& pooler) {
  if (tape.value(edus).rows() < 1)
    throw ContractViolation("document pooling requires at least one EDU");
  Var w1 = tape.param(pooler.g_w1);
  Var b1 = tape.param(pooler.g_b1);
  Var w2 = tape.param(pooler.g_w2);
  Var b2 = tape.param(pooler.g_b2);
  Var gate = tape.param(pooler.gate);
  Var hidden = tape.relu(tape.add_row_broadcast(tape.matmul(edus, tape.transpose(w1)), b1));
  Var transformed = tape.add_row_broadcast(tape.matmul(hidden, tape.transpose(w2)), b2);
  Var beta = tape.softmax_cols(tape.matmul(transformed, gate));  // m x 1
  return tape.matmul(tape.transpose(beta), transformed);
}

Eigen::VectorXd pool_edu(const Eigen::MatrixXd& span_tokens, SpanPooler& pooler) {
  Tape tape;
  Var out = pool_edu_graph(tape, tape.constant(span_tokens), pooler);
  return tape.value(out).row(0).transpose();
}

Eigen::VectorXd pool_document(const std::vector<Eigen::VectorXd>& edus, GatedPooler& pooler) {
  if (edus.empty()) throw ContractViolation("document pooling requires at least one EDU");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(edus.size()), edus[0].size());
  for (std::size_t i = 0; i < edus.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = edus[i];
  Tape tape;
  Var out = pool_document_graph(tape, tape.constant(std::move(m)), pooler);
  return tape.value(out).row(0).transpose();
}

SetEmbeddings encode_set(const SegmentedSet& set, const TokenEncoderBackend& backend, int c,
                         SpanPooler& span_pooler, GatedPooler& gated_pooler) {
  const int d = backend.dim();
  SetEmbeddings out;
  out.edu_matrix.resize(set.total_edus(), d);
  out.doc_matrix.resize(static_cast<Eigen::Index>(set.base.documents.size()), d);

  Tape tape;
  Eigen::Index edu_row = 0;
  for (std::size_t di = 0; di < set.base.documents.size(); ++di) {
    const auto& spans = set.spans[di];
    if (spans.empty())
      throw InferenceError("document " + set.base.documents[di].id + " has no EDUs");
    TokenEmbeddings toks = encode_tokens(set.base.documents[di], backend, c);
    Var tok_var = tape.constant(std::move(toks));
    std::vector<Var> edu_rows;
    edu_rows.reserve(spans.size());
    for (const EduSpan& s : spans)
      edu_rows.push_back(
          pool_edu_graph(tape, tape.slice_rows(tok_var, s.start, s.end - s.start), span_pooler));
    Var edus = tape.concat_rows(edu_rows);
    Var doc = pool_document_graph(tape, edus, gated_pooler);
    out.edu_matrix.middleRows(edu_row, tape.value(edus).rows()) = tape.value(edus);
    edu_row += tape.value(edus).rows();
    out.doc_matrix.row(static_cast<Eigen::Index>(di)) = tape.value(doc).row(0);
  }
  return out;
}

}  // namespace edurank
