#include "edurank/retriever.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "edurank/errors.hpp"
#include "edurank/metrics.hpp"

namespace edurank {

using nlohmann::json;

CrossAttn::CrossAttn(int d, Rng& rng) {
  if (d < 1) throw ConfigError("cross-attention dimension must be >= 1");
  double s = 1.0 / std::sqrt(static_cast<double>(d));
  wq = make_param("attn.wq", d, d, s, rng);
  wk = make_param("attn.wk", d, d, s, rng);
  wv = make_param("attn.wv", d, d, s, rng);
  wo = make_param("attn.wo", d, d, s, rng);
}

std::vector<Parameter*> CrossAttn::params() { return {&wq, &wk, &wv, &wo}; }

FilterHead::FilterHead(int d, Rng& rng) {
  if (d < 1) throw ConfigError("filter head dimension must be >= 1");
  double s = 1.0 / std::sqrt(static_cast<double>(d));
  w = make_param("filter.w", 2, d, s, rng);
  b = make_param("filter.b", 1, 2, 0.0, rng);
}

std::vector<Parameter*> FilterHead::params() { return {&w, &b}; }

RetrieverModel::RetrieverModel(int d_, int d_h_, std::uint64_t seed) : d(d_), d_h(d_h_) {
  Rng rng(derive_seed(seed, "model-init", 0, 0));
  span_pooler = SpanPooler(d, d_h, rng);
  gated_pooler = GatedPooler(d, rng);
  cross_attn = CrossAttn(d, rng);
  filter_head = FilterHead(d, rng);
}

std::vector<Parameter*> RetrieverModel::parameters() {
  std::vector<Parameter*> out;
  for (auto* p : span_pooler.params()) out.push_back(p);
  for (auto* p : gated_pooler.params()) out.push_back(p);
  for (auto* p : cross_attn.params()) out.push_back(p);
  for (auto* p : filter_head.params()) out.push_back(p);
  return out;
}

void RetrieverModel::zero_grads() {
  for (Parameter* p : parameters()) p->zero_grad();
}

namespace {

Var refine_graph(Tape& t, Var E, Var D, CrossAttn& attn) {
  Var q = t.matmul(E, t.transpose(t.param(attn.wq)));
  Var k = t.matmul(D, t.transpose(t.param(attn.wk)));
  Var v = t.matmul(D, t.transpose(t.param(attn.wv)));
  double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(attn.dim()));
  Var weights = t.softmax_rows(t.scale(t.matmul(q, t.transpose(k)), inv_sqrt_d));
  return t.matmul(t.matmul(weights, v), t.transpose(t.param(attn.wo)));
}

Var salience_graph(Tape& t, Var refined, FilterHead& head) {
  Var logits = t.add_row_broadcast(t.matmul(refined, t.transpose(t.param(head.w))), t.param(head.b));
  return t.col(t.softmax_rows(logits), 0);  // row 0 of W is the salient class
}

Eigen::MatrixXd as_column(const Eigen::VectorXd& v) {
  Eigen::MatrixXd m(v.size(), 1);
  m.col(0) = v;
  return m;
}

// Flat row offsets per document implied by the label salience shape.
std::vector<int> doc_offsets(const OracleLabels& labels) {
  std::vector<int> offs;
  int at = 0;
  for (const auto& doc : labels.edu_salience) {
    offs.push_back(at);
    at += static_cast<int>(doc.size());
  }
  return offs;
}

int flat_of(const std::vector<int>& offs, EduId id) {
  return offs[static_cast<std::size_t>(id.doc)] + id.edu;
}

}  // namespace

Eigen::MatrixXd refine_edus(const Eigen::MatrixXd& E, const Eigen::MatrixXd& D, CrossAttn& attn) {
  if (E.cols() != attn.dim() || D.cols() != attn.dim())
    throw ContractViolation("cross-attention dimension mismatch");
  if (D.rows() < 1) throw ContractViolation("cross-attention requires at least one document");
  Tape t;
  return t.value(refine_graph(t, t.constant(E), t.constant(D), attn));
}

Eigen::VectorXd score_salience(const Eigen::MatrixXd& E_refined, FilterHead& head) {
  if (E_refined.cols() != head.w.value.cols())
    throw ContractViolation("filter head dimension mismatch");
  Tape t;
  return t.value(salience_graph(t, t.constant(E_refined), head)).col(0);
}

LatentQuerySet select_queries(const Eigen::VectorXd& salience, const Eigen::MatrixXd& E_refined,
                              int k, const std::vector<EduId>& edu_ids) {
  const int m = static_cast<int>(salience.size());
  if (k < 1) throw ConfigError("query count k must be >= 1");
  if (E_refined.rows() != m || static_cast<int>(edu_ids.size()) != m)
    throw ContractViolation("salience / embedding / id length mismatch");
  k = std::min(k, m);
  // edu_ids are ascending, so stable argsort ties resolve to the earliest
  // (doc, edu) pair.
  std::vector<int> order = argsort_desc(salience);
  LatentQuerySet out;
  out.queries.resize(k, E_refined.cols());
  for (int i = 0; i < k; ++i) {
    int row = order[static_cast<std::size_t>(i)];
    out.flat_indices.push_back(row);
    out.source_edu_ids.push_back(edu_ids[static_cast<std::size_t>(row)]);
    out.queries.row(i) = E_refined.row(row);
  }
  return out;
}

RelevanceScores score_relevance(const Eigen::MatrixXd& D, const LatentQuerySet& queries) {
  if (D.rows() < 1 || queries.queries.rows() < 1)
    throw ContractViolation("relevance scoring needs at least one document and one query");
  if (D.cols() != queries.queries.cols())
    throw ContractViolation("document / query dimension mismatch");
  Tape t;
  Var per_query = t.softmax_cols(t.matmul(t.constant(D), t.transpose(t.constant(queries.queries))));
  Var agg = t.mean_cols(per_query);
  RelevanceScores out;
  out.per_query = t.value(per_query);
  out.aggregate = t.value(agg).col(0);
  return out;
}

PairSet make_pairs(const OracleLabels& labels, const PairSampler& sampler) {
  const int total = labels.total_edus();
  std::vector<int> offs = doc_offsets(labels);
  std::unordered_set<int> in_query, in_filter;
  for (EduId id : labels.query_set) in_query.insert(flat_of(offs, id));
  for (EduId id : labels.filter_set) in_filter.insert(flat_of(offs, id));

  std::vector<int> q_pos, q_neg, f_pos, f_neg;
  for (int i = 0; i < total; ++i) {
    (in_query.count(i) ? q_pos : q_neg).push_back(i);
    (in_filter.count(i) ? f_neg : f_pos).push_back(i);
  }

  std::vector<std::pair<int, int>> rank_all;
  for (std::size_t i = 0; i < labels.doc_ranking.size(); ++i)
    for (std::size_t j = i + 1; j < labels.doc_ranking.size(); ++j)
      rank_all.emplace_back(labels.doc_ranking[i], labels.doc_ranking[j]);

  PairSet out;
  auto cross = [&](const std::vector<int>& pos, const std::vector<int>& neg,
                   std::vector<std::pair<int, int>>& dst) {
    if (pos.empty() || neg.empty()) return;
    if (sampler.pair_samples_per_set <= 0) {
      for (int i : pos)
        for (int j : neg) dst.emplace_back(i, j);
      return;
    }
    if (!sampler.rng) throw ConfigError("pair sampling requires an RNG");
    for (int s = 0; s < sampler.pair_samples_per_set; ++s)
      dst.emplace_back(pos[static_cast<std::size_t>(sampler.rng->bounded(pos.size()))],
                       neg[static_cast<std::size_t>(sampler.rng->bounded(neg.size()))]);
  };
  cross(q_pos, q_neg, out.query_side);
  cross(f_pos, f_neg, out.filter_side);

  if (rank_all.empty()) {
    // single document: no ordered pairs
  } else if (sampler.pair_samples_per_set <= 0) {
    out.ranking = std::move(rank_all);
  } else {
    if (!sampler.rng) throw ConfigError("pair sampling requires an RNG");
    for (int s = 0; s < sampler.pair_samples_per_set; ++s)
      out.ranking.push_back(rank_all[static_cast<std::size_t>(sampler.rng->bounded(rank_all.size()))]);
  }
  return out;
}

double filtering_loss(const Eigen::VectorXd& salience, const OracleLabels& labels,
                      const PairSampler& sampler) {
  if (static_cast<int>(salience.size()) != labels.total_edus())
    throw ContractViolation("salience length disagrees with labels");
  PairSet ps = make_pairs(labels, sampler);
  if (ps.query_side.empty())
    std::cerr << "[loss] set " << labels.set_id << ": query-side pair set empty, term is 0\n";
  if (ps.filter_side.empty())
    std::cerr << "[loss] set " << labels.set_id << ": filter-side pair set empty, term is 0\n";
  Tape t;
  Var v = t.constant(as_column(salience));
  Var l = t.add(t.pair_softplus_mean(v, ps.query_side), t.pair_softplus_mean(v, ps.filter_side));
  return t.value(l)(0, 0);
}

double ranking_loss(const Eigen::VectorXd& relevance, const OracleLabels& labels,
                    const PairSampler& sampler) {
  if (static_cast<int>(relevance.size()) != static_cast<int>(labels.doc_ranking.size()))
    throw ContractViolation("relevance length disagrees with labels");
  PairSet ps = make_pairs(labels, sampler);
  Tape t;
  Var l = t.pair_softplus_mean(t.constant(as_column(relevance)), ps.ranking);
  return t.value(l)(0, 0);
}

double total_loss(double rank_l, double filter_l, double lambda) {
  if (lambda < 0.0) throw ConfigError("loss weight lambda must be non-negative");
  return rank_l + lambda * filter_l;
}

Forward build_forward(const SegmentedSet& set, const TokenEncoderBackend& backend, int c,
                      RetrieverModel& model, int k, const std::vector<int>* fixed_query_rows) {
  if (model.d != backend.dim())
    throw ContractViolation("model dimension disagrees with encoder backend");
  if (set.base.documents.empty()) throw InferenceError("empty document set");

  Forward f;
  Tape& t = f.tape;
  std::vector<Var> all_rows;
  std::vector<Var> doc_rows;
  for (std::size_t di = 0; di < set.base.documents.size(); ++di) {
    const auto& spans = set.spans[di];
    if (spans.empty())
      throw InferenceError("document " + set.base.documents[di].id + " has no EDUs");
    Var toks = t.constant(encode_tokens(set.base.documents[di], backend, c));
    std::vector<Var> rows;
    rows.reserve(spans.size());
    for (const EduSpan& s : spans) {
      rows.push_back(
          pool_edu_graph(t, t.slice_rows(toks, s.start, s.end - s.start), model.span_pooler));
      f.edu_ids.push_back({static_cast<int>(di), s.edu_index});
    }
    Var edus_doc = t.concat_rows(rows);
    doc_rows.push_back(pool_document_graph(t, edus_doc, model.gated_pooler));
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }
  f.edu_matrix = t.concat_rows(all_rows);
  f.doc_matrix = t.concat_rows(doc_rows);
  f.refined = refine_graph(t, f.edu_matrix, f.doc_matrix, model.cross_attn);
  f.salience = salience_graph(t, f.refined, model.filter_head);

  const int m = static_cast<int>(f.edu_ids.size());
  std::vector<int> rows_sel;
  if (fixed_query_rows) {
    rows_sel = *fixed_query_rows;
    for (int r : rows_sel)
      if (r < 0 || r >= m) throw ContractViolation("fixed query row out of range");
  } else {
    // E-step: hard top-k on current salience; gradients reach the selected
    // rows only through their use as queries below.
    Eigen::VectorXd sal = t.value(f.salience).col(0);
    std::vector<int> order = argsort_desc(sal);
    rows_sel.assign(order.begin(), order.begin() + std::min(k, m));
  }
  f.queries.flat_indices = rows_sel;
  for (int r : rows_sel) f.queries.source_edu_ids.push_back(f.edu_ids[static_cast<std::size_t>(r)]);
  Var qv = t.gather_rows(f.refined, rows_sel);
  f.queries.queries = t.value(qv);

  f.per_query = t.softmax_cols(t.matmul(f.doc_matrix, t.transpose(qv)));
  f.relevance = t.mean_cols(f.per_query);
  return f;
}

LossVars build_loss(Forward& fwd, double lambda, const PairSet& pairs) {
  if (lambda < 0.0) throw ConfigError("loss weight lambda must be non-negative");
  Tape& t = fwd.tape;
  LossVars lv;
  lv.rank = t.pair_softplus_mean(fwd.relevance, pairs.ranking);
  lv.filter = t.add(t.pair_softplus_mean(fwd.salience, pairs.query_side),
                    t.pair_softplus_mean(fwd.salience, pairs.filter_side));
  lv.total = t.add_scaled(lv.rank, lv.filter, lambda);
  return lv;
}

Adam::Adam(std::vector<Parameter*> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  if (lr <= 0.0) throw ConfigError("learning rate must be positive");
  for (Parameter* p : params_) {
    m_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
    v_.push_back(Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols()));
  }
}

void Adam::step() {
  ++t_;
  double bc1 = 1.0 - std::pow(beta1_, t_);
  double bc2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter* p = params_[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * p->grad;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * p->grad.cwiseProduct(p->grad);
    Eigen::ArrayXXd mhat = m_[i].array() / bc1;
    Eigen::ArrayXXd vhat = v_[i].array() / bc2;
    p->value.array() -= lr_ * mhat / (vhat.sqrt() + eps_);
  }
}

void Adam::zero_grad() {
  for (Parameter* p : params_) p->zero_grad();
}

void TrainingConfig::validate() const {
  if (lambda < 0.0) throw ConfigError("lambda must be non-negative");
  if (k < 1) throw ConfigError("query count k must be >= 1");
  if (k_q < 1) throw ConfigError("k_q must be >= 1");
  if (k_f_fraction <= 0.0 || k_f_fraction > 1.0)
    throw ConfigError("k_f_fraction must lie in (0, 1]");
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be positive");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (pair_samples_per_set < 0) throw ConfigError("pair_samples_per_set must be >= 0");
  if (chunk_size < 1) throw ConfigError("chunk size must be >= 1");
}

EpochStats evaluate_split(RetrieverModel& model, const std::vector<LabeledSet>& split,
                          const TokenEncoderBackend& backend, int c, int k) {
  EpochStats st;
  if (split.empty()) return st;
  double p_sum = 0.0, ndcg_sum = 0.0, mrr_sum = 0.0;
  for (const auto& [set, labels] : split) {
    InferenceResult inf = infer_scores(model, *set, backend, c, k);
    std::vector<int> pred_docs = argsort_desc(inf.doc_relevance);
    ndcg_sum += ndcg_at_k(pred_docs, labels->doc_ranking, 3);
    mrr_sum += mrr_first(pred_docs, labels->doc_ranking);

    std::vector<int> offs = doc_offsets(*labels);
    std::vector<int> oracle_top;
    for (EduId id : labels->query_set) oracle_top.push_back(flat_of(offs, id));
    std::vector<int> pred_edus = argsort_desc(inf.edu_salience);
    p_sum += precision_at_k(pred_edus, oracle_top, labels->k_q);
  }
  double n = static_cast<double>(split.size());
  st.precision_at_k = p_sum / n;
  st.ndcg_at_3 = ndcg_sum / n;
  st.mrr_1st = mrr_sum / n;
  return st;
}

TrainResult em_train(const std::vector<LabeledSet>& train, RetrieverModel& model, Adam& opt,
                     const TrainingConfig& cfg, const TokenEncoderBackend& backend,
                     const std::vector<LabeledSet>* eval_split,
                     const std::function<void(const EpochStats&, bool)>& on_epoch,
                     int start_epoch) {
  cfg.validate();
  if (train.empty()) throw ConfigError("training requires at least one labeled set");
  const std::vector<LabeledSet>& eval_ref = eval_split ? *eval_split : train;

  TrainResult res;
  for (int epoch = start_epoch + 1; epoch <= cfg.epochs; ++epoch) {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<int> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    Rng order_rng(derive_seed(cfg.seed, "epoch-order", static_cast<std::uint64_t>(epoch), 0));
    order_rng.shuffle(order);

    double sum_rank = 0.0, sum_filter = 0.0, sum_total = 0.0;
    int batch_id = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      double inv_b = 1.0 / static_cast<double>(stop - start);
      opt.zero_grad();
      for (std::size_t pos = start; pos < stop; ++pos) {
        int idx = order[pos];
        const auto& [set, labels] = train[static_cast<std::size_t>(idx)];
        Rng pair_rng(derive_seed(cfg.seed, "pair-sampling", static_cast<std::uint64_t>(epoch),
                                 static_cast<std::uint64_t>(idx)));
        PairSampler sampler{cfg.pair_samples_per_set, &pair_rng};
        PairSet pairs = make_pairs(*labels, sampler);
        Forward fwd = build_forward(*set, backend, cfg.chunk_size, model, cfg.k);
        LossVars lv = build_loss(fwd, cfg.lambda, pairs);
        double l_rank = fwd.tape.value(lv.rank)(0, 0);
        double l_filter = fwd.tape.value(lv.filter)(0, 0);
        double l_total = fwd.tape.value(lv.total)(0, 0);
        if (!std::isfinite(l_total))
          throw TrainingDivergence("non-finite loss on set " + set->base.set_id, batch_id, l_rank,
                                   l_filter);
        sum_rank += l_rank;
        sum_filter += l_filter;
        sum_total += l_total;
        // Batch loss is the mean of per-set losses.
        fwd.tape.backward(fwd.tape.scale(lv.total, inv_b));
      }
      opt.step();
      ++batch_id;
    }

    EpochStats st = evaluate_split(model, eval_ref, backend, cfg.chunk_size, cfg.k);
    st.epoch = epoch;
    double n = static_cast<double>(train.size());
    st.rank_loss = sum_rank / n;
    st.filter_loss = sum_filter / n;
    st.total = sum_total / n;
    st.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    bool is_best = st.ndcg_at_3 > res.best_ndcg_at_3;
    if (is_best) {
      res.best_ndcg_at_3 = st.ndcg_at_3;
      res.best_epoch = epoch;
    }
    res.history.push_back(st);
    if (on_epoch) on_epoch(st, is_best);
  }
  return res;
}

InferenceResult infer_scores(RetrieverModel& model, const SegmentedSet& set,
                             const TokenEncoderBackend& backend, int c, int k) {
  Forward fwd = build_forward(set, backend, c, model, k);
  InferenceResult out;
  out.edu_salience = fwd.tape.value(fwd.salience).col(0);
  out.doc_relevance = fwd.tape.value(fwd.relevance).col(0);
  out.queries = std::move(fwd.queries);
  out.edu_ids = std::move(fwd.edu_ids);
  return out;
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> data;
  data.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  j["data"] = std::move(data);
  return j;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  Eigen::Index rows = j.at("rows").get<Eigen::Index>();
  Eigen::Index cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols)
    throw CheckpointMismatch("parameter data length disagrees with its shape");
  Eigen::MatrixXd m(rows, cols);
  std::size_t at = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[at++].get<double>();
  return m;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, RetrieverModel& model,
                     const CheckpointMeta& meta, const Adam* opt, int epoch) {
  json j;
  j["format"] = "edurank-checkpoint-v1";
  j["epoch"] = epoch;
  j["fingerprint"] = {{"d", meta.d}, {"d_h", meta.d_h}, {"c", meta.c},
                      {"backend_id", meta.backend_id}};
  json params = json::object();
  for (Parameter* p : model.parameters()) params[p->name] = matrix_to_json(p->value);
  j["params"] = std::move(params);
  if (opt) {
    json a;
    a["t"] = opt->steps();
    json m1 = json::object(), m2 = json::object();
    const auto& ps = opt->params();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      m1[ps[i]->name] = matrix_to_json(opt->moment1(i));
      m2[ps[i]->name] = matrix_to_json(opt->moment2(i));
    }
    a["m"] = std::move(m1);
    a["v"] = std::move(m2);
    j["adam"] = std::move(a);
  }
  std::ofstream out(path);
  if (!out.is_open()) throw FormatError("cannot write checkpoint " + path.string());
  out << j.dump() << '\n';
}

void load_checkpoint(const std::filesystem::path& path, RetrieverModel& model,
                     const CheckpointMeta& expected, Adam* opt, int* epoch_out) {
  std::ifstream in(path);
  if (!in.is_open()) throw FormatError("cannot open checkpoint " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError("malformed checkpoint " + path.string());
  if (j.value("format", "") != "edurank-checkpoint-v1")
    throw CheckpointMismatch("unrecognized checkpoint format");
  if (epoch_out) *epoch_out = j.value("epoch", 0);

  const json& fp = j.at("fingerprint");
  if (fp.at("d").get<int>() != expected.d || fp.at("d_h").get<int>() != expected.d_h ||
      fp.at("c").get<int>() != expected.c ||
      fp.at("backend_id").get<std::string>() != expected.backend_id)
    throw CheckpointMismatch("checkpoint fingerprint {d=" + std::to_string(fp.at("d").get<int>()) +
                             ", d_h=" + std::to_string(fp.at("d_h").get<int>()) +
                             ", c=" + std::to_string(fp.at("c").get<int>()) + ", backend=" +
                             fp.at("backend_id").get<std::string>() + "} does not match the run");

  const json& params = j.at("params");
  for (Parameter* p : model.parameters()) {
    if (!params.contains(p->name))
      throw CheckpointMismatch("checkpoint is missing parameter " + p->name);
    Eigen::MatrixXd m = matrix_from_json(params.at(p->name));
    if (m.rows() != p->value.rows() || m.cols() != p->value.cols())
      throw CheckpointMismatch("parameter " + p->name + " has shape " + std::to_string(m.rows()) +
                               "x" + std::to_string(m.cols()) + ", expected " +
                               std::to_string(p->value.rows()) + "x" +
                               std::to_string(p->value.cols()));
    p->value = std::move(m);
    p->zero_grad();
  }

  if (opt) {
    if (!j.contains("adam"))
      throw CheckpointMismatch("checkpoint holds no optimizer state to resume from");
    const json& a = j.at("adam");
    opt->set_steps(a.at("t").get<int>());
    const auto& ps = opt->params();
    for (std::size_t i = 0; i < ps.size(); ++i) {
      Eigen::MatrixXd m1 = matrix_from_json(a.at("m").at(ps[i]->name));
      Eigen::MatrixXd m2 = matrix_from_json(a.at("v").at(ps[i]->name));
      if (m1.rows() != ps[i]->value.rows() || m1.cols() != ps[i]->value.cols() ||
          m2.rows() != ps[i]->value.rows() || m2.cols() != ps[i]->value.cols())
        throw CheckpointMismatch("optimizer state shape mismatch for " + ps[i]->name);
      opt->moment1(i) = std::move(m1);
      opt->moment2(i) = std::move(m2);
    }
  }
}

}  // namespace edurank
