#include "edurank/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "edurank/errors.hpp"

namespace edurank {

using nlohmann::json;

Aggregation aggregation_from_string(const std::string& name) {
  if (name == "mean") return Aggregation::kMean;
  if (name == "max") return Aggregation::kMax;
  if (name == "sum") return Aggregation::kSum;
  throw ConfigError("unknown aggregation '" + name + "'");
}

std::string to_string(Aggregation agg) {
  switch (agg) {
    case Aggregation::kMean: return "mean";
    case Aggregation::kMax: return "max";
    case Aggregation::kSum: return "sum";
  }
  return "mean";
}

int OracleLabels::total_edus() const {
  int n = 0;
  for (const auto& doc : edu_salience) n += static_cast<int>(doc.size());
  return n;
}

std::vector<EduId> OracleLabels::salience_ranking() const {
  std::vector<EduId> ids;
  for (int d = 0; d < static_cast<int>(edu_salience.size()); ++d)
    for (int e = 0; e < static_cast<int>(edu_salience[static_cast<std::size_t>(d)].size()); ++e)
      ids.push_back({d, e});
  std::stable_sort(ids.begin(), ids.end(), [&](EduId a, EduId b) {
    double sa = salience(a), sb = salience(b);
    if (sa != sb) return sa > sb;
    return a < b;
  });
  return ids;
}

std::vector<std::pair<int, int>> OracleLabels::ranked_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (std::size_t i = 0; i < doc_ranking.size(); ++i)
    for (std::size_t j = i + 1; j < doc_ranking.size(); ++j)
      pairs.emplace_back(doc_ranking[i], doc_ranking[j]);
  return pairs;
}

double score_edu(const Eigen::VectorXd& edu_vec, const Eigen::VectorXd& summary_vec) {
  if (edu_vec.size() != summary_vec.size())
    throw ValidationError("cosine between vectors of different dimension");
  double na = edu_vec.norm();
  double nb = summary_vec.norm();
  if (na == 0.0 || nb == 0.0)
    throw ValidationError("cosine similarity undefined for a zero vector");
  return edu_vec.dot(summary_vec) / (na * nb);
}

namespace {

/// Per-EDU cosine scores against the reference summary.
std::vector<std::vector<double>> edu_scores(const SegmentedSet& set,
                                            const SemanticEmbedder& embedder) {
  if (!set.base.reference_summary)
    throw LabelError("set " + set.base.set_id + " has no reference summary");
  if (!embedder.deterministic())
    throw ContractViolation("semantic embedder must be deterministic");

  std::vector<std::string> texts;
  texts.push_back(*set.base.reference_summary);
  for (const auto& doc_spans : set.spans) {
    if (doc_spans.empty())
      throw LabelError("set " + set.base.set_id + " has a document with no EDUs");
    for (const EduSpan& s : doc_spans) texts.push_back(s.text);
  }
  std::vector<Eigen::VectorXd> vecs = embedder.embed(texts);

  std::vector<std::vector<double>> scores(set.spans.size());
  std::size_t idx = 1;
  for (std::size_t d = 0; d < set.spans.size(); ++d) {
    scores[d].reserve(set.spans[d].size());
    for (std::size_t e = 0; e < set.spans[d].size(); ++e)
      scores[d].push_back(score_edu(vecs[idx++], vecs[0]));
  }
  return scores;
}

double aggregate(const std::vector<double>& values, Aggregation agg) {
  switch (agg) {
    case Aggregation::kMean:
      return std::accumulate(values.begin(), values.end(), 0.0) /
             static_cast<double>(values.size());
    case Aggregation::kMax:
      return *std::max_element(values.begin(), values.end());
    case Aggregation::kSum:
      return std::accumulate(values.begin(), values.end(), 0.0);
  }
  return 0.0;
}

std::vector<int> rank_from_scores(const std::vector<std::vector<double>>& scores,
                                  Aggregation agg) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> doc_score(scores.size());
  for (std::size_t d = 0; d < scores.size(); ++d) doc_score[d] = aggregate(scores[d], agg);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    double sa = doc_score[static_cast<std::size_t>(a)];
    double sb = doc_score[static_cast<std::size_t>(b)];
    if (sa != sb) return sa > sb;
    return a < b;
  });
  return order;
}

}  // namespace

std::vector<int> rank_documents_oracle(const SegmentedSet& set, const SemanticEmbedder& embedder,
                                       Aggregation aggregation) {
  return rank_from_scores(edu_scores(set, embedder), aggregation);
}

int default_filter_count(int total_edus, double fraction) {
  int k = static_cast<int>(static_cast<double>(total_edus) * fraction);
  return std::max(1, k);
}

OracleLabels build_labels(const SegmentedSet& set, const SemanticEmbedder& embedder, int k_q,
                          int k_f, Aggregation aggregation) {
  if (k_q < 1 || k_f < 1) throw ConfigError("k_q and k_f must be >= 1");

  OracleLabels labels;
  labels.set_id = set.base.set_id;
  labels.embedder_id = embedder.id();
  labels.edu_salience = edu_scores(set, embedder);
  labels.doc_ranking = rank_from_scores(labels.edu_salience, aggregation);

  const int total = labels.total_edus();
  if (k_q > total) {
    std::cerr << "[labels] set " << set.base.set_id << ": k_q=" << k_q << " clipped to " << total
              << " EDUs\n";
    k_q = total;
  }
  if (k_f > total) {
    std::cerr << "[labels] set " << set.base.set_id << ": k_f=" << k_f << " clipped to " << total
              << " EDUs\n";
    k_f = total;
  }
  if (k_q + k_f > total) {
    int shrunk = std::max(0, total - k_q);
    std::cerr << "[labels] set " << set.base.set_id << ": query/filter sets overlap, shrinking k_f "
              << k_f << " -> " << shrunk << "\n";
    k_f = shrunk;
  }
  labels.k_q = k_q;
  labels.k_f = k_f;

  std::vector<EduId> ranking = labels.salience_ranking();
  labels.query_set.assign(ranking.begin(), ranking.begin() + k_q);
  // Bottom EDUs, worst first: the tail of the same ranking, reversed. Taking
  // the tail (rather than re-sorting ascending) keeps the two sets disjoint
  // whenever k_q + k_f <= total, even through ties.
  labels.filter_set.assign(ranking.rbegin(), ranking.rbegin() + k_f);
  return labels;
}

void write_labels(const std::filesystem::path& path, const std::vector<OracleLabels>& labels) {
  std::ofstream out(path);
  if (!out.is_open()) throw FormatError("cannot write label file " + path.string());
  for (const OracleLabels& l : labels) {
    json rec;
    rec["set_id"] = l.set_id;
    json sal = json::array();
    for (int d = 0; d < static_cast<int>(l.edu_salience.size()); ++d)
      for (int e = 0; e < static_cast<int>(l.edu_salience[static_cast<std::size_t>(d)].size());
           ++e)
        sal.push_back(json::array(
            {d, e, l.edu_salience[static_cast<std::size_t>(d)][static_cast<std::size_t>(e)]}));
    rec["edu_salience"] = std::move(sal);
    rec["doc_ranking"] = l.doc_ranking;
    rec["k_q"] = l.k_q;
    rec["k_f"] = l.k_f;
    rec["embedder_id"] = l.embedder_id;
    out << rec.dump() << '\n';
  }
}

std::vector<OracleLabels> read_labels(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw FormatError("cannot open label file " + path.string());
  std::vector<OracleLabels> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded()) throw FormatError("malformed label line " + std::to_string(line_no));

    OracleLabels l;
    l.set_id = rec.at("set_id").get<std::string>();
    for (const auto& entry : rec.at("edu_salience")) {
      int d = entry[0].get<int>();
      int e = entry[1].get<int>();
      if (d >= static_cast<int>(l.edu_salience.size()))
        l.edu_salience.resize(static_cast<std::size_t>(d) + 1);
      auto& doc = l.edu_salience[static_cast<std::size_t>(d)];
      if (e >= static_cast<int>(doc.size())) doc.resize(static_cast<std::size_t>(e) + 1, 0.0);
      doc[static_cast<std::size_t>(e)] = entry[2].get<double>();
    }
    l.doc_ranking = rec.at("doc_ranking").get<std::vector<int>>();
    l.k_q = rec.at("k_q").get<int>();
    l.k_f = rec.at("k_f").get<int>();
    l.embedder_id = rec.at("embedder_id").get<std::string>();

    // Query/filter sets are a pure function of the stored scores: head and
    // reversed tail of the salience ranking, as in build_labels.
    std::vector<EduId> ranking = l.salience_ranking();
    l.query_set.assign(ranking.begin(), ranking.begin() + l.k_q);
    l.filter_set.assign(ranking.rbegin(), ranking.rbegin() + l.k_f);
    out.push_back(std::move(l));
  }
  return out;
}

}  // namespace edurank
