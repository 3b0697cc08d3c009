#include "edurank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include <json.hpp>

#include "edurank/errors.hpp"

namespace edurank {

using nlohmann::json;

std::vector<int> argsort_desc(const Eigen::VectorXd& scores) {
  std::vector<int> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<int> argsort_asc(const Eigen::VectorXd& scores) {
  std::vector<int> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] < scores[b]; });
  return order;
}

double precision_at_k(const std::vector<int>& predicted_top, const std::vector<int>& oracle_top,
                      int k) {
  if (k <= 0) throw ValidationError("precision@K requires K >= 1");
  if (static_cast<int>(predicted_top.size()) < k)
    throw ValidationError("precision@K: fewer than K predictions");
  std::unordered_set<int> oracle(oracle_top.begin(), oracle_top.end());
  int hits = 0;
  for (int p = 0; p < k; ++p)
    if (oracle.count(predicted_top[static_cast<std::size_t>(p)])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double ndcg_at_k_custom(const std::vector<int>& predicted, const std::vector<double>& gains,
                        int k) {
  if (k < 1) throw ValidationError("NDCG@K requires K >= 1");
  const int n = static_cast<int>(gains.size());
  k = std::min(k, n);
  double dcg = 0.0;
  for (int p = 1; p <= k; ++p) {
    int id = predicted[static_cast<std::size_t>(p - 1)];
    if (id < 0 || id >= n) throw ValidationError("NDCG: predicted id out of range");
    dcg += gains[static_cast<std::size_t>(id)] / std::log2(static_cast<double>(p) + 1.0);
  }
  std::vector<double> sorted = gains;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double idcg = 0.0;
  for (int p = 1; p <= k; ++p)
    idcg += sorted[static_cast<std::size_t>(p - 1)] / std::log2(static_cast<double>(p) + 1.0);
  if (idcg == 0.0) return 1.0;  // all gains zero: any order is ideal
  return dcg / idcg;
}

double ndcg_at_k(const std::vector<int>& predicted, const std::vector<int>& oracle_ranking, int k,
                 bool exponential_gains) {
  const int n = static_cast<int>(oracle_ranking.size());
  if (static_cast<int>(predicted.size()) != n)
    throw ValidationError("NDCG: predicted and oracle rankings differ in length");
  std::vector<double> gains(static_cast<std::size_t>(n), 0.0);
  for (int rank = 0; rank < n; ++rank) {
    int id = oracle_ranking[static_cast<std::size_t>(rank)];
    if (id < 0 || id >= n) throw ValidationError("NDCG: oracle id out of range");
    double linear = static_cast<double>(n - rank);
    gains[static_cast<std::size_t>(id)] =
        exponential_gains ? std::exp2(linear) - 1.0 : linear;
  }
  return ndcg_at_k_custom(predicted, gains, k);
}

namespace {

double reciprocal_rank_of(const std::vector<int>& predicted, int target) {
  for (std::size_t p = 0; p < predicted.size(); ++p)
    if (predicted[p] == target) return 1.0 / static_cast<double>(p + 1);
  throw ValidationError("MRR: oracle document missing from prediction");
}

}  // namespace

double mrr_first(const std::vector<int>& predicted, const std::vector<int>& oracle_ranking) {
  if (oracle_ranking.empty()) throw ValidationError("MRR: empty oracle ranking");
  return reciprocal_rank_of(predicted, oracle_ranking[0]);
}

double mrr_second(const std::vector<int>& predicted, const std::vector<int>& oracle_ranking) {
  if (oracle_ranking.size() < 2)
    throw ValidationError("MRR of the rank-2 document needs at least two documents");
  return reciprocal_rank_of(predicted, oracle_ranking[1]);
}

void write_report(const std::filesystem::path& path, const MetricsReport& report) {
  json j;
  json pa = json::object();
  for (const auto& [k, v] : report.precision_at) pa[std::to_string(k)] = v;
  j["precision_at"] = std::move(pa);
  json fpa = json::object();
  for (const auto& [k, v] : report.filter_precision_at) fpa[std::to_string(k)] = v;
  j["filter_precision_at"] = std::move(fpa);
  json na = json::object();
  for (const auto& [k, v] : report.ndcg_at) na[std::to_string(k)] = v;
  j["ndcg_at"] = std::move(na);
  j["mrr_1st"] = report.mrr_1st;
  j["mrr_2nd"] = report.mrr_2nd;
  j["num_sets"] = report.num_sets;
  std::ofstream out(path);
  if (!out.is_open()) throw FormatError("cannot write metrics report " + path.string());
  out << j.dump(2) << '\n';
}

MetricsReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw FormatError("cannot open metrics report " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw FormatError("malformed metrics report " + path.string());
  MetricsReport r;
  for (const auto& [k, v] : j.at("precision_at").items()) r.precision_at[std::stoi(k)] = v;
  if (j.contains("filter_precision_at"))
    for (const auto& [k, v] : j.at("filter_precision_at").items())
      r.filter_precision_at[std::stoi(k)] = v;
  for (const auto& [k, v] : j.at("ndcg_at").items()) r.ndcg_at[std::stoi(k)] = v;
  r.mrr_1st = j.at("mrr_1st").get<double>();
  r.mrr_2nd = j.at("mrr_2nd").get<double>();
  r.num_sets = j.at("num_sets").get<int>();
  return r;
}

}  // namespace edurank
