#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <vector>

namespace edurank {

// Indices sorted by descending score; ties keep ascending index order.
std::vector<int> argsort_desc(const Eigen::VectorXd& scores);
// Ascending score (worst first); ties keep ascending index order.
std::vector<int> argsort_asc(const Eigen::VectorXd& scores);

// Fraction of the first K predicted ids that appear in oracle_top.
double precision_at_k(const std::vector<int>& predicted_top, const std::vector<int>& oracle_top,
                      int k);

// Position-discounted ranking quality. Gains are linear in oracle rank:
// gain = n - rank (0-based), so the oracle-best unit gains n. K is clipped
// to n. `exponential_gains` switches to 2^(n-rank) - 1.
double ndcg_at_k(const std::vector<int>& predicted, const std::vector<int>& oracle_ranking, int k,
                 bool exponential_gains = false);
// Same discounting with caller-supplied per-unit gains (indexed by unit id).
double ndcg_at_k_custom(const std::vector<int>& predicted, const std::vector<double>& gains, int k);

// Reciprocal of the 1-based predicted position of the oracle rank-1 unit.
double mrr_first(const std::vector<int>& predicted, const std::vector<int>& oracle_ranking);
// Same for the oracle rank-2 unit; requires at least two units.
double mrr_second(const std::vector<int>& predicted, const std::vector<int>& oracle_ranking);

struct MetricsReport {
  std::map<int, double> precision_at;         // query selection, top-K
  std::map<int, double> filter_precision_at;  // filtering, bottom-K
  std::map<int, double> ndcg_at;
  double mrr_1st = 0.0;
  double mrr_2nd = 0.0;
  int num_sets = 0;
};

void write_report(const std::filesystem::path& path, const MetricsReport& report);
MetricsReport read_report(const std::filesystem::path& path);

}  // namespace edurank
