#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <string>
#include <vector>

#include "edurank/corpus.hpp"
#include "edurank/embedder.hpp"

namespace edurank {

enum class Aggregation { kMean, kMax, kSum };

Aggregation aggregation_from_string(const std::string& name);
std::string to_string(Aggregation agg);

/// Ground-truth supervision for one document set: per-EDU salience against
/// the reference summary, the induced document ranking, and the derived
/// query / filter EDU sets.
struct OracleLabels {
  std::string set_id;
  std::vector<std::vector<double>> edu_salience;  // [doc][edu], cosine in [-1, 1]
  std::vector<int> doc_ranking;                   // permutation, best first
  std::vector<EduId> query_set;                   // top-k_q EDUs, best first
  std::vector<EduId> filter_set;                  // bottom-k_f EDUs, worst first
  int k_q = 0;
  int k_f = 0;
  std::string embedder_id;

  int total_edus() const;
  double salience(EduId id) const {
    return edu_salience[static_cast<std::size_t>(id.doc)][static_cast<std::size_t>(id.edu)];
  }
  /// All EDU ids ordered by descending salience, ties by (doc, edu) ascending.
  std::vector<EduId> salience_ranking() const;
  /// Ordered document pairs (higher, lower) implied by doc_ranking.
  std::vector<std::pair<int, int>> ranked_pairs() const;
};

/// Cosine similarity; throws on a zero vector (undefined similarity).
double score_edu(const Eigen::VectorXd& edu_vec, const Eigen::VectorXd& summary_vec);

/// Documents sorted by aggregated EDU-to-summary similarity, descending,
/// ties broken by ascending document index.
std::vector<int> rank_documents_oracle(const SegmentedSet& set, const SemanticEmbedder& embedder,
                                       Aggregation aggregation);

/// Builds the complete label record. Oversized k_q / k_f are clipped (with a
/// warning on stderr); overlapping query/filter sets are made disjoint by
/// shrinking k_f.
OracleLabels build_labels(const SegmentedSet& set, const SemanticEmbedder& embedder, int k_q,
                          int k_f, Aggregation aggregation);

/// Derives k_f from a fraction of the total EDU count (floor, minimum 1).
int default_filter_count(int total_edus, double fraction = 0.2);

void write_labels(const std::filesystem::path& path, const std::vector<OracleLabels>& labels);
std::vector<OracleLabels> read_labels(const std::filesystem::path& path);

}  // namespace edurank
