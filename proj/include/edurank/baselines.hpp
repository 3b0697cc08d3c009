#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "edurank/corpus.hpp"
#include "edurank/oracle.hpp"

namespace edurank {

// Okapi BM25 over a fixed collection of token lists ("units": either whole
// documents or single EDUs). Terms are lowercased; no stemming.
class Bm25Index {
 public:
  explicit Bm25Index(const std::vector<std::vector<std::string>>& unit_tokens, double k1 = 1.2,
                     double b = 0.75);

  // Sum over query term occurrences of idf(t) * tf*(k1+1) / (tf + k1*(1 - b +
  // b*len/avglen)) with the smoothed idf ln((N - df + 0.5)/(df + 0.5) + 1),
  // which is never negative. Absent terms contribute 0.
  double score(const std::vector<std::string>& query_terms, int unit_id) const;
  Eigen::VectorXd scores(const std::vector<std::string>& query_terms) const;
  // Top-k unit ids by descending score; ties resolve to the lower unit id.
  std::vector<int> rank(const std::vector<std::string>& query_terms, int k) const;
  int size() const { return static_cast<int>(tf_.size()); }

 private:
  std::vector<std::unordered_map<std::string, int>> tf_;
  std::vector<int> len_;
  std::unordered_map<std::string, int> df_;
  double avglen_ = 1.0;
  double k1_, b_;
};

const std::unordered_set<std::string>& default_stopwords();
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

// RAKE keyword phrases: candidate phrases are maximal stopword-free runs (of
// at most max_phrase_words tokens; punctuation-only tokens also break runs).
// Word score = degree / frequency over the aggregated co-occurrence graph,
// phrase score = sum of member word scores. Descending score, ties
// lexicographic.
std::vector<std::pair<std::string, double>> rake_keywords(
    const std::vector<std::string>& texts, const std::unordered_set<std::string>& stopwords,
    int max_phrase_words = 4);

// The simulated query: top `phrases` RAKE phrases joined by single spaces.
std::string rake_query(const std::vector<std::string>& texts,
                       const std::unordered_set<std::string>& stopwords, int phrases = 5,
                       int max_phrase_words = 4);

// The text of the highest-salience EDU (ties: ascending (doc, edu)).
std::string gold_query(const OracleLabels& labels, const SegmentedSet& set);

// Unit views of a segmented set for BM25 ranking.
std::vector<std::vector<std::string>> edu_units(const SegmentedSet& set);
std::vector<std::vector<std::string>> doc_units(const SegmentedSet& set);

}  // namespace edurank
