#include "edurank/baselines.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>

#include "edurank/errors.hpp"
#include "edurank/hashing.hpp"

namespace edurank {

Bm25Index::Bm25Index(const std::vector<std::vector<std::string>>& unit_tokens, double k1, double b)
    : k1_(k1), b_(b) {
  if (unit_tokens.empty()) throw ConfigError("BM25 index needs at least one unit");
  if (k1 < 0.0 || b < 0.0 || b > 1.0) throw ConfigError("BM25 parameters out of range");
  long total = 0;
  for (const auto& unit : unit_tokens) {
    std::unordered_map<std::string, int> tf;
    for (const std::string& tok : unit) ++tf[to_lower_ascii(tok)];
    for (const auto& [term, _] : tf) ++df_[term];
    len_.push_back(static_cast<int>(unit.size()));
    total += static_cast<long>(unit.size());
    tf_.push_back(std::move(tf));
  }
  avglen_ = total > 0 ? static_cast<double>(total) / static_cast<double>(tf_.size()) : 1.0;
}

double Bm25Index::score(const std::vector<std::string>& query_terms, int unit_id) const {
  if (unit_id < 0 || unit_id >= size()) throw ValidationError("BM25: unit id out of range");
  const auto& tf = tf_[static_cast<std::size_t>(unit_id)];
  double len = static_cast<double>(len_[static_cast<std::size_t>(unit_id)]);
  double norm = k1_ * (1.0 - b_ + b_ * len / avglen_);
  double s = 0.0;
  for (const std::string& raw : query_terms) {
    std::string term = to_lower_ascii(raw);
    auto it = tf.find(term);
    if (it == tf.end()) continue;
    double f = static_cast<double>(it->second);
    double n = static_cast<double>(df_.at(term));
    double idf = std::log((static_cast<double>(size()) - n + 0.5) / (n + 0.5) + 1.0);
    s += idf * f * (k1_ + 1.0) / (f + norm);
  }
  return s;
}

Eigen::VectorXd Bm25Index::scores(const std::vector<std::string>& query_terms) const {
  Eigen::VectorXd out(size());
  for (int u = 0; u < size(); ++u) out[u] = score(query_terms, u);
  return out;
}

std::vector<int> Bm25Index::rank(const std::vector<std::string>& query_terms, int k) const {
  if (k < 1) throw ConfigError("BM25 ranking needs k >= 1");
  Eigen::VectorXd s = scores(query_terms);
  std::vector<int> order(static_cast<std::size_t>(size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return s[a] > s[b]; });
  order.resize(static_cast<std::size_t>(std::min(k, size())));
  return order;
}

const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",       "about",   "above",  "after",  "again",   "against", "all",    "am",
      "an",      "and",     "any",    "are",    "as",      "at",      "be",     "because",
      "been",    "before",  "being",  "below",  "between", "both",    "but",    "by",
      "can",     "cannot",  "could",  "did",    "do",      "does",    "doing",  "down",
      "during",  "each",    "few",    "for",    "from",    "further", "had",    "has",
      "have",    "having",  "he",     "her",    "here",    "hers",    "him",    "his",
      "how",     "i",       "if",     "in",     "into",    "is",      "it",     "its",
      "itself",  "just",    "me",     "more",   "most",    "my",      "no",     "nor",
      "not",     "now",     "of",     "off",    "on",      "once",    "only",   "or",
      "other",   "our",     "ours",   "out",    "over",    "own",     "same",   "she",
      "should",  "so",      "some",   "such",   "than",    "that",    "the",    "their",
      "theirs",  "them",    "then",   "there",  "these",   "they",    "this",   "those",
      "through", "to",      "too",    "under",  "until",   "up",      "very",   "was",
      "we",      "were",    "what",   "when",   "where",   "which",   "while",  "who",
      "whom",    "why",     "will",   "with",   "would",   "you",     "your",   "yours",
  };
  return words;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw FormatError("cannot open stopword file " + path.string());
  std::unordered_set<std::string> words;
  std::string word;
  while (in >> word) words.insert(to_lower_ascii(word));
  return words;
}

namespace {

bool has_alnum(const std::string& s) {
  for (unsigned char c : s)
    if (std::isalnum(c)) return true;
  return false;
}

}  // namespace

std::vector<std::pair<std::string, double>> rake_keywords(
    const std::vector<std::string>& texts, const std::unordered_set<std::string>& stopwords,
    int max_phrase_words) {
  if (max_phrase_words < 1) throw ConfigError("RAKE phrase cap must be >= 1");
  WhitespaceTokenizer tok;

  // Candidate phrases (as word lists), aggregated over all texts.
  std::vector<std::vector<std::string>> phrases;
  for (const std::string& text : texts) {
    std::vector<std::string> run;
    auto flush = [&]() {
      if (!run.empty() && static_cast<int>(run.size()) <= max_phrase_words)
        phrases.push_back(run);
      run.clear();
    };
    for (const std::string& raw : tok.tokenize(text)) {
      std::string w = to_lower_ascii(raw);
      if (!has_alnum(w) || stopwords.count(w)) {
        flush();
        continue;
      }
      run.push_back(std::move(w));
    }
    flush();
  }

  // Degree = total size of phrases a word occurs in; frequency = occurrences.
  std::unordered_map<std::string, double> freq, degree;
  for (const auto& phrase : phrases) {
    for (const std::string& w : phrase) {
      freq[w] += 1.0;
      degree[w] += static_cast<double>(phrase.size());
    }
  }

  std::unordered_map<std::string, double> phrase_score;
  for (const auto& phrase : phrases) {
    double s = 0.0;
    std::string text;
    for (const std::string& w : phrase) {
      s += degree[w] / freq[w];
      if (!text.empty()) text += ' ';
      text += w;
    }
    phrase_score[text] = s;  // same text always recomputes to the same score
  }

  std::vector<std::pair<std::string, double>> out(phrase_score.begin(), phrase_score.end());
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

std::string rake_query(const std::vector<std::string>& texts,
                       const std::unordered_set<std::string>& stopwords, int phrases,
                       int max_phrase_words) {
  if (phrases < 1) throw ConfigError("RAKE query needs at least one phrase");
  auto ranked = rake_keywords(texts, stopwords, max_phrase_words);
  std::string query;
  for (std::size_t i = 0; i < ranked.size() && i < static_cast<std::size_t>(phrases); ++i) {
    if (!query.empty()) query += ' ';
    query += ranked[i].first;
  }
  return query;
}

std::string gold_query(const OracleLabels& labels, const SegmentedSet& set) {
  if (labels.edu_salience.empty()) throw LabelError("gold query requires oracle labels");
  if (labels.edu_salience.size() != set.spans.size())
    throw LabelError("labels do not match the set's document count");
  for (std::size_t d = 0; d < set.spans.size(); ++d)
    if (labels.edu_salience[d].size() != set.spans[d].size())
      throw LabelError("labels do not match the set's EDU counts");
  EduId best = labels.salience_ranking().front();
  return set.spans[static_cast<std::size_t>(best.doc)][static_cast<std::size_t>(best.edu)].text;
}

std::vector<std::vector<std::string>> edu_units(const SegmentedSet& set) {
  std::vector<std::vector<std::string>> units;
  for (std::size_t d = 0; d < set.spans.size(); ++d) {
    const Document& doc = set.base.documents[d];
    for (const EduSpan& s : set.spans[d])
      units.emplace_back(doc.tokens.begin() + s.start, doc.tokens.begin() + s.end);
  }
  return units;
}

std::vector<std::vector<std::string>> doc_units(const SegmentedSet& set) {
  std::vector<std::vector<std::string>> units;
  for (const Document& doc : set.base.documents) units.push_back(doc.tokens);
  return units;
}

}  // namespace edurank
