#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "edurank/corpus.hpp"
#include "edurank/embedder.hpp"
#include "edurank/errors.hpp"
#include "edurank/oracle.hpp"
#include "edurank/synth.hpp"

using namespace edurank;

namespace {

namespace fs = std::filesystem;

Eigen::VectorXd v2(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

// Maps known texts to fixed 2-d vectors so cosines are chosen exactly:
// text -> [c, sqrt(1-c^2)] scores cosine c against the summary [1, 0].
struct CannedEmbedder : SemanticEmbedder {
  std::map<std::string, double> cosines;

  std::vector<Eigen::VectorXd> embed(const std::vector<std::string>& texts) const override {
    std::vector<Eigen::VectorXd> out;
    for (const auto& t : texts) {
      auto it = cosines.find(t);
      double c = it == cosines.end() ? 1.0 : it->second;
      out.push_back(v2(c, std::sqrt(std::max(0.0, 1.0 - c * c))));
    }
    return out;
  }
  int dim() const override { return 2; }
  std::string id() const override { return "canned"; }
};

SegmentedSet set_with_edus(const std::vector<std::vector<std::string>>& edu_texts_per_doc,
                           const std::string& summary = "sum") {
  WhitespaceTokenizer tok;
  DocumentSet ds;
  ds.set_id = "t";
  ds.reference_summary = summary;
  SegmentedSet seg;
  for (std::size_t d = 0; d < edu_texts_per_doc.size(); ++d) {
    std::string text;
    std::vector<EduSpan> spans;
    int offset = 0;
    for (std::size_t e = 0; e < edu_texts_per_doc[d].size(); ++e) {
      const std::string& t = edu_texts_per_doc[d][e];
      if (!text.empty()) text += ' ';
      text += t;
      int len = static_cast<int>(tok.tokenize(t).size());
      spans.push_back({static_cast<int>(d), static_cast<int>(e), offset, offset + len, t});
      offset += len;
    }
    ds.documents.emplace_back("d" + std::to_string(d), text, tok);
    seg.spans.push_back(std::move(spans));
    seg.chunks.push_back({{static_cast<int>(d), 0, 0, offset}});
  }
  seg.base = std::move(ds);
  return seg;
}

}  // namespace

TEST_CASE("cosine scoring") {
  CHECK(score_edu(v2(0.3, 0.4), v2(0.3, 0.4)) == doctest::Approx(1.0));
  CHECK(score_edu(v2(1, 0), v2(0, 1)) == doctest::Approx(0.0));
  CHECK(score_edu(v2(1, 1), v2(1, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
  CHECK(score_edu(v2(1, 1), v2(1, 0)) == doctest::Approx(0.7071).epsilon(1e-4));
  CHECK_THROWS_AS(score_edu(v2(0, 0), v2(1, 0)), ValidationError);
}

TEST_CASE("cosine is invariant to positive rescaling") {
  Eigen::VectorXd a = v2(0.2, -0.7), b = v2(1.3, 0.4);
  double base = score_edu(a, b);
  CHECK(score_edu(3.5 * a, 0.01 * b) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("oracle document ranking by aggregated EDU similarity") {
  CannedEmbedder emb;
  emb.cosines = {{"a1", 0.9}, {"a2", 0.1}, {"b1", 0.4}, {"b2", 0.4}};
  SegmentedSet seg = set_with_edus({{"a1", "a2"}, {"b1", "b2"}});
  CHECK(rank_documents_oracle(seg, emb, Aggregation::kMean) == std::vector<int>{0, 1});
  // max picks 0.9 vs 0.4 -> same order; sum 1.0 vs 0.8 -> same order.
  CHECK(rank_documents_oracle(seg, emb, Aggregation::kMax) == std::vector<int>{0, 1});
  CHECK(rank_documents_oracle(seg, emb, Aggregation::kSum) == std::vector<int>{0, 1});

  // Exact tie under mean: lower document index first.
  emb.cosines = {{"a1", 0.5}, {"a2", 0.5}, {"b1", 0.6}, {"b2", 0.4}};
  CHECK(rank_documents_oracle(seg, emb, Aggregation::kMean) == std::vector<int>{0, 1});

  SegmentedSet single = set_with_edus({{"a1"}});
  CHECK(rank_documents_oracle(single, emb, Aggregation::kMean) == std::vector<int>{0});

  SegmentedSet no_summary = set_with_edus({{"a1"}});
  no_summary.base.reference_summary.reset();
  CHECK_THROWS_AS(rank_documents_oracle(no_summary, emb, Aggregation::kMean), LabelError);
}

TEST_CASE("aggregation names round-trip") {
  CHECK(aggregation_from_string("mean") == Aggregation::kMean);
  CHECK(aggregation_from_string("max") == Aggregation::kMax);
  CHECK(aggregation_from_string("sum") == Aggregation::kSum);
  CHECK(to_string(Aggregation::kMax) == "max");
  CHECK_THROWS_AS(aggregation_from_string("median"), ConfigError);
}

TEST_CASE("labels take the top and bottom of the salience ordering") {
  CannedEmbedder emb;
  emb.cosines = {{"e0", 0.9}, {"e1", 0.1}, {"e2", 0.8}, {"e3", 0.5}};
  SegmentedSet seg = set_with_edus({{"e0", "e1", "e2", "e3"}});
  OracleLabels labels = build_labels(seg, emb, 2, 1, Aggregation::kMean);
  REQUIRE(labels.query_set.size() == 2);
  CHECK(labels.query_set[0] == EduId{0, 0});
  CHECK(labels.query_set[1] == EduId{0, 2});
  REQUIRE(labels.filter_set.size() == 1);
  CHECK(labels.filter_set[0] == EduId{0, 1});
  CHECK(labels.k_q == 2);
  CHECK(labels.k_f == 1);
  CHECK(labels.salience({0, 3}) == doctest::Approx(0.5));
  CHECK(labels.embedder_id == "canned");
}

TEST_CASE("equal salience ties select by ascending (doc, edu)") {
  CannedEmbedder emb;  // every unknown text scores cosine 1.0
  SegmentedSet seg = set_with_edus({{"x0", "x1"}, {"x2", "x3"}});
  OracleLabels labels = build_labels(seg, emb, 2, 1, Aggregation::kMean);
  CHECK(labels.query_set == std::vector<EduId>{{0, 0}, {0, 1}});
  // Worst-first bottom of the same tie: the last id.
  CHECK(labels.filter_set == std::vector<EduId>{{1, 1}});
}

TEST_CASE("oversized and overlapping label sizes are repaired") {
  CannedEmbedder emb;
  emb.cosines = {{"e0", 0.9}, {"e1", 0.1}, {"e2", 0.8}, {"e3", 0.5}};
  SegmentedSet seg = set_with_edus({{"e0", "e1", "e2", "e3"}});
  // k_q + k_f exceeds the EDU count: k_f shrinks to keep the sets disjoint.
  OracleLabels labels = build_labels(seg, emb, 3, 3, Aggregation::kMean);
  CHECK(labels.k_q == 3);
  CHECK(labels.k_f == 1);
  for (const EduId& q : labels.query_set)
    for (const EduId& f : labels.filter_set) CHECK_FALSE(q == f);
  // k_q alone larger than the set: clipped, and with every EDU a query the
  // filter set has nothing left to take.
  OracleLabels wide = build_labels(seg, emb, 10, 1, Aggregation::kMean);
  CHECK(wide.k_q == 4);
  CHECK(wide.k_f == 0);
  CHECK(wide.filter_set.empty());
}

TEST_CASE("salience ranking reproduces the query set prefix") {
  CannedEmbedder emb;
  emb.cosines = {{"e0", 0.3}, {"e1", 0.7}, {"e2", 0.5}, {"e3", 0.9}, {"e4", 0.1}};
  SegmentedSet seg = set_with_edus({{"e0", "e1", "e2"}, {"e3", "e4"}});
  OracleLabels labels = build_labels(seg, emb, 3, 1, Aggregation::kMean);
  auto ranking = labels.salience_ranking();
  REQUIRE(static_cast<int>(ranking.size()) == labels.total_edus());
  std::vector<EduId> prefix(ranking.begin(), ranking.begin() + labels.k_q);
  CHECK(prefix == labels.query_set);
  // ranked_pairs lists every (higher, lower) document pair.
  auto pairs = labels.ranked_pairs();
  CHECK(pairs.size() == 1);
  CHECK(pairs[0].first == labels.doc_ranking[0]);
}

TEST_CASE("default filter count is a floored fraction with a floor of one") {
  CHECK(default_filter_count(150) == 30);
  CHECK(default_filter_count(10) == 2);
  CHECK(default_filter_count(3) == 1);
  CHECK(default_filter_count(1) == 1);
  CHECK(default_filter_count(10, 0.5) == 5);
}

TEST_CASE("hashing embedder is deterministic and unit-norm") {
  HashingEmbedder emb(256);
  auto a = emb.embed({"the quick brown fox", "the quick brown fox", "another text"});
  CHECK(a[0] == a[1]);
  CHECK(a[0] != a[2]);
  CHECK(a[0].size() == 256);
  CHECK(a[0].norm() == doctest::Approx(1.0).epsilon(1e-12));
  // Case-folding: unigrams are lowercased.
  auto b = emb.embed({"The QUICK brown FOX"});
  CHECK(b[0] == a[0]);
  CHECK(make_embedder("hash-unigram-256")->id() == emb.id());
}

TEST_CASE("label files round-trip byte-identically") {
  CannedEmbedder emb;
  emb.cosines = {{"e0", 0.9}, {"e1", 0.1}, {"e2", 0.8}, {"e3", 0.5}};
  SegmentedSet seg = set_with_edus({{"e0", "e1"}, {"e2", "e3"}});
  std::vector<OracleLabels> labels = {build_labels(seg, emb, 2, 1, Aggregation::kMean)};

  fs::path p1 = fs::temp_directory_path() / "edurank-labels-rt1.jsonl";
  fs::path p2 = fs::temp_directory_path() / "edurank-labels-rt2.jsonl";
  write_labels(p1, labels);
  auto back = read_labels(p1);
  REQUIRE(back.size() == 1);
  CHECK(back[0].doc_ranking == labels[0].doc_ranking);
  CHECK(back[0].query_set == labels[0].query_set);
  CHECK(back[0].filter_set == labels[0].filter_set);
  CHECK(back[0].edu_salience == labels[0].edu_salience);
  CHECK(back[0].k_q == labels[0].k_q);
  CHECK(back[0].embedder_id == labels[0].embedder_id);

  write_labels(p2, back);
  std::ifstream f1(p1), f2(p2);
  std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(c1 == c2);
  fs::remove(p1);
  fs::remove(p2);
}

TEST_CASE("planted synthetic sets label exactly the planted EDUs") {
  SynthConfig cfg;
  cfg.train_sets = 2;
  cfg.test_sets = 1;
  SynthCorpus corpus = generate_synthetic(cfg);
  REQUIRE(corpus.train.size() == 2);
  HashingEmbedder emb(cfg.embed_dim);
  for (auto& raw : corpus.train) {
    SegmentedSet seg = segment_set(std::move(raw), FallbackSegmenter(), 1024);
    OracleLabels labels = build_labels(seg, emb, 10, 30, Aggregation::kMean);
    // The 10 planted query EDUs form the strictly separated top tier.
    double query_floor = 1.0;
    for (const EduId& q : labels.query_set)
      query_floor = std::min(query_floor, labels.salience(q));
    int above = 0;
    for (const auto& ranking_id : labels.salience_ranking())
      if (labels.salience(ranking_id) >= query_floor) ++above;
    CHECK(above == 10);
    // Filtered EDUs sit at or below every non-filtered salience.
    double filter_ceiling = -1.0;
    for (const EduId& f : labels.filter_set)
      filter_ceiling = std::max(filter_ceiling, labels.salience(f));
    auto ranking = labels.salience_ranking();
    std::vector<EduId> kept(ranking.begin(), ranking.end() - labels.k_f);
    for (const EduId& id : kept) CHECK(labels.salience(id) >= filter_ceiling);
    // Document ranking is the unique strictly-decreasing planted order.
    std::vector<double> means;
    for (int rank : labels.doc_ranking) {
      const auto& row = labels.edu_salience[static_cast<std::size_t>(rank)];
      double m = 0.0;
      for (double s : row) m += s;
      means.push_back(m / static_cast<double>(row.size()));
    }
    for (std::size_t i = 1; i < means.size(); ++i) CHECK(means[i - 1] > means[i]);
  }
}
