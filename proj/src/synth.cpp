#include "edurank/synth.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

#include "edurank/errors.hpp"
#include "edurank/hashing.hpp"
#include "edurank/rng.hpp"

namespace edurank {

namespace {

constexpr int kDocs = 5;
constexpr int kEdusPerDoc = 30;
constexpr int kTopicPool = 24;
constexpr int kNoisePool = 30;
constexpr int kMarkerPool = 8;  // anti-topic words confined to bottom EDUs
constexpr int kTopicsPerSet = 20;

// Per-document EDU counts by type {query6, mid3, mid2, low1, bottom0}; rows
// are planted ranks (best document first). Topic-word totals per row:
// 90, 80, 70, 61, 54 - strictly decreasing, so the oracle ranking is unique.
constexpr int kComposition[kDocs][5] = {
    {4, 18, 5, 2, 1},
    {3, 13, 10, 3, 1},
    {2, 10, 12, 4, 2},
    {1, 8, 13, 5, 3},
    {0, 6, 15, 6, 3},
};

// Topic words per EDU for each type.
constexpr int kTopicWords[5] = {6, 3, 2, 1, 0};
constexpr int kMarkerWords[5] = {0, 0, 0, 0, 4};

// The set's 20 topic words form 5 aspects of 4 words. Each query EDU commits
// to one aspect (all 4 of its words, plus 2 topic words from elsewhere), so
// query EDUs have distinct lexical identities instead of six interchangeable
// topic draws. Every query EDU still carries exactly 6 topic words, so the
// salience tiers and the oracle ranking are unchanged by aspect assignment.
constexpr int kAspects = 5;
constexpr int kAspectWords = 4;
const std::vector<std::vector<int>> kQueryAspects = {
    {0, 1, 2, 3},  // rank 0: four query EDUs
    {4, 0, 1},     // rank 1
    {2, 3},        // rank 2
    {4},           // rank 3
    {},            // rank 4
};

struct Vocabulary {
  std::vector<std::string> topic;
  std::vector<std::string> noise;
  std::vector<std::string> marker;
};

// Picks words whose hash buckets are unique under both dimensions, so no two
// vocabulary words (or the period) ever share a feature.
Vocabulary build_vocabulary(int token_dim, int embed_dim) {
  const int needed = kTopicPool + kNoisePool + kMarkerPool;
  if (token_dim < needed + 1 || embed_dim < needed + 1)
    throw ConfigError("synthetic benchmark needs at least " + std::to_string(needed + 1) +
                      " buckets in every feature space");
  std::set<int> used_tok, used_emb;
  used_tok.insert(bucket_sign(".", token_dim).bucket);
  used_emb.insert(bucket_sign(".", embed_dim).bucket);

  std::vector<std::string> words;
  for (int candidate = 0; static_cast<int>(words.size()) < needed; ++candidate) {
    std::string w = "w" + std::to_string(candidate);
    int bt = bucket_sign(w, token_dim).bucket;
    int be = bucket_sign(w, embed_dim).bucket;
    if (used_tok.count(bt) || used_emb.count(be)) continue;
    used_tok.insert(bt);
    used_emb.insert(be);
    words.push_back(std::move(w));
  }

  Vocabulary v;
  v.topic.assign(words.begin(), words.begin() + kTopicPool);
  v.noise.assign(words.begin() + kTopicPool, words.begin() + kTopicPool + kNoisePool);
  v.marker.assign(words.begin() + kTopicPool + kNoisePool, words.end());
  return v;
}

std::vector<std::string> pick(const std::vector<std::string>& pool, int count, Rng& rng) {
  std::vector<int> idx = rng.sample_without_replacement(static_cast<int>(pool.size()), count);
  std::vector<std::string> out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(pool[static_cast<std::size_t>(i)]);
  return out;
}

DocumentSet make_set(const std::string& set_id, const Vocabulary& vocab, Rng& rng) {
  std::vector<std::string> topics = pick(vocab.topic, kTopicsPerSet, rng);

  // Planted rank of each document position.
  std::vector<int> rank_of_position(kDocs);
  std::iota(rank_of_position.begin(), rank_of_position.end(), 0);
  rng.shuffle(rank_of_position);

  DocumentSet set;
  set.set_id = set_id;
  WhitespaceTokenizer tokenizer;
  for (int pos = 0; pos < kDocs; ++pos) {
    int rank = rank_of_position[static_cast<std::size_t>(pos)];
    std::vector<std::pair<int, int>> edu_types;  // (type, aspect or -1)
    for (int type = 0; type < 5; ++type)
      for (int n = 0; n < kComposition[rank][type]; ++n)
        edu_types.emplace_back(type, type == 0 ? kQueryAspects[rank][n] : -1);
    rng.shuffle(edu_types);

    std::string text;
    for (int e = 0; e < kEdusPerDoc; ++e) {
      auto [type, aspect] = edu_types[static_cast<std::size_t>(e)];
      std::vector<std::string> content;
      if (aspect >= 0) {
        // 4 aspect words plus 2 drawn from the other aspects: still 6 topic
        // words, so the salience tier is unchanged.
        content.assign(topics.begin() + aspect * kAspectWords,
                       topics.begin() + (aspect + 1) * kAspectWords);
        std::vector<std::string> rest;
        for (int t = 0; t < kTopicsPerSet; ++t)
          if (t / kAspectWords != aspect) rest.push_back(topics[static_cast<std::size_t>(t)]);
        for (std::string& w : pick(rest, kTopicWords[type] - kAspectWords, rng))
          content.push_back(std::move(w));
      } else {
        content = pick(topics, kTopicWords[type], rng);
      }
      for (std::string& w : pick(vocab.marker, kMarkerWords[type], rng))
        content.push_back(std::move(w));
      int fill = 8 - static_cast<int>(content.size());
      for (std::string& w : pick(vocab.noise, fill, rng)) content.push_back(std::move(w));
      rng.shuffle(content);
      for (const std::string& w : content) {
        if (!text.empty()) text += ' ';
        text += w;
      }
      text += " .";
    }
    set.documents.emplace_back(set_id + "/doc-" + std::to_string(pos), text, tokenizer);
  }

  std::string summary;
  for (const std::string& w : topics) {
    if (!summary.empty()) summary += ' ';
    summary += w;
  }
  set.reference_summary = summary;
  return set;
}

std::string padded(int n) {
  std::string s = std::to_string(n);
  while (s.size() < 4) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

SynthCorpus generate_synthetic(const SynthConfig& cfg) {
  if (cfg.train_sets < 1 || cfg.test_sets < 0)
    throw ConfigError("synthetic benchmark needs at least one training set");
  Vocabulary vocab = build_vocabulary(cfg.token_dim, cfg.embed_dim);
  SynthCorpus out;
  for (int i = 0; i < cfg.train_sets; ++i) {
    Rng rng(derive_seed(cfg.seed, "synth-train", static_cast<std::uint64_t>(i), 0));
    out.train.push_back(make_set("synth-train-" + padded(i), vocab, rng));
  }
  for (int i = 0; i < cfg.test_sets; ++i) {
    Rng rng(derive_seed(cfg.seed, "synth-test", static_cast<std::uint64_t>(i), 0));
    out.test.push_back(make_set("synth-test-" + padded(i), vocab, rng));
  }
  return out;
}

}  // namespace edurank
