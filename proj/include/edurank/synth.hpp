#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edurank/corpus.hpp"

namespace edurank {

// Planted-signal benchmark: 5 documents x 30 EDUs x 9 tokens per set. Every
// vocabulary word occupies its own feature bucket under both the token
// encoder (token_dim) and the semantic embedder (embed_dim), so the oracle
// cosine tiers are exact:
//   - 10 query EDUs per set carry 6 topic words each,
//   - mid EDUs carry 2-3 topic words,
//   - 20 low EDUs carry exactly 1,
//   - 10 bottom EDUs carry none but hold anti-topic marker words.
// Per-document topic-word totals decrease strictly along the planted ranking,
// and document positions are permuted per set so position alone predicts
// nothing.
struct SynthConfig {
  int train_sets = 64;
  int test_sets = 16;
  int token_dim = 64;   // >= 63 distinct buckets needed
  int embed_dim = 256;  // likewise
  std::uint64_t seed = 7;
};

struct SynthCorpus {
  std::vector<DocumentSet> train;
  std::vector<DocumentSet> test;
};

SynthCorpus generate_synthetic(const SynthConfig& cfg);

}  // namespace edurank
