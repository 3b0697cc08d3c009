#include "edurank/embedder.hpp"

#include "edurank/corpus.hpp"
#include "edurank/errors.hpp"
#include "edurank/hashing.hpp"

namespace edurank {

Eigen::VectorXd HashingEmbedder::embed_one(const std::string& text) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim_);
  WhitespaceTokenizer tok;
  for (const std::string& word : tok.tokenize(text)) {
    auto [bucket, sign] = bucket_sign(to_lower_ascii(word), dim_);
    v[bucket] += sign;
  }
  double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

std::vector<Eigen::VectorXd> HashingEmbedder::embed(
    const std::vector<std::string>& texts) const {
  std::vector<Eigen::VectorXd> out;
  out.reserve(texts.size());
  for (const std::string& t : texts) out.push_back(embed_one(t));
  return out;
}

std::unique_ptr<SemanticEmbedder> make_embedder(const std::string& id) {
  if (id == "hash-unigram-256" || id == "hash") return std::make_unique<HashingEmbedder>(256);
  throw ConfigError("unknown embedder '" + id + "'");
}

}  // namespace edurank
