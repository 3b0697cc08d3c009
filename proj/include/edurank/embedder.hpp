#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <vector>

namespace edurank {

/// Sentence-level embedding backend used to build oracle labels. The
/// contract requires bitwise determinism: the same text must produce the
/// same vector within one process (and, for the hashing embedder, across
/// processes too).
class SemanticEmbedder {
 public:
  virtual ~SemanticEmbedder() = default;
  virtual std::vector<Eigen::VectorXd> embed(const std::vector<std::string>& texts) const = 0;
  virtual int dim() const = 0;
  virtual bool deterministic() const { return true; }
  virtual std::string id() const = 0;
};

/// Feature-hashes lowercased word unigrams into signed buckets and
/// L2-normalizes. No model downloads, fully reproducible; the production
/// sentence encoder is wrapped behind the same interface.
class HashingEmbedder : public SemanticEmbedder {
 public:
  explicit HashingEmbedder(int dim = 256) : dim_(dim) {}

  std::vector<Eigen::VectorXd> embed(const std::vector<std::string>& texts) const override;
  Eigen::VectorXd embed_one(const std::string& text) const;
  int dim() const override { return dim_; }
  std::string id() const override { return "hash-unigram-" + std::to_string(dim_); }

 private:
  int dim_;
};

std::unique_ptr<SemanticEmbedder> make_embedder(const std::string& id);

}  // namespace edurank
