#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edurank/corpus.hpp"

namespace edurank {

enum class DropMode {
  kGlobal,       // drop lowest-salience EDUs across the whole set
  kPerDocument,  // drop tail EDUs of the worst-ranked documents first
};

enum class PlanVariant { kFull, kNoRank, kNoFilter, kNoBoth, kEven };

std::string to_string(PlanVariant v);
PlanVariant plan_variant_from_string(const std::string& name);

struct PlanOptions {
  std::string separator = "<doc-sep>";
  DropMode mode = DropMode::kGlobal;
};

// Budget-respecting assembly recipe: documents in doc_order, each document's
// kept EDU runs in original order, optionally capped to a front token quota
// (token_caps[i] = -1 means uncapped; used by even truncation and by the
// degraded single-EDU case).
struct TruncationPlan {
  std::string set_id;
  std::vector<int> doc_order;
  std::vector<std::vector<bool>> kept;  // [doc][edu], indexed by original doc
  std::vector<int> token_caps;          // per original doc
  int budget = 0;
  int used_tokens = 0;
  std::string separator = "<doc-sep>";
  bool degraded = false;
  PlanVariant variant = PlanVariant::kFull;

  std::vector<EduId> dropped_edus() const;
};

// Orders documents by descending relevance (ties: ascending index) and drops
// EDUs, lowest salience first, until the assembled input fits the budget.
// Separator tokens count against the budget. If even the single most salient
// EDU overruns the budget the plan keeps a front prefix of it and is flagged
// degraded.
TruncationPlan build_plan(const SegmentedSet& set, const Eigen::VectorXd& doc_relevance,
                          const Eigen::VectorXd& edu_salience, int budget,
                          const PlanOptions& options = {});

// The evenly-split baseline: floor(budget / n) tokens from the front of every
// document, original document order, no separators.
TruncationPlan even_truncation(const SegmentedSet& set, int budget);

// Ablations: no_rank randomizes the document order (seeded) but keeps EDU
// filtering; no_filter keeps relevance ordering but drops tail tokens instead
// of low-salience EDUs; no_both randomizes and tail-drops.
TruncationPlan ablation_plan(const SegmentedSet& set, const Eigen::VectorXd& doc_relevance,
                             const Eigen::VectorXd& edu_salience, int budget, PlanVariant variant,
                             std::uint64_t seed, const PlanOptions& options = {});

struct AssembledInput {
  std::vector<std::string> tokens;
  std::string text;
};

// Concatenates the kept token runs per the plan; output length equals
// plan.used_tokens.
AssembledInput assemble_input(const TruncationPlan& plan, const SegmentedSet& set);

void write_plans(const std::filesystem::path& path, const std::vector<TruncationPlan>& plans);
std::vector<TruncationPlan> read_plans(const std::filesystem::path& path);
void write_inputs(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& set_id_to_text);

}  // namespace edurank
