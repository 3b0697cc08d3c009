#include "edurank/truncation.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "edurank/errors.hpp"
#include "edurank/hashing.hpp"
#include "edurank/metrics.hpp"
#include "edurank/rng.hpp"

namespace edurank {

using nlohmann::json;

std::string to_string(PlanVariant v) {
  switch (v) {
    case PlanVariant::kFull: return "full";
    case PlanVariant::kNoRank: return "no_rank";
    case PlanVariant::kNoFilter: return "no_filter";
    case PlanVariant::kNoBoth: return "no_both";
    case PlanVariant::kEven: return "even";
  }
  return "full";
}

PlanVariant plan_variant_from_string(const std::string& name) {
  if (name == "full") return PlanVariant::kFull;
  if (name == "no_rank") return PlanVariant::kNoRank;
  if (name == "no_filter") return PlanVariant::kNoFilter;
  if (name == "no_both") return PlanVariant::kNoBoth;
  if (name == "even") return PlanVariant::kEven;
  throw ConfigError("unknown truncation variant '" + name + "'");
}

std::vector<EduId> TruncationPlan::dropped_edus() const {
  std::vector<EduId> out;
  for (int d = 0; d < static_cast<int>(kept.size()); ++d)
    for (int e = 0; e < static_cast<int>(kept[static_cast<std::size_t>(d)].size()); ++e)
      if (!kept[static_cast<std::size_t>(d)][static_cast<std::size_t>(e)]) out.push_back({d, e});
  return out;
}

namespace {

int separator_token_count(const std::string& separator) {
  WhitespaceTokenizer tok;
  return static_cast<int>(tok.tokenize(separator).size());
}

int span_tokens(const EduSpan& s) { return s.end - s.start; }

// Tokens contributed by one document under the plan (kept runs, then cap).
int doc_used(const SegmentedSet& set, const TruncationPlan& plan, int doc) {
  int t = 0;
  const auto& spans = set.spans[static_cast<std::size_t>(doc)];
  for (std::size_t e = 0; e < spans.size(); ++e)
    if (plan.kept[static_cast<std::size_t>(doc)][e]) t += span_tokens(spans[e]);
  int cap = plan.token_caps[static_cast<std::size_t>(doc)];
  if (cap >= 0) t = std::min(t, cap);
  return t;
}

int compute_used(const SegmentedSet& set, const TruncationPlan& plan) {
  int sep = separator_token_count(plan.separator);
  int total = 0, nonempty = 0;
  for (int doc : plan.doc_order) {
    int t = doc_used(set, plan, doc);
    if (t > 0) {
      total += t;
      ++nonempty;
    }
  }
  if (nonempty > 1) total += (nonempty - 1) * sep;
  return total;
}

void check_scores(const SegmentedSet& set, const Eigen::VectorXd& doc_relevance,
                  const Eigen::VectorXd& edu_salience) {
  if (doc_relevance.size() != static_cast<Eigen::Index>(set.base.documents.size()))
    throw ContractViolation("relevance scores do not cover every document");
  if (edu_salience.size() != static_cast<Eigen::Index>(set.total_edus()))
    throw ContractViolation("salience scores do not cover every EDU");
}

TruncationPlan blank_plan(const SegmentedSet& set, int budget, const PlanOptions& options,
                          PlanVariant variant) {
  TruncationPlan plan;
  plan.set_id = set.base.set_id;
  plan.budget = budget;
  plan.separator = options.separator;
  plan.variant = variant;
  plan.doc_order.resize(set.base.documents.size());
  std::iota(plan.doc_order.begin(), plan.doc_order.end(), 0);
  plan.kept.reserve(set.spans.size());
  for (const auto& spans : set.spans)
    plan.kept.emplace_back(spans.size(), true);
  plan.token_caps.assign(set.base.documents.size(), -1);
  return plan;
}

// Greedy EDU dropping for a fixed document order.
TruncationPlan greedy_filter_plan(const SegmentedSet& set, std::vector<int> doc_order,
                                  const Eigen::VectorXd& edu_salience, int budget,
                                  const PlanOptions& options, PlanVariant variant) {
  if (budget < 1) throw ConfigError("truncation budget must be at least 1 token");
  TruncationPlan plan = blank_plan(set, budget, options, variant);
  plan.doc_order = std::move(doc_order);

  std::vector<int> rank_of(plan.doc_order.size());
  for (std::size_t r = 0; r < plan.doc_order.size(); ++r)
    rank_of[static_cast<std::size_t>(plan.doc_order[r])] = static_cast<int>(r);

  struct Entry {
    int doc, edu, flat;
  };
  std::vector<Entry> entries;
  int flat = 0;
  for (int d = 0; d < static_cast<int>(set.spans.size()); ++d)
    for (int e = 0; e < static_cast<int>(set.spans[static_cast<std::size_t>(d)].size()); ++e)
      entries.push_back({d, e, flat++});

  // Drop order ends at the EDU kept longest. Ties in salience give up EDUs of
  // worse-ranked documents first, then later EDUs within a document.
  std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (options.mode == DropMode::kGlobal) {
      double sa = edu_salience[a.flat], sb = edu_salience[b.flat];
      if (sa != sb) return sa < sb;
    }
    int ra = rank_of[static_cast<std::size_t>(a.doc)], rb = rank_of[static_cast<std::size_t>(b.doc)];
    if (ra != rb) return ra > rb;
    return a.edu > b.edu;
  });

  int used = compute_used(set, plan);
  std::size_t next = 0;
  while (used > budget && next + 1 < entries.size()) {
    const Entry& drop = entries[next++];
    plan.kept[static_cast<std::size_t>(drop.doc)][static_cast<std::size_t>(drop.edu)] = false;
    used = compute_used(set, plan);
  }
  if (used > budget) {
    // A single EDU remains and still overruns: keep a front prefix of it.
    const Entry& last = entries.back();
    plan.token_caps[static_cast<std::size_t>(last.doc)] = budget;
    plan.degraded = true;
    used = compute_used(set, plan);
  }
  plan.used_tokens = used;
  return plan;
}

TruncationPlan tail_drop_plan(const SegmentedSet& set, std::vector<int> doc_order, int budget,
                              const PlanOptions& options, PlanVariant variant) {
  if (budget < 1) throw ConfigError("truncation budget must be at least 1 token");
  TruncationPlan plan = blank_plan(set, budget, options, variant);
  plan.doc_order = std::move(doc_order);
  int sep = separator_token_count(plan.separator);

  int remaining = budget;
  bool first_placed = false;
  for (int doc : plan.doc_order) {
    int len = 0;
    for (const EduSpan& s : set.spans[static_cast<std::size_t>(doc)]) len += span_tokens(s);
    if (len == 0) continue;
    int cost_sep = first_placed ? sep : 0;
    if (remaining - cost_sep < 1) {
      // Nothing of this document fits; drop it and everything after.
      std::fill(plan.kept[static_cast<std::size_t>(doc)].begin(),
                plan.kept[static_cast<std::size_t>(doc)].end(), false);
      continue;
    }
    int take = std::min(len, remaining - cost_sep);
    if (take < len) plan.token_caps[static_cast<std::size_t>(doc)] = take;
    remaining -= cost_sep + take;
    first_placed = true;
  }
  plan.used_tokens = compute_used(set, plan);
  return plan;
}

}  // namespace

TruncationPlan build_plan(const SegmentedSet& set, const Eigen::VectorXd& doc_relevance,
                          const Eigen::VectorXd& edu_salience, int budget,
                          const PlanOptions& options) {
  check_scores(set, doc_relevance, edu_salience);
  return greedy_filter_plan(set, argsort_desc(doc_relevance), edu_salience, budget, options,
                            PlanVariant::kFull);
}

TruncationPlan even_truncation(const SegmentedSet& set, int budget) {
  const int n = static_cast<int>(set.base.documents.size());
  if (n < 1) throw ContractViolation("even truncation of an empty set");
  if (budget < n)
    throw ConfigError("even truncation needs a budget of at least one token per document");
  PlanOptions options;
  options.separator = "";  // the evenly-split baseline concatenates raw prefixes
  TruncationPlan plan = blank_plan(set, budget, options, PlanVariant::kEven);
  int quota = budget / n;
  plan.token_caps.assign(static_cast<std::size_t>(n), quota);
  plan.used_tokens = compute_used(set, plan);
  return plan;
}

TruncationPlan ablation_plan(const SegmentedSet& set, const Eigen::VectorXd& doc_relevance,
                             const Eigen::VectorXd& edu_salience, int budget, PlanVariant variant,
                             std::uint64_t seed, const PlanOptions& options) {
  switch (variant) {
    case PlanVariant::kFull:
      return build_plan(set, doc_relevance, edu_salience, budget, options);
    case PlanVariant::kEven:
      return even_truncation(set, budget);
    default:
      break;
  }
  std::vector<int> order(set.base.documents.size());
  std::iota(order.begin(), order.end(), 0);
  if (variant == PlanVariant::kNoRank || variant == PlanVariant::kNoBoth) {
    Rng rng(derive_seed(seed, "doc-permutation", fnv1a64(set.base.set_id), 0));
    rng.shuffle(order);
  } else {
    if (doc_relevance.size() != static_cast<Eigen::Index>(set.base.documents.size()))
      throw ContractViolation("relevance scores do not cover every document");
    order = argsort_desc(doc_relevance);
  }
  if (variant == PlanVariant::kNoRank) {
    if (edu_salience.size() != static_cast<Eigen::Index>(set.total_edus()))
      throw ContractViolation("salience scores do not cover every EDU");
    return greedy_filter_plan(set, std::move(order), edu_salience, budget, options, variant);
  }
  return tail_drop_plan(set, std::move(order), budget, options, variant);
}

AssembledInput assemble_input(const TruncationPlan& plan, const SegmentedSet& set) {
  const std::size_t n = set.base.documents.size();
  if (plan.doc_order.size() != n || plan.kept.size() != n || plan.token_caps.size() != n)
    throw ContractViolation("plan does not match the set's document count");
  for (std::size_t d = 0; d < n; ++d)
    if (plan.kept[d].size() != set.spans[d].size())
      throw ContractViolation("plan does not match the set's EDU counts");

  WhitespaceTokenizer tok;
  std::vector<std::string> sep_tokens = tok.tokenize(plan.separator);

  AssembledInput out;
  bool first_placed = false;
  for (int doc : plan.doc_order) {
    const Document& document = set.base.documents[static_cast<std::size_t>(doc)];
    std::vector<std::string> doc_tokens;
    for (std::size_t e = 0; e < set.spans[static_cast<std::size_t>(doc)].size(); ++e) {
      if (!plan.kept[static_cast<std::size_t>(doc)][e]) continue;
      const EduSpan& s = set.spans[static_cast<std::size_t>(doc)][e];
      doc_tokens.insert(doc_tokens.end(), document.tokens.begin() + s.start,
                        document.tokens.begin() + s.end);
    }
    int cap = plan.token_caps[static_cast<std::size_t>(doc)];
    if (cap >= 0 && static_cast<int>(doc_tokens.size()) > cap)
      doc_tokens.resize(static_cast<std::size_t>(cap));
    if (doc_tokens.empty()) continue;
    if (first_placed)
      out.tokens.insert(out.tokens.end(), sep_tokens.begin(), sep_tokens.end());
    out.tokens.insert(out.tokens.end(), doc_tokens.begin(), doc_tokens.end());
    first_placed = true;
  }
  if (static_cast<int>(out.tokens.size()) != plan.used_tokens)
    throw ContractViolation("assembled input holds " + std::to_string(out.tokens.size()) +
                            " tokens but the plan accounts for " +
                            std::to_string(plan.used_tokens));

  for (std::size_t i = 0; i < out.tokens.size(); ++i) {
    if (i) out.text += ' ';
    out.text += out.tokens[i];
  }
  return out;
}

void write_plans(const std::filesystem::path& path, const std::vector<TruncationPlan>& plans) {
  std::ofstream out(path);
  if (!out.is_open()) throw FormatError("cannot write plan file " + path.string());
  for (const TruncationPlan& p : plans) {
    json j;
    j["set_id"] = p.set_id;
    j["doc_order"] = p.doc_order;
    json dropped = json::array();
    for (EduId id : p.dropped_edus()) dropped.push_back(json::array({id.doc, id.edu}));
    j["dropped_edus"] = std::move(dropped);
    j["used_tokens"] = p.used_tokens;
    j["budget"] = p.budget;
    j["variant"] = to_string(p.variant);
    j["separator"] = p.separator;
    j["token_caps"] = p.token_caps;
    j["degraded"] = p.degraded;
    json counts = json::array();
    for (const auto& doc : p.kept) counts.push_back(doc.size());
    j["edu_counts"] = std::move(counts);
    out << j.dump() << '\n';
  }
}

std::vector<TruncationPlan> read_plans(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw FormatError("cannot open plan file " + path.string());
  std::vector<TruncationPlan> out;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw FormatError("malformed plan line " + std::to_string(line_no));
    TruncationPlan p;
    p.set_id = j.at("set_id").get<std::string>();
    p.doc_order = j.at("doc_order").get<std::vector<int>>();
    p.used_tokens = j.at("used_tokens").get<int>();
    p.budget = j.at("budget").get<int>();
    p.variant = plan_variant_from_string(j.at("variant").get<std::string>());
    p.separator = j.at("separator").get<std::string>();
    p.token_caps = j.at("token_caps").get<std::vector<int>>();
    p.degraded = j.at("degraded").get<bool>();
    for (const auto& c : j.at("edu_counts"))
      p.kept.emplace_back(c.get<std::size_t>(), true);
    for (const auto& de : j.at("dropped_edus"))
      p.kept[de[0].get<std::size_t>()][de[1].get<std::size_t>()] = false;
    out.push_back(std::move(p));
  }
  return out;
}

void write_inputs(const std::filesystem::path& path,
                  const std::vector<std::pair<std::string, std::string>>& set_id_to_text) {
  std::ofstream out(path);
  if (!out.is_open()) throw FormatError("cannot write assembled-input file " + path.string());
  for (const auto& [set_id, text] : set_id_to_text) {
    json j;
    j["set_id"] = set_id;
    j["input_text"] = text;
    out << j.dump() << '\n';
  }
}

}  // namespace edurank
