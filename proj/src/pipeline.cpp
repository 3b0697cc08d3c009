#include "edurank/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <utility>

#include <json.hpp>

#include "edurank/baselines.hpp"
#include "edurank/embedder.hpp"
#include "edurank/errors.hpp"
#include "edurank/metrics.hpp"
#include "edurank/oracle.hpp"
#include "edurank/truncation.hpp"

namespace edurank {

using nlohmann::json;

namespace {

constexpr int kPrecisionKs[] = {10, 20, 50, 100};
constexpr int kNdcgKs[] = {1, 3, 5};

int guard(const std::function<void()>& body) {
  try {
    body();
    return kExitOk;
  } catch (const TrainingDivergence& e) {
    std::cerr << "error: " << e.what() << " (batch " << e.batch_index
              << ", rank loss " << e.rank_loss << ", filter loss " << e.filter_loss << ")\n";
    return kExitDivergence;
  } catch (const CheckpointMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitCheckpoint;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

std::unique_ptr<SegmenterBackend> make_segmenter(const std::string& id) {
  if (id == "fallback-v1") return std::make_unique<FallbackSegmenter>();
  throw ConfigError("unknown segmenter id '" + id + "'");
}

void echo_config(const PipelineConfig& cfg) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(std::filesystem::path(cfg.out_dir) / "effective-config.json");
  if (!out.is_open()) throw FormatError("cannot write effective config under " + cfg.out_dir);
  out << cfg.to_json_string();
}

std::filesystem::path split_file(const PipelineConfig& cfg, const std::string& kind,
                                 const std::string& split) {
  return std::filesystem::path(cfg.out_dir) / (kind + "." + split + ".jsonl");
}

struct SplitData {
  std::vector<SegmentedSet> sets;
  std::vector<OracleLabels> labels;

  std::vector<LabeledSet> labeled() const {
    std::vector<LabeledSet> out;
    for (std::size_t i = 0; i < sets.size(); ++i) out.emplace_back(&sets[i], &labels[i]);
    return out;
  }
};

SplitData load_split(const PipelineConfig& cfg, const std::string& split) {
  WhitespaceTokenizer tokenizer;
  SplitData data;
  data.sets = read_segmented_cache(split_file(cfg, "segmented", split), tokenizer,
                                   cfg.training.chunk_size);
  std::sort(data.sets.begin(), data.sets.end(),
            [](const SegmentedSet& a, const SegmentedSet& b) {
              return a.base.set_id < b.base.set_id;
            });
  std::vector<OracleLabels> raw = read_labels(split_file(cfg, "labels", split));
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < raw.size(); ++i) by_id[raw[i].set_id] = i;
  for (const SegmentedSet& set : data.sets) {
    auto it = by_id.find(set.base.set_id);
    if (it == by_id.end())
      throw ConfigError("set " + set.base.set_id + " has no oracle labels; re-run prepare");
    data.labels.push_back(raw[it->second]);
  }
  return data;
}

std::string eval_split_name(const PipelineConfig& cfg) {
  return cfg.test_corpus.empty() ? "train" : "test";
}

void few_shot_subsample(SplitData& data, double fraction, std::uint64_t seed) {
  if (fraction >= 1.0) return;
  std::size_t keep = static_cast<std::size_t>(
      std::max(1.0, std::floor(fraction * static_cast<double>(data.sets.size()) + 0.5)));
  std::vector<int> order(data.sets.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "few-shot", 0, 0));
  rng.shuffle(order);
  order.resize(keep);
  std::sort(order.begin(), order.end());
  SplitData kept;
  for (int i : order) {
    kept.sets.push_back(std::move(data.sets[static_cast<std::size_t>(i)]));
    kept.labels.push_back(std::move(data.labels[static_cast<std::size_t>(i)]));
  }
  data = std::move(kept);
}

CheckpointMeta expected_meta(const PipelineConfig& cfg, const TokenEncoderBackend& backend) {
  CheckpointMeta meta;
  meta.d = backend.dim();
  meta.d_h = backend.dim();
  meta.c = cfg.training.chunk_size;
  meta.backend_id = backend.id();
  return meta;
}

std::filesystem::path checkpoint_path(const PipelineConfig& cfg) {
  if (!cfg.checkpoint.empty()) return cfg.checkpoint;
  return std::filesystem::path(cfg.out_dir) / "best.ckpt";
}

// ---- evaluation plumbing ----

std::vector<int> label_offsets(const OracleLabels& labels) {
  std::vector<int> offs;
  int at = 0;
  for (const auto& doc : labels.edu_salience) {
    offs.push_back(at);
    at += static_cast<int>(doc.size());
  }
  return offs;
}

Eigen::VectorXd flat_oracle_salience(const OracleLabels& labels) {
  Eigen::VectorXd v(labels.total_edus());
  int at = 0;
  for (const auto& doc : labels.edu_salience)
    for (double s : doc) v[at++] = s;
  return v;
}

// Per-set rankings a method produces; metrics aggregate over sets.
struct MethodRanking {
  std::vector<int> edu_desc;  // best first; empty = method ranks no EDUs
  std::vector<int> edu_asc;   // worst first
  std::vector<int> doc_desc;
};

struct ReportAccumulator {
  std::map<int, double> precision, filter_precision;
  std::map<int, double> ndcg;
  double mrr1 = 0.0, mrr2 = 0.0;
  int sets = 0, mrr2_sets = 0;
  bool with_edus = true;

  void add(const MethodRanking& r, const OracleLabels& labels) {
    ++sets;
    const int n = static_cast<int>(labels.doc_ranking.size());
    for (int k : kNdcgKs) ndcg[k] += ndcg_at_k(r.doc_desc, labels.doc_ranking, k);
    mrr1 += mrr_first(r.doc_desc, labels.doc_ranking);
    if (n >= 2) {
      mrr2 += mrr_second(r.doc_desc, labels.doc_ranking);
      ++mrr2_sets;
    } else {
      std::cerr << "[metrics] set " << labels.set_id
                << " has a single document; skipped for the rank-2 reciprocal rank\n";
    }
    if (r.edu_desc.empty()) {
      with_edus = false;
      return;
    }
    const int m = labels.total_edus();
    Eigen::VectorXd oracle = flat_oracle_salience(labels);
    std::vector<int> oracle_desc = argsort_desc(oracle);
    std::vector<int> oracle_asc = argsort_asc(oracle);
    for (int k : kPrecisionKs) {
      int kc = std::min(k, m);
      precision[k] += precision_at_k(
          r.edu_desc, std::vector<int>(oracle_desc.begin(), oracle_desc.begin() + kc), kc);
      filter_precision[k] += precision_at_k(
          r.edu_asc, std::vector<int>(oracle_asc.begin(), oracle_asc.begin() + kc), kc);
    }
  }

  MetricsReport finish() const {
    MetricsReport rep;
    rep.num_sets = sets;
    double n = sets > 0 ? static_cast<double>(sets) : 1.0;
    if (with_edus) {
      for (const auto& [k, v] : precision) rep.precision_at[k] = v / n;
      for (const auto& [k, v] : filter_precision) rep.filter_precision_at[k] = v / n;
    }
    for (const auto& [k, v] : ndcg) rep.ndcg_at[k] = v / n;
    rep.mrr_1st = mrr1 / n;
    rep.mrr_2nd = mrr2_sets > 0 ? mrr2 / static_cast<double>(mrr2_sets) : 0.0;
    return rep;
  }
};

}  // namespace

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.is_open()) throw ConfigError("cannot open config file " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + path.string() + " is not valid JSON");

  PipelineConfig cfg;
  if (j.contains("corpus")) {
    const json& c = j.at("corpus");
    cfg.train_corpus = c.value("train", "");
    cfg.val_corpus = c.value("val", "");
    cfg.test_corpus = c.value("test", "");
  }
  cfg.segmenter_id = j.value("segmenter_id", cfg.segmenter_id);
  cfg.embedder_id = j.value("embedder_id", cfg.embedder_id);
  cfg.backend_id = j.value("backend_id", cfg.backend_id);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.budget = j.value("budget", cfg.budget);
  cfg.variant = j.value("variant", cfg.variant);
  cfg.separator = j.value("separator", cfg.separator);
  cfg.few_shot = j.value("few_shot", cfg.few_shot);
  cfg.aggregation = j.value("aggregation", cfg.aggregation);
  cfg.checkpoint = j.value("checkpoint", cfg.checkpoint);
  cfg.resume_from = j.value("resume_from", cfg.resume_from);
  if (j.contains("training")) {
    const json& t = j.at("training");
    TrainingConfig& tc = cfg.training;
    tc.lambda = t.value("lambda", tc.lambda);
    tc.k = t.value("k", tc.k);
    tc.k_q = t.value("k_q", tc.k_q);
    tc.k_f_fraction = t.value("k_f_fraction", tc.k_f_fraction);
    tc.learning_rate = t.value("learning_rate", tc.learning_rate);
    tc.batch_size = t.value("batch_size", tc.batch_size);
    tc.epochs = t.value("epochs", tc.epochs);
    tc.pair_samples_per_set = t.value("pair_samples_per_set", tc.pair_samples_per_set);
    tc.chunk_size = t.value("chunk_size", tc.chunk_size);
  }
  cfg.training.seed = cfg.seed;  // one seed governs every stochastic component
  return cfg;
}

void PipelineConfig::validate() const {
  if (train_corpus.empty()) throw ConfigError("config is missing corpus.train");
  if (out_dir.empty()) throw ConfigError("config is missing out_dir");
  if (budget < 1) throw ConfigError("budget must be >= 1");
  if (few_shot <= 0.0 || few_shot > 1.0) throw ConfigError("few_shot must lie in (0, 1]");
  plan_variant_from_string(variant);
  aggregation_from_string(aggregation);
  training.validate();
}

std::string PipelineConfig::to_json_string() const {
  json j;
  j["corpus"] = {{"train", train_corpus}, {"val", val_corpus}, {"test", test_corpus}};
  j["segmenter_id"] = segmenter_id;
  j["embedder_id"] = embedder_id;
  j["backend_id"] = backend_id;
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  j["budget"] = budget;
  j["variant"] = variant;
  j["separator"] = separator;
  j["few_shot"] = few_shot;
  j["aggregation"] = aggregation;
  j["checkpoint"] = checkpoint;
  j["resume_from"] = resume_from;
  j["training"] = {{"lambda", training.lambda},
                   {"k", training.k},
                   {"k_q", training.k_q},
                   {"k_f_fraction", training.k_f_fraction},
                   {"learning_rate", training.learning_rate},
                   {"batch_size", training.batch_size},
                   {"epochs", training.epochs},
                   {"pair_samples_per_set", training.pair_samples_per_set},
                   {"chunk_size", training.chunk_size}};
  return j.dump(2) + "\n";
}

int cmd_prepare(const PipelineConfig& cfg) {
  return guard([&] {
    cfg.validate();
    auto segmenter = make_segmenter(cfg.segmenter_id);
    auto embedder = make_embedder(cfg.embedder_id);
    Aggregation agg = aggregation_from_string(cfg.aggregation);
    WhitespaceTokenizer tokenizer;

    struct Prepared {
      std::string split;
      std::vector<SegmentedSet> sets;
      std::vector<OracleLabels> labels;
    };
    std::vector<Prepared> all;
    std::vector<std::pair<std::string, std::string>> splits = {{"train", cfg.train_corpus}};
    if (!cfg.val_corpus.empty()) splits.emplace_back("val", cfg.val_corpus);
    if (!cfg.test_corpus.empty()) splits.emplace_back("test", cfg.test_corpus);

    for (const auto& [split, path] : splits) {
      std::vector<std::string> record_errors;
      std::vector<DocumentSet> corpus = load_corpus(path, tokenizer, &record_errors);
      for (const std::string& err : record_errors)
        std::cerr << "[prepare] " << path << ": " << err << '\n';

      Prepared p;
      p.split = split;
      for (DocumentSet& set : corpus) {
        if (!set.reference_summary || set.reference_summary->empty()) {
          std::cerr << "[prepare] set " << set.set_id
                    << " has no reference summary; skipped (no oracle labels possible)\n";
          continue;
        }
        SegmentedSet seg = segment_set(std::move(set), *segmenter, cfg.training.chunk_size);
        int k_f = default_filter_count(seg.total_edus(), cfg.training.k_f_fraction);
        p.labels.push_back(build_labels(seg, *embedder, cfg.training.k_q, k_f, agg));
        p.sets.push_back(std::move(seg));
      }
      std::vector<std::size_t> order(p.sets.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return p.sets[a].base.set_id < p.sets[b].base.set_id;
      });
      Prepared sorted;
      sorted.split = p.split;
      for (std::size_t i : order) {
        sorted.sets.push_back(std::move(p.sets[i]));
        sorted.labels.push_back(std::move(p.labels[i]));
      }
      all.push_back(std::move(sorted));
    }

    // All inputs parsed and labeled; only now touch the output directory.
    echo_config(cfg);
    for (const Prepared& p : all) {
      write_segmented_cache(split_file(cfg, "segmented", p.split), p.sets, tokenizer.id());
      write_labels(split_file(cfg, "labels", p.split), p.labels);
      std::cout << "[prepare] " << p.split << ": " << p.sets.size() << " sets labeled\n";
    }
  });
}

int cmd_train(const PipelineConfig& cfg) {
  return guard([&] {
    cfg.validate();
    auto backend = make_token_encoder(cfg.backend_id);
    SplitData train_data = load_split(cfg, "train");
    few_shot_subsample(train_data, cfg.few_shot, cfg.seed);
    if (train_data.sets.empty()) throw ConfigError("no training sets after few-shot subsampling");

    SplitData val_data;
    bool has_val = !cfg.val_corpus.empty();
    if (has_val) val_data = load_split(cfg, "val");

    const int d = backend->dim();
    RetrieverModel model(d, d, cfg.seed);
    Adam opt(model.parameters(), cfg.training.learning_rate);
    CheckpointMeta meta = expected_meta(cfg, *backend);

    int start_epoch = 0;
    if (!cfg.resume_from.empty())
      load_checkpoint(cfg.resume_from, model, meta, &opt, &start_epoch);

    echo_config(cfg);
    std::filesystem::path out_dir(cfg.out_dir);
    std::ofstream log(out_dir / "train-log.jsonl",
                      cfg.resume_from.empty() ? std::ios::trunc : std::ios::app);
    if (!log.is_open()) throw FormatError("cannot write training log under " + cfg.out_dir);

    std::vector<LabeledSet> train_labeled = train_data.labeled();
    std::vector<LabeledSet> val_labeled = has_val ? val_data.labeled() : std::vector<LabeledSet>();

    bool wrote_best = false;
    auto on_epoch = [&](const EpochStats& st, bool is_best) {
      json line;
      line["epoch"] = st.epoch;
      line["rank_loss"] = st.rank_loss;
      line["filter_loss"] = st.filter_loss;
      line["total"] = st.total;
      line["precision_at_k"] = st.precision_at_k;
      line["ndcg_at_3"] = st.ndcg_at_3;
      line["mrr_1st"] = st.mrr_1st;
      line["wall_seconds"] = st.wall_seconds;
      log << line.dump() << '\n';
      log.flush();
      if (is_best) {
        save_checkpoint(out_dir / "best.ckpt", model, meta, &opt, st.epoch);
        wrote_best = true;
      }
    };

    TrainResult res = em_train(train_labeled, model, opt, cfg.training, *backend,
                               has_val ? &val_labeled : nullptr, on_epoch, start_epoch);

    int last_epoch = res.history.empty() ? start_epoch : res.history.back().epoch;
    save_checkpoint(out_dir / "last.ckpt", model, meta, &opt, last_epoch);
    if (!wrote_best && cfg.checkpoint.empty())
      save_checkpoint(out_dir / "best.ckpt", model, meta, &opt, last_epoch);
    std::cout << "[train] " << res.history.size() << " epochs; best NDCG@3 "
              << res.best_ndcg_at_3 << " at epoch " << res.best_epoch << "\n";
  });
}

int cmd_retrieve(const PipelineConfig& cfg) {
  return guard([&] {
    cfg.validate();
    auto backend = make_token_encoder(cfg.backend_id);
    SplitData data = load_split(cfg, eval_split_name(cfg));
    const int d = backend->dim();
    RetrieverModel model(d, d, cfg.seed);
    load_checkpoint(checkpoint_path(cfg), model, expected_meta(cfg, *backend));

    PlanVariant variant = plan_variant_from_string(cfg.variant);
    PlanOptions options;
    options.separator = cfg.separator;

    std::vector<TruncationPlan> plans;
    std::vector<std::pair<std::string, std::string>> inputs;
    for (const SegmentedSet& set : data.sets) {
      InferenceResult inf =
          infer_scores(model, set, *backend, cfg.training.chunk_size, cfg.training.k);
      TruncationPlan plan =
          variant == PlanVariant::kEven
              ? even_truncation(set, cfg.budget)
              : ablation_plan(set, inf.doc_relevance, inf.edu_salience, cfg.budget, variant,
                              cfg.seed, options);
      AssembledInput assembled = assemble_input(plan, set);
      inputs.emplace_back(set.base.set_id, assembled.text);
      plans.push_back(std::move(plan));
    }

    echo_config(cfg);
    write_plans(std::filesystem::path(cfg.out_dir) / "plans.jsonl", plans);
    write_inputs(std::filesystem::path(cfg.out_dir) / "inputs.jsonl", inputs);
    std::cout << "[retrieve] " << plans.size() << " plans within budget " << cfg.budget << "\n";
  });
}

int cmd_evaluate(const PipelineConfig& cfg) {
  return guard([&] {
    cfg.validate();
    auto backend = make_token_encoder(cfg.backend_id);
    SplitData data = load_split(cfg, eval_split_name(cfg));
    const int d = backend->dim();
    RetrieverModel model(d, d, cfg.seed);
    load_checkpoint(checkpoint_path(cfg), model, expected_meta(cfg, *backend));

    const auto& stop = default_stopwords();
    PlanOptions options;
    options.separator = cfg.separator;

    ReportAccumulator acc_model, acc_rake, acc_gold;
    std::map<std::string, ReportAccumulator> acc_ablation;
    const PlanVariant ablations[] = {PlanVariant::kFull, PlanVariant::kNoRank,
                                     PlanVariant::kNoFilter, PlanVariant::kNoBoth};

    WhitespaceTokenizer tokenizer;
    for (std::size_t i = 0; i < data.sets.size(); ++i) {
      const SegmentedSet& set = data.sets[i];
      const OracleLabels& labels = data.labels[i];
      InferenceResult inf =
          infer_scores(model, set, *backend, cfg.training.chunk_size, cfg.training.k);

      MethodRanking model_rank;
      model_rank.edu_desc = argsort_desc(inf.edu_salience);
      model_rank.edu_asc = argsort_asc(inf.edu_salience);
      model_rank.doc_desc = argsort_desc(inf.doc_relevance);
      acc_model.add(model_rank, labels);

      Bm25Index edu_index(edu_units(set));
      Bm25Index doc_index(doc_units(set));
      std::vector<std::string> doc_texts;
      for (const Document& doc : set.base.documents) doc_texts.push_back(doc.raw_text);

      for (int which = 0; which < 2; ++which) {
        std::string query = which == 0 ? rake_query(doc_texts, stop) : gold_query(labels, set);
        std::vector<std::string> terms = tokenizer.tokenize(query);
        MethodRanking r;
        Eigen::VectorXd es = edu_index.scores(terms);
        Eigen::VectorXd ds = doc_index.scores(terms);
        r.edu_desc = argsort_desc(es);
        r.edu_asc = argsort_asc(es);
        r.doc_desc = argsort_desc(ds);
        (which == 0 ? acc_rake : acc_gold).add(r, labels);
      }

      for (PlanVariant variant : ablations) {
        TruncationPlan plan = ablation_plan(set, inf.doc_relevance, inf.edu_salience, cfg.budget,
                                            variant, cfg.seed, options);
        MethodRanking r;
        r.doc_desc = plan.doc_order;
        if (variant == PlanVariant::kFull || variant == PlanVariant::kNoRank) {
          r.edu_desc = model_rank.edu_desc;
          r.edu_asc = model_rank.edu_asc;
        }
        acc_ablation[to_string(variant)].add(r, labels);
      }
    }

    echo_config(cfg);
    std::filesystem::path out_dir(cfg.out_dir);
    write_report(out_dir / "report-model.json", acc_model.finish());
    write_report(out_dir / "report-bm25-rake.json", acc_rake.finish());
    write_report(out_dir / "report-bm25-gold.json", acc_gold.finish());
    for (const auto& [name, acc] : acc_ablation)
      write_report(out_dir / ("report-ablation-" + name + ".json"), acc.finish());
    std::cout << "[evaluate] " << data.sets.size() << " sets scored for "
              << 3 + acc_ablation.size() << " methods\n";
  });
}

}  // namespace edurank
