// Copyright 2026-present the clusd project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "driver.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "corpus.hpp"
#include "lstm.hpp"
#include "manifest.hpp"
#include "pq.hpp"
#include "storage.hpp"
#include "training.hpp"

namespace fs = std::filesystem;

namespace clusd {

namespace {

KeyValueConfig load_config(const std::string& config_path,
                           const std::vector<std::string>& overrides) {
  KeyValueConfig cfg;
  if (!config_path.empty())
    cfg = KeyValueConfig::from_file(resolve_path(config_path));
  cfg.apply_overrides(overrides);
  return cfg;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create directory: " + dir);
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

void put_config(RunManifest& manifest, const KeyValueConfig& cfg) {
  for (const auto& [k, v] : cfg.entries()) manifest.set("config." + k, v);
}

std::string format_real(double v) {
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

struct LoadedArtifacts {
  Corpus corpus;
  QuerySet queries;
  Qrels qrels;
  InvertedIndex index;
  ClusterModel model;
};

LoadedArtifacts load_built(const std::string& built_dir, bool need_qrels) {
  LoadedArtifacts a;
  a.corpus = load_corpus(join(built_dir, "corpus.bin"));
  a.queries = load_queries(join(built_dir, "queries.bin"));
  a.index = load_index(join(built_dir, "index.clsi"));
  a.model = load_cluster_model(join(built_dir, "clusters.clsc"));
  if (need_qrels) a.qrels = load_qrels(join(built_dir, "qrels.txt"));
  return a;
}

}  // namespace

std::string resolve_path(const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  const char* root = std::getenv("CLUSD_DATA_DIR");
  if (!root || !*root) return path;
  return (fs::path(root) / path).string();
}

SelectorConfig selector_from_config(const KeyValueConfig& cfg) {
  SelectorConfig sc;
  sc.n = static_cast<uint32_t>(cfg.get_uint("selector.stage1_n", sc.n));
  sc.u = static_cast<uint32_t>(cfg.get_uint("selector.cluster_bins_u", sc.u));
  sc.theta = cfg.get_real("selector.theta", sc.theta);
  sc.bin_boundaries =
      cfg.get_uint_list("selector.bin_boundaries", sc.bin_boundaries);
  std::string order = cfg.get_string("selector.stage1_order", "overlap");
  if (order == "overlap") {
    sc.order = Stage1Order::SortByOverlap;
  } else if (order == "dist") {
    sc.order = Stage1Order::SortByDist;
  } else {
    throw Error(ErrorKind::Config,
                "selector.stage1_order must be 'overlap' or 'dist'");
  }
  if (sc.n < 1 || sc.u < 1)
    throw Error(ErrorKind::Config, "selector: n and u must be >= 1");
  return sc;
}

FusionConfig fusion_from_config(const KeyValueConfig& cfg) {
  FusionConfig fc;
  fc.alpha = cfg.get_real("fusion.alpha", fc.alpha);
  fc.impute_factor = cfg.get_real("fusion.impute_factor", fc.impute_factor);
  fc.validate();
  return fc;
}

void cmd_synth(const std::string& config_path, const std::string& out_dir,
               const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = load_config(config_path, overrides);
  SynthConfig synth = SynthConfig::from_config(cfg);

  std::string dir = resolve_path(out_dir);
  ensure_dir(dir);

  RunManifest manifest("synth");
  put_config(manifest, cfg);
  manifest.set("effective.num_docs", std::to_string(synth.num_docs));
  manifest.set("effective.num_queries", std::to_string(synth.num_queries));
  manifest.set("effective.dim", std::to_string(synth.dim));
  manifest.set("effective.vocab_size", std::to_string(synth.vocab_size));
  manifest.set("effective.num_topics", std::to_string(synth.num_topics));
  manifest.set("effective.dense_noise_sigma",
               format_real(synth.dense_noise_sigma));
  manifest.set("effective.sparse_terms_per_doc",
               std::to_string(synth.sparse_terms_per_doc));
  manifest.set("effective.relevant_per_query",
               std::to_string(synth.relevant_per_query));
  manifest.set("effective.rng_seed", std::to_string(synth.rng_seed));
  manifest.write(join(dir, "synth_manifest.txt"));

  auto [corpus, queries, qrels] = generate_synthetic(synth);
  save_corpus(corpus, join(dir, "corpus.bin"));
  save_queries(queries, join(dir, "queries.bin"));
  save_qrels(qrels, join(dir, "qrels.txt"));
}

void cmd_build(const std::string& data_dir, const std::string& out_dir,
               const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = load_config("", overrides);
  std::string src = resolve_path(data_dir);
  std::string dir = resolve_path(out_dir);
  ensure_dir(dir);

  std::string corpus_path = fs::is_directory(src)
                                ? join(src, "corpus.bin")
                                : src;
  if (!fs::exists(corpus_path))
    throw Error(ErrorKind::State, "missing corpus: " + corpus_path);

  uint32_t clusters = static_cast<uint32_t>(cfg.get_uint("build.clusters", 256));
  uint32_t kmeans_iters =
      static_cast<uint32_t>(cfg.get_uint("build.kmeans_iters", 25));
  uint32_t neighbors_m =
      static_cast<uint32_t>(cfg.get_uint("build.neighbors_m", 64));
  uint32_t k_default =
      static_cast<uint32_t>(cfg.get_uint("build.k_default", 1000));
  uint64_t seed = cfg.get_uint("build.seed", 1);
  bool write_store_file = cfg.get_bool("build.write_store", true);
  bool remap_ids = cfg.get_bool("build.remap_ids", false);
  bool with_pq = cfg.get_bool("build.pq", false);
  uint32_t pq_subspaces =
      static_cast<uint32_t>(cfg.get_uint("build.pq_subspaces", 8));

  RunManifest manifest("build");
  put_config(manifest, cfg);
  manifest.set_input_digest("corpus", corpus_path);
  manifest.set("effective.clusters", std::to_string(clusters));
  manifest.set("effective.kmeans_iters", std::to_string(kmeans_iters));
  manifest.set("effective.neighbors_m", std::to_string(neighbors_m));
  manifest.set("effective.k_default", std::to_string(k_default));
  manifest.set("effective.seed", std::to_string(seed));
  manifest.write(join(dir, "build_manifest.txt"));

  Corpus corpus = load_corpus(corpus_path, remap_ids);
  if (corpus.size() == 0)
    throw Error(ErrorKind::State, "cannot build over an empty corpus");

  InvertedIndex index = build_index(corpus);
  index.k_default = k_default;
  save_index(index, join(dir, "index.clsi"));

  ClusterModel model = kmeans_fit(corpus, clusters, kmeans_iters, seed);
  build_neighbor_graph(model, neighbors_m);
  save_cluster_model(model, join(dir, "clusters.clsc"));

  if (write_store_file) write_store(corpus, model, join(dir, "store.clss"));

  if (with_pq) {
    PqCodebook cb = pq_train(corpus, pq_subspaces, seed);
    std::ofstream out(join(dir, "pq_report.txt"), std::ios::trunc);
    out << "pq_subspaces=" << pq_subspaces << "\n"
        << "reconstruction_mse=" << format_real(pq_reconstruction_mse(cb, corpus))
        << "\n";
  }
}

void cmd_train(const std::string& built_dir,
               const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = load_config("", overrides);
  std::string dir = resolve_path(built_dir);

  SelectorConfig selector = selector_from_config(cfg);
  TrainConfig train_cfg;
  train_cfg.epochs =
      static_cast<uint32_t>(cfg.get_uint("train.epochs", train_cfg.epochs));
  train_cfg.learning_rate =
      cfg.get_real("train.learning_rate", train_cfg.learning_rate);
  train_cfg.batch_size =
      static_cast<uint32_t>(cfg.get_uint("train.batch_size", train_cfg.batch_size));
  train_cfg.clip_norm = cfg.get_real("train.clip_norm", train_cfg.clip_norm);
  train_cfg.rng_seed = cfg.get_uint("train.seed", 1);
  uint64_t num_instances = cfg.get_uint("train.num_instances", 5000);
  uint32_t hidden_dim =
      static_cast<uint32_t>(cfg.get_uint("train.hidden_dim", 32));
  uint64_t train_queries = cfg.get_uint("train.queries", 500);

  RunManifest manifest("train");
  put_config(manifest, cfg);
  manifest.set_input_digest("corpus", join(dir, "corpus.bin"));
  manifest.set_input_digest("queries", join(dir, "queries.bin"));
  manifest.set_input_digest("index", join(dir, "index.clsi"));
  manifest.set_input_digest("clusters", join(dir, "clusters.clsc"));
  manifest.set("effective.epochs", std::to_string(train_cfg.epochs));
  manifest.set("effective.learning_rate", format_real(train_cfg.learning_rate));
  manifest.set("effective.batch_size", std::to_string(train_cfg.batch_size));
  manifest.set("effective.clip_norm", format_real(train_cfg.clip_norm));
  manifest.set("effective.seed", std::to_string(train_cfg.rng_seed));
  manifest.set("effective.num_instances", std::to_string(num_instances));
  manifest.set("effective.hidden_dim", std::to_string(hidden_dim));
  manifest.set("effective.train_queries", std::to_string(train_queries));
  manifest.set("effective.stage1_n", std::to_string(selector.n));
  manifest.set("effective.feature_width",
               std::to_string(selector.feature_width()));
  manifest.write(join(dir, "train_manifest.txt"));

  LoadedArtifacts a = load_built(dir, /*need_qrels=*/false);
  QuerySet train_set;
  train_set.dim = a.queries.dim;
  size_t use = std::min<size_t>(train_queries, a.queries.size());
  train_set.queries.assign(a.queries.queries.begin(),
                           a.queries.queries.begin() + use);

  SelectorTrainResult result =
      train_selector(a.corpus, train_set, a.index, a.model, selector,
                     train_cfg, num_instances, hidden_dim);
  save_lstm(result.params, join(dir, "lstm.clsl"));

  std::ofstream trace(join(dir, "train_trace.txt"), std::ios::trunc);
  trace << "instances=" << result.instances_used << "\n";
  for (size_t e = 0; e < result.epoch_loss.size(); ++e)
    trace << "epoch_" << e << "_loss=" << format_real(result.epoch_loss[e])
          << "\n";
}

namespace {

PipelineOptions options_from_config(const KeyValueConfig& cfg,
                                    const ClusterModel& model) {
  PipelineOptions opts;
  opts.k = cfg.get_uint("bench.k", 1000);
  opts.selector = selector_from_config(cfg);
  opts.fusion = fusion_from_config(cfg);
  opts.rerank_depth =
      static_cast<uint32_t>(cfg.get_uint("bench.rerank_depth", 1000));
  opts.coalesce = cfg.get_bool("bench.coalesce", true);
  opts.timing_reps = static_cast<uint32_t>(cfg.get_uint("bench.reps", 3));
  uint32_t ivf = static_cast<uint32_t>(cfg.get_uint("bench.ivf_budget", 0));
  opts.ivf_budget = ivf == 0 ? std::max(1u, model.num_clusters() / 20) : ivf;
  return opts;
}

}  // namespace

void cmd_search(const std::string& built_dir, const std::string& query_file,
                const std::string& pipeline, const std::string& out_path,
                const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = load_config("", overrides);
  std::string dir = resolve_path(built_dir);
  PipelineKind kind = pipeline_from_name(pipeline);

  LoadedArtifacts a = load_built(dir, /*need_qrels=*/false);
  QuerySet queries = load_queries(resolve_path(query_file));
  PipelineOptions opts = options_from_config(cfg, a.model);
  opts.timing_reps = static_cast<uint32_t>(cfg.get_uint("bench.reps", 1));

  LstmParams lstm;
  bool disk = cfg.get_bool("bench.disk", false);
  std::unique_ptr<DiskStore> store;
  PipelineComponents parts;
  parts.corpus = &a.corpus;
  parts.index = &a.index;
  parts.model = &a.model;
  if (kind == PipelineKind::FuseClusd) {
    lstm = load_lstm(join(dir, "lstm.clsl"));
    parts.lstm = &lstm;
  }
  if (disk) {
    double overhead =
        cfg.get_real("bench.per_op_overhead_ms", 0.15) / 1000.0;
    store = std::make_unique<DiskStore>(join(dir, "store.clss"), overhead);
    parts.store = store.get();
  }

  RunResult run = run_pipeline(kind, parts, opts, queries);
  std::string out = resolve_path(out_path);
  RunManifest manifest("search");
  put_config(manifest, cfg);
  manifest.set("effective.pipeline", pipeline);
  manifest.set_input_digest("queries", resolve_path(query_file));
  manifest.write(out + ".manifest.txt");
  write_run_file(run, out, "clusd-" + pipeline);
}

void cmd_bench(const std::string& built_dir, const std::string& out_dir,
               const std::vector<std::string>& overrides) {
  KeyValueConfig cfg = load_config("", overrides);
  std::string dir = resolve_path(built_dir);
  std::string out = resolve_path(out_dir);
  ensure_dir(out);

  RunManifest manifest("bench");
  put_config(manifest, cfg);
  manifest.set_input_digest("corpus", join(dir, "corpus.bin"));
  manifest.set_input_digest("queries", join(dir, "queries.bin"));
  manifest.set_input_digest("qrels", join(dir, "qrels.txt"));
  manifest.set_input_digest("index", join(dir, "index.clsi"));
  manifest.set_input_digest("clusters", join(dir, "clusters.clsc"));
  manifest.set_input_digest("lstm", join(dir, "lstm.clsl"));
  manifest.write(join(out, "bench_manifest.txt"));

  LoadedArtifacts a = load_built(dir, /*need_qrels=*/true);
  LstmParams lstm = load_lstm(join(dir, "lstm.clsl"));

  uint64_t eval_queries = cfg.get_uint("bench.eval_queries", 200);
  if (eval_queries > a.queries.size())
    throw Error(ErrorKind::Config, "bench.eval_queries exceeds query count");
  QuerySet eval_set;
  eval_set.dim = a.queries.dim;
  eval_set.queries.assign(a.queries.queries.end() - eval_queries,
                          a.queries.queries.end());

  PipelineOptions opts = options_from_config(cfg, a.model);
  uint32_t recall_k = static_cast<uint32_t>(
      cfg.get_uint("bench.recall_k", static_cast<uint64_t>(opts.k)));

  bool disk = cfg.get_bool("bench.disk", false);
  std::unique_ptr<DiskStore> store;
  PipelineComponents parts;
  parts.corpus = &a.corpus;
  parts.index = &a.index;
  parts.model = &a.model;
  parts.lstm = &lstm;
  if (disk) {
    double overhead =
        cfg.get_real("bench.per_op_overhead_ms", 0.15) / 1000.0;
    store = std::make_unique<DiskStore>(join(dir, "store.clss"), overhead);
    parts.store = store.get();
  }

  // Optional budget matching: tune theta so CluSD selects clusd_budget
  // clusters on average over the eval set, then hand IVF the same budget.
  double clusd_budget = cfg.get_real("bench.clusd_budget", 0.0);
  if (clusd_budget > 0.0) {
    std::vector<std::vector<double>> per_query_scores;
    for (const auto& query : eval_set.queries) {
      RankedList sparse = sparse_search(a.index, query.sparse, opts.k);
      SparseBins bins = partition_bins(sparse, opts.selector.bin_boundaries);
      auto stage1 = stage1_rank(a.model, bins, query.dense, opts.selector.n,
                                opts.selector.order);
      auto features = extract_features(a.model, bins, query.dense, stage1,
                                       opts.selector);
      per_query_scores.push_back(score_clusters(lstm, features));
    }
    opts.selector.theta =
        tune_theta_for_budget(per_query_scores, clusd_budget);
  }

  std::vector<MetricsReport> reports;
  std::ofstream timing(join(out, "timing.txt"), std::ios::trunc);
  double clusd_avg_clusters = 0.0;
  for (PipelineKind kind : all_pipelines()) {
    if (kind == PipelineKind::FuseIvf && cfg.get_uint("bench.ivf_budget", 0) == 0 &&
        clusd_avg_clusters > 0.0) {
      // match the CluSD operating point when no explicit budget is given
      opts.ivf_budget = std::max<uint32_t>(
          1, static_cast<uint32_t>(std::lround(clusd_avg_clusters)));
    }
    RunResult run = run_pipeline(kind, parts, opts, eval_set);
    if (kind == PipelineKind::FuseClusd)
      clusd_avg_clusters = run.avg_clusters_selected;
    MetricsReport report = compute_metrics(run, a.qrels, recall_k);
    reports.push_back(report);
    write_run_file(run, join(out, "run_" + run.label + ".txt"),
                   "clusd-" + run.label);
    std::ofstream mf(join(out, "metrics_" + run.label + ".txt"),
                     std::ios::trunc);
    mf << metrics_to_text(report);
    timing << run.label << " mean_s=" << format_real(report.latency_mean)
           << " p99_s=" << format_real(report.latency_p99) << "\n";
  }

  // fuse_clusd runs after fuse_ivf in pipeline order, so when budget
  // matching is active the table reflects a second IVF pass.
  if (cfg.get_uint("bench.ivf_budget", 0) == 0 && clusd_avg_clusters > 0.0) {
    opts.ivf_budget = std::max<uint32_t>(
        1, static_cast<uint32_t>(std::lround(clusd_avg_clusters)));
    RunResult run = run_pipeline(PipelineKind::FuseIvf, parts, opts, eval_set);
    MetricsReport report = compute_metrics(run, a.qrels, recall_k);
    for (auto& r : reports)
      if (r.label == report.label) r = report;
    write_run_file(run, join(out, "run_" + run.label + ".txt"),
                   "clusd-" + run.label);
    std::ofstream mf(join(out, "metrics_" + run.label + ".txt"),
                     std::ios::trunc);
    mf << metrics_to_text(report);
  }

  // comparison table, aligned text and CSV
  {
    std::ofstream txt(join(out, "table.txt"), std::ios::trunc);
    std::ofstream csv(join(out, "table.csv"), std::ios::trunc);
    txt << std::left << std::setw(14) << "pipeline" << std::right
        << std::setw(10) << "mrr@10" << std::setw(12)
        << ("recall@" + std::to_string(recall_k)) << std::setw(10) << "ndcg@10"
        << std::setw(12) << "clusters" << std::setw(14) << "docs_scored"
        << std::setw(10) << "read_ops" << "\n";
    csv << "pipeline,mrr_at_10,recall_at_" << recall_k
        << ",ndcg_at_10,avg_clusters_selected,docs_scored_avg,read_ops_per_"
           "query\n";
    for (const auto& r : reports) {
      txt << std::left << std::setw(14) << r.label << std::right << std::fixed
          << std::setprecision(4) << std::setw(10) << r.mrr_at_10
          << std::setw(12) << r.recall_at_k << std::setw(10) << r.ndcg_at_10
          << std::setw(12) << std::setprecision(1) << r.avg_clusters_selected
          << std::setw(14) << r.docs_scored_avg << std::setw(10)
          << r.read_ops_per_query << "\n";
      csv << r.label << "," << format_real(r.mrr_at_10) << ","
          << format_real(r.recall_at_k) << "," << format_real(r.ndcg_at_10)
          << "," << format_real(r.avg_clusters_selected) << ","
          << format_real(r.docs_scored_avg) << ","
          << format_real(r.read_ops_per_query) << "\n";
    }
    std::ofstream summary(join(out, "bench_summary.txt"), std::ios::trunc);
    summary << "theta=" << format_real(opts.selector.theta) << "\n"
            << "ivf_budget=" << opts.ivf_budget << "\n"
            << "alpha=" << format_real(opts.fusion.alpha) << "\n"
            << "disk=" << (disk ? "1" : "0") << "\n";
  }
}

}  // namespace clusd
