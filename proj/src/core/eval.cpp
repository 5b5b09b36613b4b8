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

#include "eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace clusd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Per-query outcome of one pipeline pass.
struct QueryOutcome {
  RankedList ranked;
  uint64_t read_ops = 0;
  uint64_t bytes_read = 0;
  uint32_t clusters_selected = 0;
  uint64_t docs_scored = 0;
};

std::unordered_map<uint32_t, double> score_members_memory(
    const Corpus& corpus, const ClusterModel& model, const DenseVector& query,
    const std::vector<uint32_t>& cluster_ids) {
  std::unordered_map<uint32_t, double> scores;
  for (uint32_t c : cluster_ids)
    for (uint32_t d : model.members[c])
      scores.emplace(d, dot(query, corpus.docs[d].dense));
  return scores;
}

std::unordered_map<uint32_t, double> score_members_disk(
    DiskStore& store, const DenseVector& query,
    const std::vector<uint32_t>& cluster_ids) {
  std::unordered_map<uint32_t, double> scores;
  auto groups = store.fetch_clusters(cluster_ids);
  for (const auto& group : groups)
    for (const auto& doc : group)
      scores.emplace(doc.doc_id, dot(query, doc.dense));
  return scores;
}

QueryOutcome run_query(PipelineKind kind, const PipelineComponents& parts,
                       const PipelineOptions& opts, const QueryRecord& query) {
  QueryOutcome out;
  const Corpus& corpus = *parts.corpus;
  uint64_t ops0 = 0, bytes0 = 0;
  if (parts.store) {
    ops0 = parts.store->stats().read_ops;
    bytes0 = parts.store->stats().bytes_read;
  }

  switch (kind) {
    case PipelineKind::Sparse: {
      out.ranked = sparse_search(*parts.index, query.sparse, opts.k);
      break;
    }
    case PipelineKind::DenseFull: {
      out.ranked = full_dense_search(corpus, query.dense, opts.k);
      out.docs_scored = corpus.size();
      break;
    }
    case PipelineKind::FuseFull: {
      RankedList sparse = sparse_search(*parts.index, query.sparse, opts.k);
      std::unordered_map<uint32_t, double> dense;
      dense.reserve(corpus.size());
      for (const auto& doc : corpus.docs)
        dense.emplace(doc.doc_id, dot(query.dense, doc.dense));
      out.docs_scored = corpus.size();
      out.ranked = fuse(sparse, dense, opts.fusion, opts.k);
      break;
    }
    case PipelineKind::FuseIvf: {
      RankedList sparse = sparse_search(*parts.index, query.sparse, opts.k);
      auto order = rank_clusters_by_centroid(*parts.model, query.dense);
      uint32_t budget = std::min<uint32_t>(opts.ivf_budget,
                                           parts.model->num_clusters());
      std::vector<uint32_t> visit(order.begin(), order.begin() + budget);
      auto dense = parts.store
                       ? score_members_disk(*parts.store, query.dense, visit)
                       : score_members_memory(corpus, *parts.model,
                                              query.dense, visit);
      out.clusters_selected = budget;
      out.docs_scored = dense.size();
      out.ranked = fuse(sparse, dense, opts.fusion, opts.k);
      break;
    }
    case PipelineKind::FuseRerank: {
      RankedList sparse = sparse_search(*parts.index, query.sparse, opts.k);
      size_t depth = std::min<size_t>(opts.rerank_depth, sparse.size());
      std::unordered_map<uint32_t, double> dense;
      dense.reserve(depth);
      if (parts.store) {
        std::vector<uint32_t> ids;
        ids.reserve(depth);
        for (size_t i = 0; i < depth; ++i) ids.push_back(sparse[i].doc_id);
        auto docs = parts.store->fetch_documents(ids, opts.coalesce);
        for (const auto& d : docs)
          dense.emplace(d.doc_id, dot(query.dense, d.dense));
      } else {
        for (size_t i = 0; i < depth; ++i)
          dense.emplace(sparse[i].doc_id,
                        dot(query.dense, corpus.docs[sparse[i].doc_id].dense));
      }
      out.docs_scored = dense.size();
      out.ranked = fuse(sparse, dense, opts.fusion, opts.k);
      break;
    }
    case PipelineKind::FuseClusd: {
      RankedList sparse = sparse_search(*parts.index, query.sparse, opts.k);
      SparseBins bins = partition_bins(sparse, opts.selector.bin_boundaries);
      auto stage1 = stage1_rank(*parts.model, bins, query.dense,
                                opts.selector.n, opts.selector.order);
      auto features = extract_features(*parts.model, bins, query.dense,
                                       stage1, opts.selector);
      auto selected = select_clusters(*parts.lstm, features, stage1,
                                      opts.selector.theta);
      std::unordered_map<uint32_t, double> dense;
      if (!selected.empty()) {
        dense = parts.store
                    ? score_members_disk(*parts.store, query.dense, selected)
                    : score_members_memory(corpus, *parts.model, query.dense,
                                           selected);
      }
      out.clusters_selected = static_cast<uint32_t>(selected.size());
      out.docs_scored = dense.size();
      out.ranked = fuse(sparse, dense, opts.fusion, opts.k);
      break;
    }
  }

  if (parts.store) {
    out.read_ops = parts.store->stats().read_ops - ops0;
    out.bytes_read = parts.store->stats().bytes_read - bytes0;
  }
  return out;
}

}  // namespace

PipelineKind pipeline_from_name(const std::string& name) {
  if (name == "sparse") return PipelineKind::Sparse;
  if (name == "dense_full") return PipelineKind::DenseFull;
  if (name == "fuse_full") return PipelineKind::FuseFull;
  if (name == "fuse_ivf") return PipelineKind::FuseIvf;
  if (name == "fuse_rerank") return PipelineKind::FuseRerank;
  if (name == "fuse_clusd") return PipelineKind::FuseClusd;
  throw Error(ErrorKind::Config, "unknown pipeline: " + name);
}

std::string pipeline_name(PipelineKind kind) {
  switch (kind) {
    case PipelineKind::Sparse: return "sparse";
    case PipelineKind::DenseFull: return "dense_full";
    case PipelineKind::FuseFull: return "fuse_full";
    case PipelineKind::FuseIvf: return "fuse_ivf";
    case PipelineKind::FuseRerank: return "fuse_rerank";
    case PipelineKind::FuseClusd: return "fuse_clusd";
  }
  return "?";
}

std::vector<PipelineKind> all_pipelines() {
  return {PipelineKind::Sparse,     PipelineKind::DenseFull,
          PipelineKind::FuseFull,   PipelineKind::FuseIvf,
          PipelineKind::FuseRerank, PipelineKind::FuseClusd};
}

double mrr_at_k(const std::vector<RankedList>& results,
                const std::vector<uint32_t>& query_ids, const Qrels& qrels,
                size_t k) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (size_t q = 0; q < results.size(); ++q) {
    size_t depth = std::min(k, results[q].size());
    for (size_t r = 0; r < depth; ++r) {
      if (qrels.grade(query_ids[q], results[q][r].doc_id) >= 1) {
        sum += 1.0 / static_cast<double>(r + 1);
        break;
      }
    }
  }
  return sum / static_cast<double>(results.size());
}

double recall_at_k(const std::vector<RankedList>& results,
                   const std::vector<uint32_t>& query_ids, const Qrels& qrels,
                   size_t k) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  size_t judged_queries = 0;
  for (size_t q = 0; q < results.size(); ++q) {
    auto it = qrels.judgments.find(query_ids[q]);
    if (it == qrels.judgments.end()) continue;
    size_t relevant = 0;
    for (const auto& [_, grade] : it->second)
      if (grade >= 1) ++relevant;
    if (relevant == 0) continue;
    ++judged_queries;
    size_t found = 0;
    size_t depth = std::min(k, results[q].size());
    for (size_t r = 0; r < depth; ++r)
      if (qrels.grade(query_ids[q], results[q][r].doc_id) >= 1) ++found;
    sum += static_cast<double>(found) / static_cast<double>(relevant);
  }
  return judged_queries == 0 ? 0.0 : sum / static_cast<double>(judged_queries);
}

double ndcg_at_k(const std::vector<RankedList>& results,
                 const std::vector<uint32_t>& query_ids, const Qrels& qrels,
                 size_t k) {
  if (results.empty()) return 0.0;
  double sum = 0.0;
  for (size_t q = 0; q < results.size(); ++q) {
    double dcg = 0.0;
    size_t depth = std::min(k, results[q].size());
    for (size_t r = 0; r < depth; ++r) {
      uint32_t g = qrels.grade(query_ids[q], results[q][r].doc_id);
      if (g > 0)
        dcg += (std::pow(2.0, g) - 1.0) / std::log2(static_cast<double>(r) + 2.0);
    }
    double idcg = 0.0;
    auto it = qrels.judgments.find(query_ids[q]);
    if (it != qrels.judgments.end()) {
      std::vector<uint32_t> grades;
      for (const auto& [_, g] : it->second)
        if (g > 0) grades.push_back(g);
      std::sort(grades.rbegin(), grades.rend());
      for (size_t r = 0; r < std::min(k, grades.size()); ++r)
        idcg += (std::pow(2.0, grades[r]) - 1.0) /
                std::log2(static_cast<double>(r) + 2.0);
    }
    if (idcg > 0.0) sum += dcg / idcg;
  }
  return sum / static_cast<double>(results.size());
}

std::pair<double, double> latency_stats(const std::vector<double>& samples) {
  if (samples.empty())
    throw Error(ErrorKind::State, "latency_stats: no samples");
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  size_t rank = static_cast<size_t>(
      std::ceil(0.99 * static_cast<double>(sorted.size())));
  if (rank == 0) rank = 1;
  return {mean, sorted[rank - 1]};
}

RunResult run_pipeline(PipelineKind kind, const PipelineComponents& parts,
                       const PipelineOptions& opts, const QuerySet& queries) {
  if (!parts.corpus) throw Error(ErrorKind::State, "run_pipeline: no corpus");
  if (parts.corpus->dim != queries.dim)
    throw Error(ErrorKind::State, "run_pipeline: corpus/query dim mismatch");
  bool needs_index = kind != PipelineKind::DenseFull;
  if (needs_index && !parts.index)
    throw Error(ErrorKind::State, "run_pipeline: no sparse index");
  if (parts.index && parts.index->doc_count != parts.corpus->size())
    throw Error(ErrorKind::State, "run_pipeline: index/corpus mismatch");
  bool needs_model =
      kind == PipelineKind::FuseIvf || kind == PipelineKind::FuseClusd;
  if (needs_model && !parts.model)
    throw Error(ErrorKind::State, "run_pipeline: no cluster model");
  if (parts.model && parts.model->assignment.size() != parts.corpus->size())
    throw Error(ErrorKind::State, "run_pipeline: model/corpus mismatch");
  if (kind == PipelineKind::FuseClusd) {
    if (!parts.lstm)
      throw Error(ErrorKind::State, "run_pipeline: no LSTM params");
    if (parts.lstm->input_dim != opts.selector.feature_width())
      throw Error(ErrorKind::State,
                  "run_pipeline: LSTM input width != selector feature width");
  }

  RunResult run;
  run.label = pipeline_name(kind);
  uint64_t total_clusters = 0;
  uint64_t total_docs_scored = 0;
  uint32_t reps = std::max<uint32_t>(1, opts.timing_reps);

  for (const auto& query : queries.queries) {
    auto t0 = Clock::now();
    QueryOutcome outcome = run_query(kind, parts, opts, query);
    double best = seconds_since(t0);
    for (uint32_t r = 1; r < reps; ++r) {
      auto t = Clock::now();
      QueryOutcome again = run_query(kind, parts, opts, query);
      best = std::min(best, seconds_since(t));
      (void)again;
    }
    double sim = static_cast<double>(outcome.read_ops) *
                 (parts.store ? parts.store->stats().per_op_overhead : 0.0);
    run.query_ids.push_back(query.query_id);
    run.results.push_back(std::move(outcome.ranked));
    run.latency_seconds.push_back(best + sim);
    run.io.read_ops += outcome.read_ops;
    run.io.bytes_read += outcome.bytes_read;
    if (parts.store) run.io.per_op_overhead = parts.store->stats().per_op_overhead;
    total_clusters += outcome.clusters_selected;
    total_docs_scored += outcome.docs_scored;
  }
  if (!queries.queries.empty()) {
    run.avg_clusters_selected =
        static_cast<double>(total_clusters) / queries.queries.size();
    run.docs_scored_avg =
        static_cast<double>(total_docs_scored) / queries.queries.size();
  }
  return run;
}

MetricsReport compute_metrics(const RunResult& run, const Qrels& qrels,
                              uint32_t recall_k) {
  MetricsReport m;
  m.label = run.label;
  m.mrr_at_10 = mrr_at_k(run.results, run.query_ids, qrels, 10);
  m.recall_k = recall_k;
  m.recall_at_k = recall_at_k(run.results, run.query_ids, qrels, recall_k);
  m.ndcg_at_10 = ndcg_at_k(run.results, run.query_ids, qrels, 10);
  if (!run.latency_seconds.empty())
    std::tie(m.latency_mean, m.latency_p99) = latency_stats(run.latency_seconds);
  m.avg_clusters_selected = run.avg_clusters_selected;
  m.docs_scored_avg = run.docs_scored_avg;
  if (!run.query_ids.empty())
    m.read_ops_per_query =
        static_cast<double>(run.io.read_ops) / run.query_ids.size();
  m.simulated_overhead = run.io.simulated_overhead();
  return m;
}

void write_run_file(const RunResult& run, const std::string& path,
                    const std::string& tag) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  out.precision(6);
  out << std::fixed;
  for (size_t q = 0; q < run.results.size(); ++q) {
    const auto& ranked = run.results[q];
    for (size_t r = 0; r < ranked.size(); ++r)
      out << run.query_ids[q] << " Q0 " << ranked[r].doc_id << " " << (r + 1)
          << " " << ranked[r].score << " " << tag << "\n";
  }
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

std::string metrics_to_text(const MetricsReport& report) {
  std::ostringstream ss;
  ss.precision(6);
  ss << std::fixed;
  ss << "pipeline=" << report.label << "\n"
     << "mrr_at_10=" << report.mrr_at_10 << "\n"
     << "recall_at_" << report.recall_k << "=" << report.recall_at_k << "\n"
     << "ndcg_at_10=" << report.ndcg_at_10 << "\n"
     << "avg_clusters_selected=" << report.avg_clusters_selected << "\n"
     << "docs_scored_avg=" << report.docs_scored_avg << "\n"
     << "read_ops_per_query=" << report.read_ops_per_query << "\n"
     << "simulated_overhead_seconds=" << report.simulated_overhead << "\n";
  return ss.str();
}

}  // namespace clusd
