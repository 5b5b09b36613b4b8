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

#pragma once

#include <string>
#include <vector>

#include "cluster.hpp"
#include "fusion.hpp"
#include "selector.hpp"
#include "sparse_index.hpp"
#include "storage.hpp"
#include "types.hpp"

namespace clusd {

enum class PipelineKind {
  Sparse,
  DenseFull,
  FuseFull,
  FuseIvf,
  FuseRerank,
  FuseClusd,
};

PipelineKind pipeline_from_name(const std::string& name);
std::string pipeline_name(PipelineKind kind);
std::vector<PipelineKind> all_pipelines();

struct PipelineComponents {
  const Corpus* corpus = nullptr;
  const InvertedIndex* index = nullptr;
  const ClusterModel* model = nullptr;
  const LstmParams* lstm = nullptr;  // required for fuse_clusd
  DiskStore* store = nullptr;        // non-null switches to disk mode
};

struct PipelineOptions {
  size_t k = 1000;
  SelectorConfig selector;
  FusionConfig fusion;
  uint32_t ivf_budget = 13;     // clusters visited by fuse_ivf
  uint32_t rerank_depth = 1000;  // sparse candidates rescored by fuse_rerank
  bool coalesce = true;          // per-document read coalescing
  uint32_t timing_reps = 3;      // per-query repetitions, min wall time kept
};

struct RunResult {
  std::string label;
  std::vector<uint32_t> query_ids;
  std::vector<RankedList> results;
  std::vector<double> latency_seconds;  // includes simulated I/O overhead
  IoStats io;                           // one logical pass over the queries
  double avg_clusters_selected = 0.0;
  double docs_scored_avg = 0.0;  // dense documents scored per query
};

struct MetricsReport {
  std::string label;
  double mrr_at_10 = 0.0;
  double recall_at_k = 0.0;
  uint32_t recall_k = 1000;
  double ndcg_at_10 = 0.0;
  double latency_mean = 0.0;
  double latency_p99 = 0.0;
  double avg_clusters_selected = 0.0;
  double docs_scored_avg = 0.0;
  double read_ops_per_query = 0.0;
  double simulated_overhead = 0.0;  // total seconds over the run
};

double mrr_at_k(const std::vector<RankedList>& results,
                const std::vector<uint32_t>& query_ids, const Qrels& qrels,
                size_t k = 10);
double recall_at_k(const std::vector<RankedList>& results,
                   const std::vector<uint32_t>& query_ids, const Qrels& qrels,
                   size_t k);
double ndcg_at_k(const std::vector<RankedList>& results,
                 const std::vector<uint32_t>& query_ids, const Qrels& qrels,
                 size_t k = 10);

/// (mean, p99); p99 is the nearest-rank percentile, ceil(0.99 n)-th order
/// statistic.
std::pair<double, double> latency_stats(const std::vector<double>& samples);

RunResult run_pipeline(PipelineKind kind, const PipelineComponents& parts,
                       const PipelineOptions& opts, const QuerySet& queries);

MetricsReport compute_metrics(const RunResult& run, const Qrels& qrels,
                              uint32_t recall_k = 1000);

/// Standard six-column run file: "query_id Q0 doc_id rank score tag".
void write_run_file(const RunResult& run, const std::string& path,
                    const std::string& tag);

std::string metrics_to_text(const MetricsReport& report);

}  // namespace clusd
