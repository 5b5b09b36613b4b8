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

#include <vector>

#include "cluster.hpp"
#include "lstm.hpp"
#include "sparse_index.hpp"
#include "types.hpp"

namespace clusd {

/// Stage-I candidate ordering options. Overlap is the default; distance
/// ranks purely by query-centroid dot product.
enum class Stage1Order {
  SortByOverlap,
  SortByDist,
};

struct SelectorConfig {
  uint32_t n = 32;       // Stage-I candidate count
  uint32_t u = 6;        // cluster-bin count
  double theta = 0.02;   // LSTM selection threshold
  std::vector<uint32_t> bin_boundaries = default_bin_boundaries();
  Stage1Order order = Stage1Order::SortByOverlap;

  uint32_t v() const { return static_cast<uint32_t>(bin_boundaries.size()); }
  uint32_t feature_width() const { return 1 + u + 2 * v(); }
};

/// Per-cluster LSTM input: query similarity, u inter-cluster similarities,
/// v overlap counts, v mean overlap scores. Width 1+u+2v.
struct ClusterFeatures {
  double sim_q = 0.0;
  std::vector<double> avg_dist;  // u
  std::vector<double> p_counts;  // v
  std::vector<double> q_scores;  // v

  std::vector<double> flatten() const;
};

/// Per-cluster overlap counts with the sparse position bins.
std::vector<std::vector<uint32_t>> priority_vectors(const ClusterModel& model,
                                                    const SparseBins& bins);

/// Multikey sort by descending priority vector, ties by query-centroid dot
/// product descending, then cluster_id ascending. Returns the first n.
std::vector<uint32_t> stage1_rank(const ClusterModel& model,
                                  const SparseBins& bins,
                                  const DenseVector& query, uint32_t n,
                                  Stage1Order order = Stage1Order::SortByOverlap);

/// Near-equal consecutive partition of the Stage-I order into u bins,
/// earlier bins larger when n % u != 0.
std::vector<std::pair<uint32_t, uint32_t>> partition_cluster_bins(uint32_t n,
                                                                  uint32_t u);

std::vector<ClusterFeatures> extract_features(
    const ClusterModel& model, const SparseBins& bins,
    const DenseVector& query, const std::vector<uint32_t>& stage1_order,
    const SelectorConfig& cfg);

/// Runs the LSTM over the Stage-I sequence and keeps clusters with
/// f(C_i) >= theta, in Stage-I order.
std::vector<uint32_t> select_clusters(const LstmParams& lstm,
                                      const std::vector<ClusterFeatures>& features,
                                      const std::vector<uint32_t>& stage1_order,
                                      double theta);

/// Raw per-cluster LSTM scores in Stage-I order.
std::vector<double> score_clusters(const LstmParams& lstm,
                                   const std::vector<ClusterFeatures>& features);

}  // namespace clusd
