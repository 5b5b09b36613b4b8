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

#include "types.hpp"

namespace clusd {

/// K-means partition of the document embeddings plus the top-m centroid
/// neighbor graph used by the selector's inter-cluster features.
struct ClusterModel {
  uint32_t dim = 0;
  std::vector<DenseVector> centroids;          // N x dim
  std::vector<uint32_t> assignment;            // doc_id -> cluster_id
  std::vector<std::vector<uint32_t>> members;  // per cluster, doc_id ascending
  struct Neighbor {
    uint32_t cluster_id;
    float similarity;
  };
  std::vector<std::vector<Neighbor>> neighbor_graph;  // similarity descending
  std::vector<double> objective_trace;  // sum of squared distances, per iter

  uint32_t num_clusters() const {
    return static_cast<uint32_t>(centroids.size());
  }
};

/// Lloyd's algorithm with k-means++ init. Deterministic in
/// (corpus, n_clusters, max_iters, rng_seed). Empty clusters are repaired by
/// splitting the largest cluster at its farthest member.
ClusterModel kmeans_fit(const Corpus& corpus, uint32_t n_clusters,
                        uint32_t max_iters, uint64_t rng_seed);

/// Fills neighbor_graph: per cluster the m highest-dot-product centroids,
/// self excluded.
void build_neighbor_graph(ClusterModel& model, uint32_t m);

/// Exact top-k by dense dot product; the oracle for all selective methods.
RankedList full_dense_search(const Corpus& corpus, const DenseVector& query,
                             size_t k);

/// Scores only the members of the cluster_budget clusters whose centroids
/// have the highest query dot product.
RankedList ivf_search(const ClusterModel& model, const Corpus& corpus,
                      const DenseVector& query, uint32_t cluster_budget,
                      size_t k);

/// Cluster ids ordered by query-centroid dot product descending.
std::vector<uint32_t> rank_clusters_by_centroid(const ClusterModel& model,
                                                const DenseVector& query);

void save_cluster_model(const ClusterModel& model, const std::string& path);
ClusterModel load_cluster_model(const std::string& path);

}  // namespace clusd
