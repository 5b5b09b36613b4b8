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

#include "selector.hpp"

#include <algorithm>
#include <unordered_map>

namespace clusd {

std::vector<double> ClusterFeatures::flatten() const {
  std::vector<double> out;
  out.reserve(1 + avg_dist.size() + p_counts.size() + q_scores.size());
  out.push_back(sim_q);
  out.insert(out.end(), avg_dist.begin(), avg_dist.end());
  out.insert(out.end(), p_counts.begin(), p_counts.end());
  out.insert(out.end(), q_scores.begin(), q_scores.end());
  return out;
}

std::vector<std::vector<uint32_t>> priority_vectors(const ClusterModel& model,
                                                    const SparseBins& bins) {
  const uint32_t N = model.num_clusters();
  const size_t v = bins.bins.size();
  std::vector<std::vector<uint32_t>> P(N, std::vector<uint32_t>(v, 0));
  for (size_t j = 0; j < v; ++j)
    for (const auto& sd : bins.bins[j])
      ++P[model.assignment[sd.doc_id]][j];
  return P;
}

std::vector<uint32_t> stage1_rank(const ClusterModel& model,
                                  const SparseBins& bins,
                                  const DenseVector& query, uint32_t n,
                                  Stage1Order order) {
  const uint32_t N = model.num_clusters();
  n = std::min(n, N);

  if (order == Stage1Order::SortByDist) {
    auto ranked = rank_clusters_by_centroid(model, query);
    ranked.resize(n);
    return ranked;
  }

  auto P = priority_vectors(model, bins);
  std::vector<double> centroid_sim(N);
  for (uint32_t c = 0; c < N; ++c)
    centroid_sim[c] = dot(query, model.centroids[c]);

  std::vector<uint32_t> ids(N);
  for (uint32_t c = 0; c < N; ++c) ids[c] = c;
  std::sort(ids.begin(), ids.end(), [&](uint32_t a, uint32_t b) {
    if (P[a] != P[b]) return P[a] > P[b];  // lexicographic, descending
    if (centroid_sim[a] != centroid_sim[b])
      return centroid_sim[a] > centroid_sim[b];
    return a < b;
  });
  ids.resize(n);
  return ids;
}

std::vector<std::pair<uint32_t, uint32_t>> partition_cluster_bins(uint32_t n,
                                                                  uint32_t u) {
  if (u < 1) throw Error(ErrorKind::Config, "cluster bins: u must be >= 1");
  std::vector<std::pair<uint32_t, uint32_t>> out;
  uint32_t base = n / u;
  uint32_t extra = n % u;  // earlier bins take the remainder
  uint32_t start = 0;
  for (uint32_t j = 0; j < u; ++j) {
    uint32_t size = base + (j < extra ? 1 : 0);
    out.emplace_back(start, start + size);
    start += size;
  }
  return out;
}

std::vector<ClusterFeatures> extract_features(
    const ClusterModel& model, const SparseBins& bins,
    const DenseVector& query, const std::vector<uint32_t>& stage1_order,
    const SelectorConfig& cfg) {
  const uint32_t n = static_cast<uint32_t>(stage1_order.size());
  const uint32_t v = static_cast<uint32_t>(bins.bins.size());
  auto cluster_bins = partition_cluster_bins(n, cfg.u);

  // candidate cluster_id -> position in stage1_order
  std::unordered_map<uint32_t, uint32_t> position;
  for (uint32_t i = 0; i < n; ++i) position[stage1_order[i]] = i;

  // overlap accumulation over the sparse bins, candidates only
  std::vector<std::vector<uint32_t>> counts(n, std::vector<uint32_t>(v, 0));
  std::vector<std::vector<double>> score_sums(n, std::vector<double>(v, 0.0));
  for (uint32_t j = 0; j < v; ++j) {
    for (const auto& sd : bins.bins[j]) {
      auto it = position.find(model.assignment[sd.doc_id]);
      if (it == position.end()) continue;
      ++counts[it->second][j];
      score_sums[it->second][j] += sd.score;
    }
  }

  std::vector<ClusterFeatures> features(n);
  for (uint32_t i = 0; i < n; ++i) {
    uint32_t ci = stage1_order[i];
    ClusterFeatures& f = features[i];
    f.sim_q = dot(query, model.centroids[ci]);

    // neighbor-graph similarities of ci; pairs pruned from the top-m list
    // contribute 0
    std::unordered_map<uint32_t, double> sim_to;
    if (ci < model.neighbor_graph.size())
      for (const auto& nb : model.neighbor_graph[ci])
        sim_to[nb.cluster_id] = nb.similarity;

    f.avg_dist.assign(cfg.u, 0.0);
    for (uint32_t j = 0; j < cfg.u; ++j) {
      auto [lo, hi] = cluster_bins[j];
      if (hi == lo) continue;
      double sum = 0.0;
      for (uint32_t l = lo; l < hi; ++l) {
        uint32_t cl = stage1_order[l];
        if (cl == ci) {
          sum += dot(model.centroids[ci], model.centroids[ci]);
        } else if (auto it = sim_to.find(cl); it != sim_to.end()) {
          sum += it->second;
        }
      }
      f.avg_dist[j] = sum / static_cast<double>(hi - lo);
    }

    f.p_counts.assign(v, 0.0);
    f.q_scores.assign(v, 0.0);
    for (uint32_t j = 0; j < v; ++j) {
      f.p_counts[j] = static_cast<double>(counts[i][j]);
      if (counts[i][j] > 0)
        f.q_scores[j] = score_sums[i][j] / static_cast<double>(counts[i][j]);
    }
  }
  return features;
}

std::vector<double> score_clusters(const LstmParams& lstm,
                                   const std::vector<ClusterFeatures>& features) {
  std::vector<std::vector<double>> seq;
  seq.reserve(features.size());
  for (const auto& f : features) seq.push_back(f.flatten());
  return lstm_forward(lstm, seq);
}

std::vector<uint32_t> select_clusters(const LstmParams& lstm,
                                      const std::vector<ClusterFeatures>& features,
                                      const std::vector<uint32_t>& stage1_order,
                                      double theta) {
  if (features.size() != stage1_order.size())
    throw Error(ErrorKind::State, "select_clusters: feature/order mismatch");
  auto scores = score_clusters(lstm, features);
  std::vector<uint32_t> selected;
  for (size_t i = 0; i < scores.size(); ++i)
    if (scores[i] >= theta) selected.push_back(stage1_order[i]);
  return selected;
}

}  // namespace clusd
