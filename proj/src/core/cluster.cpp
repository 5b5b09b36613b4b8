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

#include "cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "binio.hpp"

namespace clusd {

namespace {

constexpr char kClusterMagic[4] = {'C', 'L', 'S', 'C'};
constexpr uint32_t kFormatVersion = 1;

// float-accumulated squared distance; hot path of the assignment step
float sq_dist(const float* a, const float* b, uint32_t dim) {
  float acc = 0.0f;
  for (uint32_t i = 0; i < dim; ++i) {
    float d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

void rebuild_members(ClusterModel& model) {
  model.members.assign(model.num_clusters(), {});
  for (uint32_t d = 0; d < model.assignment.size(); ++d)
    model.members[model.assignment[d]].push_back(d);
}

}  // namespace

ClusterModel kmeans_fit(const Corpus& corpus, uint32_t n_clusters,
                        uint32_t max_iters, uint64_t rng_seed) {
  const uint32_t D = static_cast<uint32_t>(corpus.size());
  if (n_clusters < 1 || n_clusters > D)
    throw Error(ErrorKind::Config,
                "kmeans_fit: need 1 <= N <= D, got N=" +
                    std::to_string(n_clusters) + " D=" + std::to_string(D));
  const uint32_t dim = corpus.dim;

  ClusterModel model;
  model.dim = dim;
  model.centroids.resize(n_clusters);

  std::mt19937_64 rng(rng_seed);

  // k-means++ seeding
  {
    std::uniform_int_distribution<uint32_t> first(0, D - 1);
    model.centroids[0] = corpus.docs[first(rng)].dense;
    std::vector<double> best_d2(D, std::numeric_limits<double>::infinity());
    for (uint32_t c = 1; c < n_clusters; ++c) {
      const float* prev = model.centroids[c - 1].data();
      double total = 0.0;
      for (uint32_t d = 0; d < D; ++d) {
        double d2 = sq_dist(corpus.docs[d].dense.data(), prev, dim);
        if (d2 < best_d2[d]) best_d2[d] = d2;
        total += best_d2[d];
      }
      uint32_t chosen = 0;
      if (total > 0.0) {
        std::uniform_real_distribution<double> unif(0.0, total);
        double target = unif(rng);
        double run = 0.0;
        chosen = D - 1;
        for (uint32_t d = 0; d < D; ++d) {
          run += best_d2[d];
          if (run >= target) {
            chosen = d;
            break;
          }
        }
      } else {
        std::uniform_int_distribution<uint32_t> any(0, D - 1);
        chosen = any(rng);
      }
      model.centroids[c] = corpus.docs[chosen].dense;
    }
  }

  model.assignment.assign(D, 0);
  std::vector<uint32_t> prev_assignment;

  for (uint32_t iter = 0; iter < max_iters; ++iter) {
    // assign, ties to the lowest cluster id
    for (uint32_t d = 0; d < D; ++d) {
      const float* x = corpus.docs[d].dense.data();
      float best = std::numeric_limits<float>::infinity();
      uint32_t arg = 0;
      for (uint32_t c = 0; c < n_clusters; ++c) {
        float d2 = sq_dist(x, model.centroids[c].data(), dim);
        if (d2 < best) {
          best = d2;
          arg = c;
        }
      }
      model.assignment[d] = arg;
    }

    rebuild_members(model);

    // repair empties: move the farthest member of the largest cluster
    for (uint32_t c = 0; c < n_clusters; ++c) {
      while (model.members[c].empty()) {
        uint32_t largest = 0;
        for (uint32_t l = 1; l < n_clusters; ++l)
          if (model.members[l].size() > model.members[largest].size())
            largest = l;
        if (model.members[largest].size() < 2)
          throw Error(ErrorKind::Internal, "kmeans_fit: cannot repair cluster");
        float worst = -1.0f;
        uint32_t worst_doc = model.members[largest][0];
        for (uint32_t d : model.members[largest]) {
          float d2 = sq_dist(corpus.docs[d].dense.data(),
                             model.centroids[largest].data(), dim);
          if (d2 > worst) {
            worst = d2;
            worst_doc = d;
          }
        }
        model.assignment[worst_doc] = c;
        auto& src = model.members[largest];
        src.erase(std::find(src.begin(), src.end(), worst_doc));
        model.members[c].push_back(worst_doc);
        std::sort(model.members[c].begin(), model.members[c].end());
      }
    }

    // update centroids to member means, 64-bit accumulation
    for (uint32_t c = 0; c < n_clusters; ++c) {
      std::vector<double> sum(dim, 0.0);
      for (uint32_t d : model.members[c]) {
        const float* x = corpus.docs[d].dense.data();
        for (uint32_t i = 0; i < dim; ++i) sum[i] += x[i];
      }
      double inv = 1.0 / static_cast<double>(model.members[c].size());
      for (uint32_t i = 0; i < dim; ++i)
        model.centroids[c][i] = static_cast<float>(sum[i] * inv);
    }

    double objective = 0.0;
    for (uint32_t d = 0; d < D; ++d)
      objective += sq_dist(corpus.docs[d].dense.data(),
                           model.centroids[model.assignment[d]].data(), dim);
    model.objective_trace.push_back(objective);

    if (model.assignment == prev_assignment) break;
    prev_assignment = model.assignment;
  }

  return model;
}

void build_neighbor_graph(ClusterModel& model, uint32_t m) {
  const uint32_t N = model.num_clusters();
  model.neighbor_graph.assign(N, {});
  for (uint32_t c = 0; c < N; ++c) {
    std::vector<ClusterModel::Neighbor> cands;
    cands.reserve(N - 1);
    for (uint32_t o = 0; o < N; ++o) {
      if (o == c) continue;
      cands.push_back(
          {o, static_cast<float>(dot(model.centroids[c], model.centroids[o]))});
    }
    size_t keep = std::min<size_t>(m, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const auto& a, const auto& b) {
                        if (a.similarity != b.similarity)
                          return a.similarity > b.similarity;
                        return a.cluster_id < b.cluster_id;
                      });
    cands.resize(keep);
    model.neighbor_graph[c] = std::move(cands);
  }
}

RankedList full_dense_search(const Corpus& corpus, const DenseVector& query,
                             size_t k) {
  if (query.size() != corpus.dim)
    throw Error(ErrorKind::State, "full_dense_search: dim mismatch");
  std::vector<ScoredDoc> cands;
  cands.reserve(corpus.size());
  for (const auto& doc : corpus.docs)
    cands.push_back({doc.doc_id, dot(query, doc.dense)});
  return make_ranked_list(std::move(cands), k);
}

std::vector<uint32_t> rank_clusters_by_centroid(const ClusterModel& model,
                                                const DenseVector& query) {
  std::vector<ScoredDoc> scored;
  scored.reserve(model.num_clusters());
  for (uint32_t c = 0; c < model.num_clusters(); ++c)
    scored.push_back({c, dot(query, model.centroids[c])});
  std::sort(scored.begin(), scored.end(), ranked_before);
  std::vector<uint32_t> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.doc_id);
  return out;
}

RankedList ivf_search(const ClusterModel& model, const Corpus& corpus,
                      const DenseVector& query, uint32_t cluster_budget,
                      size_t k) {
  if (cluster_budget < 1 || cluster_budget > model.num_clusters())
    throw Error(ErrorKind::Config, "ivf_search: bad cluster_budget");
  std::vector<uint32_t> order = rank_clusters_by_centroid(model, query);
  std::vector<ScoredDoc> cands;
  for (uint32_t i = 0; i < cluster_budget; ++i)
    for (uint32_t d : model.members[order[i]])
      cands.push_back({d, dot(query, corpus.docs[d].dense)});
  return make_ranked_list(std::move(cands), k);
}

void save_cluster_model(const ClusterModel& model, const std::string& path) {
  BinWriter out(path);
  out.magic(kClusterMagic);
  out.pod<uint32_t>(kFormatVersion);
  out.pod<uint32_t>(model.num_clusters());
  out.pod<uint32_t>(model.dim);
  out.pod<uint64_t>(model.assignment.size());
  for (const auto& c : model.centroids) out.array(c.data(), c.size());
  out.array(model.assignment.data(), model.assignment.size());
  for (const auto& neighbors : model.neighbor_graph) {
    out.pod<uint32_t>(static_cast<uint32_t>(neighbors.size()));
    out.array(neighbors.data(), neighbors.size());
  }
  // neighbor_graph may be empty (not yet built): store list count
  if (model.neighbor_graph.empty())
    for (uint32_t c = 0; c < model.num_clusters(); ++c) out.pod<uint32_t>(0u);
  out.close();
}

ClusterModel load_cluster_model(const std::string& path) {
  BinReader in(path);
  in.expect_magic(kClusterMagic);
  uint32_t version = in.pod<uint32_t>();
  if (version != kFormatVersion)
    throw Error(ErrorKind::Parse, path + ": unsupported cluster model version");
  ClusterModel model;
  uint32_t N = in.pod<uint32_t>();
  model.dim = in.pod<uint32_t>();
  uint64_t D = in.pod<uint64_t>();
  model.centroids.assign(N, DenseVector(model.dim));
  for (auto& c : model.centroids) in.array(c.data(), c.size());
  model.assignment.resize(D);
  in.array(model.assignment.data(), D);
  for (uint32_t a : model.assignment)
    if (a >= N)
      throw Error(ErrorKind::Parse, path + ": assignment out of range");
  model.neighbor_graph.resize(N);
  for (auto& neighbors : model.neighbor_graph) {
    uint32_t count = in.pod<uint32_t>();
    neighbors.resize(count);
    in.array(neighbors.data(), count);
  }
  rebuild_members(model);
  return model;
}

}  // namespace clusd
