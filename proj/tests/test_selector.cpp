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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "core/cluster.hpp"
#include "core/selector.hpp"
#include "core/sparse_index.hpp"
#include "core/types.hpp"

using namespace clusd;

namespace {

// Random cluster model with unit-norm gaussian centroids and the full
// (m = N-1) neighbor graph; num_docs >= N and an arbitrary assignment.
ClusterModel random_model(uint32_t num_clusters, uint32_t num_docs,
                          uint32_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ClusterModel m;
  m.dim = dim;
  m.centroids.resize(num_clusters, DenseVector(dim));
  for (auto& c : m.centroids) {
    double norm = 0.0;
    for (auto& x : c) {
      x = static_cast<float>(gauss(rng));
      norm += static_cast<double>(x) * x;
    }
    norm = std::sqrt(norm);
    for (auto& x : c) x = static_cast<float>(x / norm);
  }
  m.assignment.resize(num_docs);
  m.members.assign(num_clusters, {});
  std::uniform_int_distribution<uint32_t> pick(0, num_clusters - 1);
  for (uint32_t d = 0; d < num_docs; ++d) {
    m.assignment[d] = pick(rng);
    m.members[m.assignment[d]].push_back(d);
  }
  build_neighbor_graph(m, num_clusters - 1);
  return m;
}

SparseBins random_bins(uint32_t num_docs, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> score(0.1, 5.0);
  std::vector<ScoredDoc> cands;
  for (uint32_t d = 0; d < num_docs; ++d) cands.push_back({d, score(rng)});
  RankedList ranked = make_ranked_list(std::move(cands), num_docs);
  return partition_bins(ranked, {5, 12, 25, num_docs});
}

DenseVector random_query(uint32_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseVector q(dim);
  for (auto& x : q) x = static_cast<float>(gauss(rng));
  return q;
}

}  // namespace

TEST_CASE("priority_vectors counts bin members per cluster") {
  ClusterModel m;
  m.dim = 1;
  m.centroids = {{1.0f}, {1.0f}};
  m.assignment = {0, 1, 0, 1, 0};
  SparseBins bins;
  bins.boundaries = {2, 4};
  // bin 1: docs 0, 1; bin 2: docs 2, 4
  bins.bins = {{{0, 3.0}, {1, 2.0}}, {{2, 1.5}, {4, 1.0}}};
  auto P = priority_vectors(m, bins);
  REQUIRE(P.size() == 2);
  CHECK(P[0] == std::vector<uint32_t>{1, 2});  // docs 0 | 2, 4
  CHECK(P[1] == std::vector<uint32_t>{1, 0});  // doc 1
}

TEST_CASE("stage1_rank matches a naive multikey sort") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    ClusterModel m = random_model(12, 60, 8, rng);
    SparseBins bins = random_bins(60, rng);
    DenseVector q = random_query(8, rng);

    auto got = stage1_rank(m, bins, q, 12);

    auto P = priority_vectors(m, bins);
    std::vector<uint32_t> want(12);
    std::iota(want.begin(), want.end(), 0u);
    std::stable_sort(want.begin(), want.end(), [&](uint32_t a, uint32_t b) {
      for (size_t j = 0; j < P[a].size(); ++j)
        if (P[a][j] != P[b][j]) return P[a][j] > P[b][j];
      double da = dot(q, m.centroids[a]), db = dot(q, m.centroids[b]);
      if (da != db) return da > db;
      return a < b;
    });
    CHECK(got == want);
  }
}

TEST_CASE("stage1_rank truncates to n and caps at N") {
  std::mt19937_64 rng(5);
  ClusterModel m = random_model(10, 50, 4, rng);
  SparseBins bins = random_bins(50, rng);
  DenseVector q = random_query(4, rng);
  CHECK(stage1_rank(m, bins, q, 3).size() == 3);
  CHECK(stage1_rank(m, bins, q, 99).size() == 10);
}

TEST_CASE("stage1_rank tie-breaking") {
  // equal priority vectors: order falls back to centroid dot, then id
  ClusterModel m;
  m.dim = 2;
  m.centroids = {{0.0f, 1.0f}, {1.0f, 0.0f}, {0.0f, 1.0f}};
  m.assignment = {0, 1, 2};
  SparseBins bins;
  bins.boundaries = {3};
  bins.bins = {{}};  // no sparse evidence: all priority vectors are zero
  DenseVector q = {1.0f, 0.0f};
  auto order = stage1_rank(m, bins, q, 3);
  REQUIRE(order.size() == 3);
  CHECK(order[0] == 1);  // highest dot
  CHECK(order[1] == 0);  // dot tie with 2, lower id first
  CHECK(order[2] == 2);
}

TEST_CASE("SortByDist order ignores the sparse bins") {
  std::mt19937_64 rng(7);
  ClusterModel m = random_model(8, 40, 4, rng);
  SparseBins bins = random_bins(40, rng);
  DenseVector q = random_query(4, rng);
  auto got = stage1_rank(m, bins, q, 8, Stage1Order::SortByDist);
  auto want = rank_clusters_by_centroid(m, q);
  CHECK(got == want);
}

TEST_CASE("partition_cluster_bins near-equal split") {
  auto even = partition_cluster_bins(12, 6);
  REQUIRE(even.size() == 6);
  for (uint32_t j = 0; j < 6; ++j) {
    CHECK(even[j].first == 2 * j);
    CHECK(even[j].second == 2 * j + 2);
  }
  // 32 over 6: earlier bins take the remainder -> 6,6,6,5,5,4? no: base 5,
  // extra 2 -> sizes 6,6,5,5,5,5
  auto uneven = partition_cluster_bins(32, 6);
  std::vector<uint32_t> sizes;
  for (auto [lo, hi] : uneven) sizes.push_back(hi - lo);
  CHECK(sizes == std::vector<uint32_t>{6, 6, 5, 5, 5, 5});
  CHECK(uneven.front().first == 0);
  CHECK(uneven.back().second == 32);

  auto tiny = partition_cluster_bins(2, 6);  // more bins than elements
  sizes.clear();
  for (auto [lo, hi] : tiny) sizes.push_back(hi - lo);
  CHECK(sizes == std::vector<uint32_t>{1, 1, 0, 0, 0, 0});

  CHECK_THROWS_AS(partition_cluster_bins(4, 0), Error);
}

TEST_CASE("feature width follows the config") {
  SelectorConfig cfg;
  CHECK(cfg.v() == 7);
  CHECK(cfg.feature_width() == 21);  // 1 + 6 + 2*7
  cfg.bin_boundaries = {10, 100};
  cfg.u = 4;
  CHECK(cfg.feature_width() == 1 + 4 + 2 * 2);

  ClusterFeatures f;
  f.sim_q = 0.5;
  f.avg_dist = {1, 2};
  f.p_counts = {3};
  f.q_scores = {4};
  CHECK(f.flatten() == std::vector<double>{0.5, 1, 2, 3, 4});
}

TEST_CASE("extract_features matches a brute-force oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const uint32_t N = 16, D = 100, dim = 8;
    ClusterModel m = random_model(N, D, dim, rng);
    SparseBins bins = random_bins(D, rng);
    DenseVector q = random_query(dim, rng);
    SelectorConfig cfg;
    cfg.u = 3;
    cfg.bin_boundaries = bins.boundaries;
    auto order = stage1_rank(m, bins, q, 10);
    auto feats = extract_features(m, bins, q, order, cfg);
    REQUIRE(feats.size() == order.size());

    const uint32_t v = static_cast<uint32_t>(bins.bins.size());
    auto cbins = partition_cluster_bins(10, cfg.u);
    for (uint32_t i = 0; i < order.size(); ++i) {
      uint32_t ci = order[i];
      CHECK(feats[i].sim_q == doctest::Approx(dot(q, m.centroids[ci])));

      // average pairwise centroid similarity against each cluster bin; the
      // full neighbor graph is present so nothing is pruned here
      REQUIRE(feats[i].avg_dist.size() == cfg.u);
      for (uint32_t j = 0; j < cfg.u; ++j) {
        auto [lo, hi] = cbins[j];
        double sum = 0.0;
        for (uint32_t l = lo; l < hi; ++l)
          sum += dot(m.centroids[ci], m.centroids[order[l]]);
        CHECK(feats[i].avg_dist[j] ==
              doctest::Approx(sum / (hi - lo)).epsilon(1e-5));
      }

      REQUIRE(feats[i].p_counts.size() == v);
      REQUIRE(feats[i].q_scores.size() == v);
      for (uint32_t j = 0; j < v; ++j) {
        uint32_t count = 0;
        double score_sum = 0.0;
        for (const auto& sd : bins.bins[j]) {
          if (m.assignment[sd.doc_id] == ci) {
            ++count;
            score_sum += sd.score;
          }
        }
        CHECK(feats[i].p_counts[j] == doctest::Approx(count));
        double want = count ? score_sum / count : 0.0;
        CHECK(feats[i].q_scores[j] == doctest::Approx(want));
      }
    }
  }
}

TEST_CASE("pruned neighbor pairs contribute zero similarity") {
  std::mt19937_64 rng(13);
  ClusterModel m = random_model(10, 40, 6, rng);
  build_neighbor_graph(m, 1);  // keep only the single best neighbor
  SparseBins bins = random_bins(40, rng);
  DenseVector q = random_query(6, rng);
  SelectorConfig cfg;
  cfg.u = 2;
  cfg.bin_boundaries = bins.boundaries;
  auto order = stage1_rank(m, bins, q, 10);
  auto feats = extract_features(m, bins, q, order, cfg);

  auto cbins = partition_cluster_bins(10, cfg.u);
  for (uint32_t i = 0; i < order.size(); ++i) {
    uint32_t ci = order[i];
    uint32_t best = m.neighbor_graph[ci][0].cluster_id;
    double best_sim = m.neighbor_graph[ci][0].similarity;
    for (uint32_t j = 0; j < cfg.u; ++j) {
      auto [lo, hi] = cbins[j];
      double sum = 0.0;
      for (uint32_t l = lo; l < hi; ++l) {
        uint32_t cl = order[l];
        if (cl == ci)
          sum += dot(m.centroids[ci], m.centroids[ci]);  // self keeps its dot
        else if (cl == best)
          sum += best_sim;
        // any other pair was pruned from the graph: contributes 0
      }
      CHECK(feats[i].avg_dist[j] ==
            doctest::Approx(sum / (hi - lo)).epsilon(1e-5));
    }
  }
}

TEST_CASE("select_clusters threshold semantics") {
  std::mt19937_64 rng(17);
  ClusterModel m = random_model(8, 40, 4, rng);
  SparseBins bins = random_bins(40, rng);
  DenseVector q = random_query(4, rng);
  SelectorConfig cfg;
  cfg.u = 2;
  cfg.bin_boundaries = bins.boundaries;
  auto order = stage1_rank(m, bins, q, 8);
  auto feats = extract_features(m, bins, q, order, cfg);
  LstmParams lstm = LstmParams::init_random(cfg.feature_width(), 4, 1);

  // theta 0 keeps everything in Stage-I order; theta > 1 keeps nothing
  auto all = select_clusters(lstm, feats, order, 0.0);
  CHECK(all == order);
  CHECK(select_clusters(lstm, feats, order, 1.01).empty());

  // selection is exactly the scores >= theta, in order
  auto scores = score_clusters(lstm, feats);
  double theta = scores[scores.size() / 2];
  auto some = select_clusters(lstm, feats, order, theta);
  std::vector<uint32_t> want;
  for (size_t i = 0; i < scores.size(); ++i)
    if (scores[i] >= theta) want.push_back(order[i]);
  CHECK(some == want);

  CHECK_THROWS_AS(select_clusters(lstm, feats, {0, 1}, 0.5), Error);
}
