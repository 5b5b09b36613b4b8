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

#include "pq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace clusd {

namespace {

constexpr uint32_t kCentroidsPerSubspace = 256;

float sub_sq_dist(const float* a, const float* b, uint32_t n) {
  float acc = 0.0f;
  for (uint32_t i = 0; i < n; ++i) {
    float d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

PqCodebook pq_train(const Corpus& corpus, uint32_t num_subspaces,
                    uint64_t rng_seed, uint32_t max_iters) {
  if (num_subspaces < 1 || corpus.dim % num_subspaces != 0)
    throw Error(ErrorKind::Config,
                "pq_train: dim " + std::to_string(corpus.dim) +
                    " not divisible by M_pq " + std::to_string(num_subspaces));
  const uint32_t D = static_cast<uint32_t>(corpus.size());
  if (D == 0) throw Error(ErrorKind::Config, "pq_train: empty corpus");

  PqCodebook cb;
  cb.dim = corpus.dim;
  cb.num_subspaces = num_subspaces;
  cb.sub_dim = corpus.dim / num_subspaces;
  cb.codebooks.assign(num_subspaces,
                      std::vector<float>(kCentroidsPerSubspace * cb.sub_dim));
  cb.codes.assign(D, std::vector<uint8_t>(num_subspaces));

  std::mt19937_64 rng(rng_seed);

  const uint32_t K = std::min<uint32_t>(kCentroidsPerSubspace, D);
  for (uint32_t s = 0; s < num_subspaces; ++s) {
    const uint32_t off = s * cb.sub_dim;
    auto* book = cb.codebooks[s].data();

    // init: K distinct sample points (duplicated vectors are harmless)
    std::vector<uint32_t> perm(D);
    for (uint32_t i = 0; i < D; ++i) perm[i] = i;
    for (uint32_t i = 0; i < K; ++i) {
      std::uniform_int_distribution<uint32_t> pick(i, D - 1);
      std::swap(perm[i], perm[pick(rng)]);
    }
    for (uint32_t c = 0; c < kCentroidsPerSubspace; ++c) {
      uint32_t src = perm[c % K];
      const float* x = corpus.docs[src].dense.data() + off;
      std::copy(x, x + cb.sub_dim, book + c * cb.sub_dim);
    }

    std::vector<uint8_t> assign(D, 0);
    for (uint32_t iter = 0; iter < max_iters; ++iter) {
      bool changed = false;
      for (uint32_t d = 0; d < D; ++d) {
        const float* x = corpus.docs[d].dense.data() + off;
        float best = std::numeric_limits<float>::infinity();
        uint8_t arg = 0;
        for (uint32_t c = 0; c < kCentroidsPerSubspace; ++c) {
          float d2 = sub_sq_dist(x, book + c * cb.sub_dim, cb.sub_dim);
          if (d2 < best) {
            best = d2;
            arg = static_cast<uint8_t>(c);
          }
        }
        if (assign[d] != arg) changed = true;
        assign[d] = arg;
      }
      std::vector<double> sum(kCentroidsPerSubspace * cb.sub_dim, 0.0);
      std::vector<uint32_t> count(kCentroidsPerSubspace, 0);
      for (uint32_t d = 0; d < D; ++d) {
        const float* x = corpus.docs[d].dense.data() + off;
        double* row = sum.data() + assign[d] * cb.sub_dim;
        for (uint32_t i = 0; i < cb.sub_dim; ++i) row[i] += x[i];
        ++count[assign[d]];
      }
      for (uint32_t c = 0; c < kCentroidsPerSubspace; ++c) {
        if (count[c] == 0) continue;  // unused centroid keeps its position
        double inv = 1.0 / count[c];
        for (uint32_t i = 0; i < cb.sub_dim; ++i)
          book[c * cb.sub_dim + i] =
              static_cast<float>(sum[c * cb.sub_dim + i] * inv);
      }
      if (!changed) break;
    }
    for (uint32_t d = 0; d < D; ++d) cb.codes[d][s] = assign[d];
  }
  return cb;
}

double pq_score(const PqCodebook& cb, const DenseVector& query,
                uint32_t doc_id) {
  if (query.size() != cb.dim)
    throw Error(ErrorKind::State, "pq_score: dim mismatch");
  if (doc_id >= cb.codes.size())
    throw Error(ErrorKind::State, "pq_score: doc_id out of range");
  double acc = 0.0;
  for (uint32_t s = 0; s < cb.num_subspaces; ++s) {
    const float* q = query.data() + s * cb.sub_dim;
    const float* c =
        cb.codebooks[s].data() + cb.codes[doc_id][s] * cb.sub_dim;
    for (uint32_t i = 0; i < cb.sub_dim; ++i)
      acc += static_cast<double>(q[i]) * static_cast<double>(c[i]);
  }
  return acc;
}

double pq_reconstruction_mse(const PqCodebook& cb, const Corpus& corpus) {
  if (corpus.size() != cb.codes.size())
    throw Error(ErrorKind::State, "pq_reconstruction_mse: corpus mismatch");
  double total = 0.0;
  for (uint32_t d = 0; d < corpus.size(); ++d) {
    for (uint32_t s = 0; s < cb.num_subspaces; ++s) {
      const float* x = corpus.docs[d].dense.data() + s * cb.sub_dim;
      const float* c = cb.codebooks[s].data() + cb.codes[d][s] * cb.sub_dim;
      for (uint32_t i = 0; i < cb.sub_dim; ++i) {
        double diff = static_cast<double>(x[i]) - static_cast<double>(c[i]);
        total += diff * diff;
      }
    }
  }
  return total / (static_cast<double>(corpus.size()) * cb.dim);
}

RankedList pq_search(const PqCodebook& cb, const DenseVector& query, size_t k) {
  // ADC lookup table: per subspace, dot of the query subvector with each
  // codebook centroid.
  std::vector<double> table(cb.num_subspaces * kCentroidsPerSubspace);
  for (uint32_t s = 0; s < cb.num_subspaces; ++s) {
    const float* q = query.data() + s * cb.sub_dim;
    for (uint32_t c = 0; c < kCentroidsPerSubspace; ++c) {
      const float* cen = cb.codebooks[s].data() + c * cb.sub_dim;
      double acc = 0.0;
      for (uint32_t i = 0; i < cb.sub_dim; ++i)
        acc += static_cast<double>(q[i]) * static_cast<double>(cen[i]);
      table[s * kCentroidsPerSubspace + c] = acc;
    }
  }
  std::vector<ScoredDoc> cands;
  cands.reserve(cb.codes.size());
  for (uint32_t d = 0; d < cb.codes.size(); ++d) {
    double acc = 0.0;
    for (uint32_t s = 0; s < cb.num_subspaces; ++s)
      acc += table[s * kCentroidsPerSubspace + cb.codes[d][s]];
    cands.push_back({d, acc});
  }
  return make_ranked_list(std::move(cands), k);
}

}  // namespace clusd
