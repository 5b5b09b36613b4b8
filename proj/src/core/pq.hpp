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

/// Plain product quantizer: per-subspace 256-centroid codebooks and one code
/// byte per subspace per document.
struct PqCodebook {
  uint32_t dim = 0;
  uint32_t num_subspaces = 0;  // M_pq
  uint32_t sub_dim = 0;        // dim / M_pq
  // codebooks[s] is 256 * sub_dim floats, row-major
  std::vector<std::vector<float>> codebooks;
  // codes[d] is M_pq bytes
  std::vector<std::vector<uint8_t>> codes;
};

PqCodebook pq_train(const Corpus& corpus, uint32_t num_subspaces,
                    uint64_t rng_seed, uint32_t max_iters = 15);

/// Asymmetric score: sum over subspaces of dot(query subvector, the
/// document's assigned centroid).
double pq_score(const PqCodebook& cb, const DenseVector& query,
                uint32_t doc_id);

/// Mean squared reconstruction error over the corpus.
double pq_reconstruction_mse(const PqCodebook& cb, const Corpus& corpus);

/// Exhaustive search over PQ codes (ADC), RankedList ordering.
RankedList pq_search(const PqCodebook& cb, const DenseVector& query, size_t k);

}  // namespace clusd
