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
#include <unordered_map>
#include <vector>

#include "types.hpp"

namespace clusd {

/// Exact-retrieval inverted index: term_id -> postings in ascending doc_id.
struct InvertedIndex {
  struct Posting {
    uint32_t doc_id;
    float weight;
  };
  std::unordered_map<uint32_t, std::vector<Posting>> postings;
  uint32_t doc_count = 0;
  uint32_t k_default = 1000;

  size_t total_postings() const {
    size_t n = 0;
    for (const auto& [_, list] : postings) n += list.size();
    return n;
  }
};

/// Partition of a ranked list into position bins B_1..B_v.
/// Bin j holds ranks (boundary_{j-1}, boundary_j], 1-based.
struct SparseBins {
  std::vector<uint32_t> boundaries;           // ascending cut points
  std::vector<std::vector<ScoredDoc>> bins;   // v = boundaries.size()
};

/// Rank ranges top-10 / 11-25 / 26-50 / 51-100 / 101-200 / 201-500 / 501-k.
std::vector<uint32_t> default_bin_boundaries(uint32_t k = 1000);

InvertedIndex build_index(const Corpus& corpus);

/// Exact top-k by sparse dot product; zero-score documents never returned.
RankedList sparse_search(const InvertedIndex& index, const SparseVector& query,
                         size_t k);

SparseBins partition_bins(const RankedList& ranked,
                          const std::vector<uint32_t>& boundaries);

void save_index(const InvertedIndex& index, const std::string& path);
InvertedIndex load_index(const std::string& path);

}  // namespace clusd
