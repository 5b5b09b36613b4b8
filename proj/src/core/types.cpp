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

#include "types.hpp"

#include <algorithm>
#include <cmath>

namespace clusd {

RankedList make_ranked_list(std::vector<ScoredDoc> candidates, size_t k) {
  if (candidates.size() > k) {
    std::partial_sort(candidates.begin(), candidates.begin() + k,
                      candidates.end(), ranked_before);
    candidates.resize(k);
  } else {
    std::sort(candidates.begin(), candidates.end(), ranked_before);
  }
  return candidates;
}

double dot(const DenseVector& a, const DenseVector& b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::State, "dense dimension mismatch: " +
                                      std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()));
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

double dot_sparse(const SparseVector& a, const SparseVector& b) {
  // Merge join over ascending term_ids; accumulation order is therefore
  // identical for the index path and the brute-force oracle.
  double acc = 0.0;
  auto ia = a.entries.begin();
  auto ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->term_id < ib->term_id) {
      ++ia;
    } else if (ib->term_id < ia->term_id) {
      ++ib;
    } else {
      acc += static_cast<double>(ia->weight) * static_cast<double>(ib->weight);
      ++ia;
      ++ib;
    }
  }
  return acc;
}

void validate_sparse(const SparseVector& v, const std::string& context) {
  uint32_t prev = 0;
  bool first = true;
  for (const auto& e : v.entries) {
    if (!first && e.term_id <= prev)
      throw Error(ErrorKind::Parse,
                  context + ": term_ids not strictly increasing (term " +
                      std::to_string(e.term_id) + ")");
    if (!(e.weight > 0.0f) || !std::isfinite(e.weight))
      throw Error(ErrorKind::Parse,
                  context + ": weight must be finite and > 0 (term " +
                      std::to_string(e.term_id) + ")");
    prev = e.term_id;
    first = false;
  }
}

}  // namespace clusd
