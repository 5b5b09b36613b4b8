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

#include "fusion.hpp"

#include <algorithm>
#include <limits>

namespace clusd {

RankedList minmax_normalize(const RankedList& ranked) {
  RankedList out = ranked;
  if (out.empty()) return out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& sd : out) {
    lo = std::min(lo, sd.score);
    hi = std::max(hi, sd.score);
  }
  if (hi == lo) {
    for (auto& sd : out) sd.score = 1.0;
    return out;
  }
  double inv = 1.0 / (hi - lo);
  for (auto& sd : out) sd.score = (sd.score - lo) * inv;
  return out;
}

RankedList fuse(const RankedList& sparse_ranked,
                const std::unordered_map<uint32_t, double>& dense_candidates,
                const FusionConfig& config, size_t k) {
  config.validate();
  if (sparse_ranked.empty() && dense_candidates.empty()) return {};

  // Per-system normalization constants over each retrieved set only.
  double s_lo = std::numeric_limits<double>::infinity();
  double s_hi = -std::numeric_limits<double>::infinity();
  for (const auto& sd : sparse_ranked) {
    s_lo = std::min(s_lo, sd.score);
    s_hi = std::max(s_hi, sd.score);
  }
  double d_lo = std::numeric_limits<double>::infinity();
  double d_hi = -std::numeric_limits<double>::infinity();
  for (const auto& [_, s] : dense_candidates) {
    d_lo = std::min(d_lo, s);
    d_hi = std::max(d_hi, s);
  }

  auto normalize = [](double raw, double lo, double hi, bool retrieved) {
    if (hi == lo) return retrieved ? 1.0 : 0.0;  // degenerate constant list
    return (raw - lo) / (hi - lo);
  };

  std::unordered_map<uint32_t, double> sparse_scores;
  sparse_scores.reserve(sparse_ranked.size());
  for (const auto& sd : sparse_ranked) sparse_scores[sd.doc_id] = sd.score;

  std::vector<ScoredDoc> fused;
  fused.reserve(sparse_ranked.size() + dense_candidates.size());
  auto fused_score = [&](uint32_t doc) {
    double s_norm, d_norm;
    if (sparse_ranked.empty()) {
      s_norm = 0.0;  // no sparse system at all: constant contribution
    } else if (auto it = sparse_scores.find(doc); it != sparse_scores.end()) {
      s_norm = normalize(it->second, s_lo, s_hi, true);
    } else {
      s_norm = normalize(config.impute_factor * s_lo, s_lo, s_hi, false);
    }
    if (dense_candidates.empty()) {
      d_norm = 0.0;
    } else if (auto it = dense_candidates.find(doc);
               it != dense_candidates.end()) {
      d_norm = normalize(it->second, d_lo, d_hi, true);
    } else {
      d_norm = normalize(config.impute_factor * d_lo, d_lo, d_hi, false);
    }
    return config.alpha * s_norm + (1.0 - config.alpha) * d_norm;
  };

  for (const auto& sd : sparse_ranked)
    fused.push_back({sd.doc_id, fused_score(sd.doc_id)});
  for (const auto& [doc, _] : dense_candidates)
    if (!sparse_scores.count(doc)) fused.push_back({doc, fused_score(doc)});

  return make_ranked_list(std::move(fused), k);
}

}  // namespace clusd
