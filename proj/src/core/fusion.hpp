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

#include <unordered_map>

#include "types.hpp"

namespace clusd {

struct FusionConfig {
  double alpha = 0.5;          // weight of the sparse system
  double impute_factor = 0.95;  // missing raw score = factor * system floor

  void validate() const {
    if (alpha < 0.0 || alpha > 1.0)
      throw Error(ErrorKind::Config, "fusion: alpha must be in [0,1]");
  }
};

/// Maps scores to (s - min)/(max - min) over the list; constant or
/// single-entry lists map to all 1.0. Order preserved.
RankedList minmax_normalize(const RankedList& ranked);

/// Linear interpolation of per-system min-max normalized scores over the
/// union of both candidate sets. A document missing from one system is
/// imputed that system's raw floor (impute_factor * lowest retrieved raw
/// score) before normalization.
RankedList fuse(const RankedList& sparse_ranked,
                const std::unordered_map<uint32_t, double>& dense_candidates,
                const FusionConfig& config, size_t k);

}  // namespace clusd
