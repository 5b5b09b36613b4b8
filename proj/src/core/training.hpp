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

#include <vector>

#include "cluster.hpp"
#include "lstm.hpp"
#include "selector.hpp"
#include "sparse_index.hpp"
#include "types.hpp"

namespace clusd {

/// One instance per sampled query: the Stage-I feature sequence, labeled 1
/// for clusters containing at least one of the query's dense top-10 docs.
std::vector<TrainingInstance> build_training_set(
    const Corpus& corpus, const QuerySet& queries, const InvertedIndex& index,
    const ClusterModel& model, const SelectorConfig& selector_cfg,
    size_t num_instances, uint64_t rng_seed, size_t dense_top = 10,
    size_t sparse_k = 1000);

/// Per-feature mean and scale used to whiten inputs during training.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> scale;  // >= a small floor, never 0
};

FeatureStats compute_feature_stats(
    const std::vector<TrainingInstance>& instances);

void standardize_instances(std::vector<TrainingInstance>& instances,
                           const FeatureStats& stats);

/// Rewrites the input-to-gate weights so that params trained on whitened
/// features operate directly on raw features: W' = W / scale,
/// b' = b - W (mean / scale). Exact up to float rounding.
LstmParams fold_input_affine(const LstmParams& params,
                             const FeatureStats& stats);

struct SelectorTrainResult {
  LstmParams params;  // affine-folded, consumes raw features
  std::vector<double> epoch_loss;
  size_t instances_used = 0;
};

/// End-to-end selector training: sample queries, extract features and dense
/// oracle labels, whiten, run SGD, fold the whitening back into the params.
SelectorTrainResult train_selector(const Corpus& corpus,
                                   const QuerySet& queries,
                                   const InvertedIndex& index,
                                   const ClusterModel& model,
                                   const SelectorConfig& selector_cfg,
                                   const TrainConfig& train_cfg,
                                   size_t num_instances, uint32_t hidden_dim);

/// Smallest theta whose expected average selected-cluster count over the
/// given per-query score vectors does not exceed target_avg.
double tune_theta_for_budget(
    const std::vector<std::vector<double>>& per_query_scores,
    double target_avg);

/// Fraction of dense_top docs whose cluster is in the selected set.
double oracle_coverage(const ClusterModel& model,
                       const std::vector<uint32_t>& selected,
                       const RankedList& dense_top);

}  // namespace clusd
