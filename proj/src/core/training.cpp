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

#include "training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>
#include <unordered_set>

namespace clusd {

std::vector<TrainingInstance> build_training_set(
    const Corpus& corpus, const QuerySet& queries, const InvertedIndex& index,
    const ClusterModel& model, const SelectorConfig& selector_cfg,
    size_t num_instances, uint64_t rng_seed, size_t dense_top,
    size_t sparse_k) {
  std::vector<size_t> chosen(queries.size());
  std::iota(chosen.begin(), chosen.end(), 0);
  if (queries.size() > num_instances) {
    std::mt19937_64 rng(rng_seed);
    for (size_t i = 0; i < num_instances; ++i) {
      std::uniform_int_distribution<size_t> pick(i, chosen.size() - 1);
      std::swap(chosen[i], chosen[pick(rng)]);
    }
    chosen.resize(num_instances);
    std::sort(chosen.begin(), chosen.end());
  } else if (queries.size() < num_instances) {
    std::cerr << "warning: requested " << num_instances
              << " training instances but only " << queries.size()
              << " queries available, using all\n";
  }

  std::vector<TrainingInstance> instances;
  instances.reserve(chosen.size());
  for (size_t qi : chosen) {
    const QueryRecord& query = queries.queries[qi];
    RankedList sparse = sparse_search(index, query.sparse, sparse_k);
    SparseBins bins = partition_bins(sparse, selector_cfg.bin_boundaries);
    auto stage1 = stage1_rank(model, bins, query.dense, selector_cfg.n,
                              selector_cfg.order);
    auto features =
        extract_features(model, bins, query.dense, stage1, selector_cfg);

    RankedList top = full_dense_search(corpus, query.dense, dense_top);
    std::unordered_set<uint32_t> positive_clusters;
    for (const auto& sd : top)
      positive_clusters.insert(model.assignment[sd.doc_id]);

    TrainingInstance inst;
    inst.features.reserve(features.size());
    for (const auto& f : features) inst.features.push_back(f.flatten());
    inst.labels.reserve(stage1.size());
    for (uint32_t c : stage1)
      inst.labels.push_back(positive_clusters.count(c) ? 1 : 0);
    instances.push_back(std::move(inst));
  }
  return instances;
}

FeatureStats compute_feature_stats(
    const std::vector<TrainingInstance>& instances) {
  FeatureStats stats;
  size_t width = 0;
  for (const auto& inst : instances)
    if (!inst.features.empty()) {
      width = inst.features[0].size();
      break;
    }
  stats.mean.assign(width, 0.0);
  stats.scale.assign(width, 1.0);
  size_t count = 0;
  for (const auto& inst : instances)
    for (const auto& x : inst.features) {
      for (size_t j = 0; j < width; ++j) stats.mean[j] += x[j];
      ++count;
    }
  if (count == 0) return stats;
  for (auto& m : stats.mean) m /= static_cast<double>(count);
  std::vector<double> var(width, 0.0);
  for (const auto& inst : instances)
    for (const auto& x : inst.features)
      for (size_t j = 0; j < width; ++j) {
        double d = x[j] - stats.mean[j];
        var[j] += d * d;
      }
  for (size_t j = 0; j < width; ++j)
    stats.scale[j] = std::max(std::sqrt(var[j] / count), 1e-6);
  return stats;
}

void standardize_instances(std::vector<TrainingInstance>& instances,
                           const FeatureStats& stats) {
  for (auto& inst : instances)
    for (auto& x : inst.features)
      for (size_t j = 0; j < x.size(); ++j)
        x[j] = (x[j] - stats.mean[j]) / stats.scale[j];
}

LstmParams fold_input_affine(const LstmParams& params,
                             const FeatureStats& stats) {
  LstmParams folded = params;
  const uint32_t H = params.hidden_dim;
  const uint32_t I = params.input_dim;
  if (stats.mean.size() != I)
    throw Error(ErrorKind::State, "fold_input_affine: width mismatch");
  for (int g = 0; g < 4; ++g) {
    const double* W = params.W(g);
    double* Wf = folded.W(g);
    double* bf = folded.b(g);
    for (uint32_t r = 0; r < H; ++r) {
      double shift = 0.0;
      for (uint32_t j = 0; j < I; ++j) {
        double w = W[static_cast<size_t>(r) * I + j] / stats.scale[j];
        Wf[static_cast<size_t>(r) * I + j] = w;
        shift += w * stats.mean[j];
      }
      bf[r] -= shift;
    }
  }
  return folded;
}

SelectorTrainResult train_selector(const Corpus& corpus,
                                   const QuerySet& queries,
                                   const InvertedIndex& index,
                                   const ClusterModel& model,
                                   const SelectorConfig& selector_cfg,
                                   const TrainConfig& train_cfg,
                                   size_t num_instances, uint32_t hidden_dim) {
  auto instances =
      build_training_set(corpus, queries, index, model, selector_cfg,
                         num_instances, train_cfg.rng_seed);
  FeatureStats stats = compute_feature_stats(instances);
  standardize_instances(instances, stats);
  LstmParams init = LstmParams::init_random(selector_cfg.feature_width(),
                                            hidden_dim, train_cfg.rng_seed);
  TrainResult trained = lstm_train(init, instances, train_cfg);

  SelectorTrainResult result;
  result.params = fold_input_affine(trained.params, stats);
  result.epoch_loss = std::move(trained.epoch_loss);
  result.instances_used = instances.size();
  return result;
}

double tune_theta_for_budget(
    const std::vector<std::vector<double>>& per_query_scores,
    double target_avg) {
  if (per_query_scores.empty())
    throw Error(ErrorKind::State, "tune_theta_for_budget: no queries");
  std::vector<double> all;
  for (const auto& scores : per_query_scores)
    all.insert(all.end(), scores.begin(), scores.end());
  if (all.empty()) return 1.1;
  std::sort(all.rbegin(), all.rend());
  double target_total = target_avg * static_cast<double>(per_query_scores.size());
  size_t keep = static_cast<size_t>(std::floor(target_total));
  if (keep == 0) return std::nextafter(all[0], 2.0);  // above every score
  if (keep >= all.size()) return 0.0;
  return all[keep - 1];  // selects scores >= this value
}

double oracle_coverage(const ClusterModel& model,
                       const std::vector<uint32_t>& selected,
                       const RankedList& dense_top) {
  if (dense_top.empty()) return 0.0;
  std::unordered_set<uint32_t> chosen(selected.begin(), selected.end());
  size_t covered = 0;
  for (const auto& sd : dense_top)
    if (chosen.count(model.assignment[sd.doc_id])) ++covered;
  return static_cast<double>(covered) / static_cast<double>(dense_top.size());
}

}  // namespace clusd
