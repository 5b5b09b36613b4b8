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
#include <tuple>

#include "config.hpp"
#include "types.hpp"

namespace clusd {

/// Parameters of the synthetic corpus generator. Field names double as the
/// keys of the synth config file.
struct SynthConfig {
  uint64_t num_docs = 5000;
  uint64_t num_queries = 200;
  uint32_t dim = 64;
  uint32_t vocab_size = 2000;
  uint32_t num_topics = 32;
  double dense_noise_sigma = 0.12;
  uint32_t sparse_terms_per_doc = 224;
  uint32_t relevant_per_query = 1;
  uint64_t rng_seed = 1;

  static SynthConfig from_config(const KeyValueConfig& cfg);
  void validate() const;
};

/// Corpus / query files share one binary layout ("CLSD"):
///   magic, version u32, count u64, dim u32,
///   then per record: id u64, term count u32, (term_id u32, weight f32)*,
///   dense f32 * dim.
Corpus load_corpus(const std::string& path, bool remap_ids = false);
void save_corpus(const Corpus& corpus, const std::string& path);

QuerySet load_queries(const std::string& path);
void save_queries(const QuerySet& queries, const std::string& path);

/// TREC-style judgment lines: "query_id 0 doc_id grade".
/// Duplicate (query, doc) pairs keep the last grade; a warning goes to stderr.
Qrels load_qrels(const std::string& path);
void save_qrels(const Qrels& qrels, const std::string& path);

/// Deterministic topic-model generator with planted relevance. Documents and
/// queries of a topic share a term pool and a dense center; relevance is the
/// nearest same-topic documents to the query's latent (pre-noise) vector, so
/// both the sparse and the dense channel carry independent, partial signal.
std::tuple<Corpus, QuerySet, Qrels> generate_synthetic(const SynthConfig& cfg);

/// Rounds a sparse weight to 3 decimals (the on-disk resolution).
float quantize_weight(double w);

}  // namespace clusd
