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

#include "sparse_index.hpp"

#include <algorithm>

#include "binio.hpp"

namespace clusd {

namespace {
constexpr char kIndexMagic[4] = {'C', 'L', 'S', 'I'};
constexpr uint32_t kFormatVersion = 1;
}  // namespace

std::vector<uint32_t> default_bin_boundaries(uint32_t k) {
  std::vector<uint32_t> b = {10, 25, 50, 100, 200, 500};
  // drop cut points at or beyond k, then close with k itself
  while (!b.empty() && b.back() >= k) b.pop_back();
  b.push_back(k);
  return b;
}

InvertedIndex build_index(const Corpus& corpus) {
  InvertedIndex index;
  index.doc_count = static_cast<uint32_t>(corpus.size());
  // Docs iterate in ascending doc_id, so each posting list comes out sorted.
  for (const auto& doc : corpus.docs)
    for (const auto& e : doc.sparse.entries)
      index.postings[e.term_id].push_back({doc.doc_id, e.weight});
  return index;
}

RankedList sparse_search(const InvertedIndex& index, const SparseVector& query,
                         size_t k) {
  if (k < 1) throw Error(ErrorKind::Config, "sparse_search: k must be >= 1");
  // Term-at-a-time over query terms in ascending term_id: per-document
  // accumulation order matches the merge-join oracle exactly.
  std::vector<double> acc(index.doc_count, 0.0);
  std::vector<uint32_t> touched;
  for (const auto& qe : query.entries) {
    auto it = index.postings.find(qe.term_id);
    if (it == index.postings.end()) continue;
    for (const auto& p : it->second) {
      if (acc[p.doc_id] == 0.0) touched.push_back(p.doc_id);
      acc[p.doc_id] +=
          static_cast<double>(qe.weight) * static_cast<double>(p.weight);
    }
  }
  std::vector<ScoredDoc> cands;
  cands.reserve(touched.size());
  for (uint32_t d : touched)
    if (acc[d] != 0.0) cands.push_back({d, acc[d]});
  return make_ranked_list(std::move(cands), k);
}

SparseBins partition_bins(const RankedList& ranked,
                          const std::vector<uint32_t>& boundaries) {
  for (size_t j = 1; j < boundaries.size(); ++j)
    if (boundaries[j] <= boundaries[j - 1])
      throw Error(ErrorKind::Config, "partition_bins: boundaries not ascending");
  if (boundaries.empty())
    throw Error(ErrorKind::Config, "partition_bins: no boundaries");
  SparseBins out;
  out.boundaries = boundaries;
  out.bins.resize(boundaries.size());
  size_t bin = 0;
  for (size_t r = 1; r <= ranked.size(); ++r) {
    while (bin < boundaries.size() && r > boundaries[bin]) ++bin;
    if (bin == boundaries.size()) break;  // ranks past the last cut point
    out.bins[bin].push_back(ranked[r - 1]);
  }
  return out;
}

void save_index(const InvertedIndex& index, const std::string& path) {
  BinWriter out(path);
  out.magic(kIndexMagic);
  out.pod<uint32_t>(kFormatVersion);
  out.pod<uint32_t>(index.doc_count);
  out.pod<uint32_t>(index.k_default);
  std::vector<uint32_t> terms;
  terms.reserve(index.postings.size());
  for (const auto& [t, _] : index.postings) terms.push_back(t);
  std::sort(terms.begin(), terms.end());
  out.pod<uint64_t>(terms.size());
  for (uint32_t t : terms) {
    const auto& list = index.postings.at(t);
    out.pod<uint32_t>(t);
    out.pod<uint32_t>(static_cast<uint32_t>(list.size()));
    out.array(list.data(), list.size());
  }
  out.close();
}

InvertedIndex load_index(const std::string& path) {
  BinReader in(path);
  in.expect_magic(kIndexMagic);
  uint32_t version = in.pod<uint32_t>();
  if (version != kFormatVersion)
    throw Error(ErrorKind::Parse, path + ": unsupported index version");
  InvertedIndex index;
  index.doc_count = in.pod<uint32_t>();
  index.k_default = in.pod<uint32_t>();
  uint64_t num_terms = in.pod<uint64_t>();
  for (uint64_t i = 0; i < num_terms; ++i) {
    uint32_t term = in.pod<uint32_t>();
    uint32_t count = in.pod<uint32_t>();
    auto& list = index.postings[term];
    list.resize(count);
    in.array(list.data(), count);
    for (size_t j = 1; j < list.size(); ++j)
      if (list[j].doc_id <= list[j - 1].doc_id)
        throw Error(ErrorKind::Parse,
                    path + ": posting list for term " + std::to_string(term) +
                        " not ascending");
  }
  return index;
}

}  // namespace clusd
