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

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace clusd {

// Error kinds surfaced through the C API as status codes.
enum class ErrorKind {
  Io,
  Parse,
  Config,
  State,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Weighted term vector. Entries sorted by term_id, no duplicates,
/// all weights > 0 (zero-weight entries are dropped at construction).
struct SparseVector {
  struct Entry {
    uint32_t term_id;
    float weight;
    bool operator==(const Entry&) const = default;
  };
  std::vector<Entry> entries;

  bool operator==(const SparseVector&) const = default;
};

using DenseVector = std::vector<float>;

struct Document {
  uint32_t doc_id = 0;
  SparseVector sparse;
  DenseVector dense;
  bool operator==(const Document&) const = default;
};

struct QueryRecord {
  uint32_t query_id = 0;
  SparseVector sparse;
  DenseVector dense;
  bool operator==(const QueryRecord&) const = default;
};

/// Documents with contiguous doc_ids 0..D-1 and a corpus-wide dense dim.
struct Corpus {
  uint32_t dim = 0;
  std::vector<Document> docs;

  size_t size() const { return docs.size(); }
  bool operator==(const Corpus&) const = default;
};

struct QuerySet {
  uint32_t dim = 0;
  std::vector<QueryRecord> queries;

  size_t size() const { return queries.size(); }
  bool operator==(const QuerySet&) const = default;
};

/// query_id -> doc_id -> relevance grade. Absent pair means grade 0.
struct Qrels {
  std::map<uint32_t, std::map<uint32_t, uint32_t>> judgments;

  uint32_t grade(uint32_t query_id, uint32_t doc_id) const {
    auto qit = judgments.find(query_id);
    if (qit == judgments.end()) return 0;
    auto dit = qit->second.find(doc_id);
    return dit == qit->second.end() ? 0 : dit->second;
  }
  bool operator==(const Qrels&) const = default;
};

struct ScoredDoc {
  uint32_t doc_id;
  double score;
  bool operator==(const ScoredDoc&) const = default;
};

/// Descending by score, ties broken by ascending doc_id.
using RankedList = std::vector<ScoredDoc>;

/// Ordering key shared by every retrieval stage.
inline bool ranked_before(const ScoredDoc& a, const ScoredDoc& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.doc_id < b.doc_id;
}

/// Sorts and truncates candidates into a valid RankedList.
RankedList make_ranked_list(std::vector<ScoredDoc> candidates, size_t k);

double dot(const DenseVector& a, const DenseVector& b);
double dot_sparse(const SparseVector& a, const SparseVector& b);
void validate_sparse(const SparseVector& v, const std::string& context);

}  // namespace clusd
