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

#include "cluster.hpp"
#include "types.hpp"

namespace clusd {

/// I/O accounting for one store handle. simulated_overhead models a fixed
/// per-operation software/queueing cost so benchmark numbers are
/// hardware-stable.
struct IoStats {
  uint64_t read_ops = 0;
  uint64_t bytes_read = 0;
  double per_op_overhead = 0.00015;  // seconds

  double simulated_overhead() const {
    return static_cast<double>(read_ops) * per_op_overhead;
  }
};

/// Embeddings laid out cluster-by-cluster so a selected-cluster fetch is one
/// contiguous read. Record: doc_id u64 + dense f32 * dim.
class DiskStore {
 public:
  struct Extent {
    uint64_t offset = 0;
    uint64_t length = 0;
    uint32_t doc_count = 0;
  };

  struct FetchedDoc {
    uint32_t doc_id;
    DenseVector dense;
  };

  explicit DiskStore(const std::string& path, double per_op_overhead = 0.00015);
  ~DiskStore();
  DiskStore(const DiskStore&) = delete;
  DiskStore& operator=(const DiskStore&) = delete;

  uint32_t num_clusters() const { return static_cast<uint32_t>(directory_.size()); }
  uint32_t dim() const { return dim_; }
  uint64_t doc_count() const { return doc_count_; }

  /// One read per requested cluster; adjacent extents of ids that are
  /// consecutive in the request are coalesced into one operation.
  std::vector<std::vector<FetchedDoc>> fetch_clusters(
      const std::vector<uint32_t>& cluster_ids);

  /// One read per document; with coalescing enabled, runs of documents that
  /// are adjacent on disk count as a single operation.
  std::vector<FetchedDoc> fetch_documents(const std::vector<uint32_t>& doc_ids,
                                          bool coalesce = true);

  const IoStats& stats() const { return stats_; }
  void reset_stats() { stats_.read_ops = 0; stats_.bytes_read = 0; }

 private:
  std::vector<FetchedDoc> read_span(uint64_t offset, uint64_t length);

  int fd_ = -1;
  std::string path_;
  uint32_t dim_ = 0;
  uint64_t doc_count_ = 0;
  uint64_t data_begin_ = 0;
  std::vector<Extent> directory_;
  // doc_id -> byte offset of its record
  std::vector<uint64_t> doc_offset_;
  IoStats stats_;
};

void write_store(const Corpus& corpus, const ClusterModel& model,
                 const std::string& path);

}  // namespace clusd
