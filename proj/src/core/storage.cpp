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

#include "storage.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstring>

#include "binio.hpp"

namespace clusd {

namespace {
constexpr char kStoreMagic[4] = {'C', 'L', 'S', 'S'};
constexpr uint32_t kFormatVersion = 1;

uint64_t record_size(uint32_t dim) {
  return 8 + static_cast<uint64_t>(dim) * 4;
}
}  // namespace

void write_store(const Corpus& corpus, const ClusterModel& model,
                 const std::string& path) {
  if (model.assignment.size() != corpus.size())
    throw Error(ErrorKind::State, "write_store: model/corpus mismatch");
  const uint32_t N = model.num_clusters();
  const uint64_t rec = record_size(corpus.dim);

  BinWriter out(path);
  out.magic(kStoreMagic);
  out.pod<uint32_t>(kFormatVersion);
  out.pod<uint32_t>(N);
  out.pod<uint32_t>(corpus.dim);
  out.pod<uint64_t>(corpus.size());

  uint64_t data_begin = 4 + 4 + 4 + 4 + 8 + static_cast<uint64_t>(N) * 20;
  uint64_t offset = data_begin;
  for (uint32_t c = 0; c < N; ++c) {
    uint64_t length = rec * model.members[c].size();
    out.pod<uint64_t>(offset);
    out.pod<uint64_t>(length);
    out.pod<uint32_t>(static_cast<uint32_t>(model.members[c].size()));
    offset += length;
  }
  for (uint32_t c = 0; c < N; ++c) {
    for (uint32_t d : model.members[c]) {
      out.pod<uint64_t>(d);
      out.array(corpus.docs[d].dense.data(), corpus.dim);
    }
  }
  out.close();
}

DiskStore::DiskStore(const std::string& path, double per_op_overhead)
    : path_(path) {
  stats_.per_op_overhead = per_op_overhead;
  {
    BinReader in(path);
    in.expect_magic(kStoreMagic);
    uint32_t version = in.pod<uint32_t>();
    if (version != kFormatVersion)
      throw Error(ErrorKind::Parse, path + ": unsupported store version");
    uint32_t N = in.pod<uint32_t>();
    dim_ = in.pod<uint32_t>();
    doc_count_ = in.pod<uint64_t>();
    directory_.resize(N);
    uint64_t expected = 4 + 4 + 4 + 4 + 8 + static_cast<uint64_t>(N) * 20;
    for (auto& e : directory_) {
      e.offset = in.pod<uint64_t>();
      e.length = in.pod<uint64_t>();
      e.doc_count = in.pod<uint32_t>();
      if (e.offset != expected)
        throw Error(ErrorKind::Parse, path + ": non-contiguous cluster extent");
      expected += e.length;
    }
    data_begin_ = directory_.empty() ? expected : directory_[0].offset;
  }
  fd_ = ::open(path.c_str(), O_RDONLY);
  if (fd_ < 0) throw Error(ErrorKind::Io, "cannot open store: " + path);

  // doc_id -> record offset, built from a single directory-ordered scan
  doc_offset_.assign(doc_count_, 0);
  const uint64_t rec = record_size(dim_);
  for (const auto& e : directory_) {
    for (uint32_t i = 0; i < e.doc_count; ++i) {
      uint64_t off = e.offset + static_cast<uint64_t>(i) * rec;
      uint64_t id;
      if (::pread(fd_, &id, 8, static_cast<off_t>(off)) != 8)
        throw Error(ErrorKind::Io, path + ": truncated store");
      if (id >= doc_count_)
        throw Error(ErrorKind::Parse, path + ": doc_id out of range");
      doc_offset_[id] = off;
    }
  }
}

DiskStore::~DiskStore() {
  if (fd_ >= 0) ::close(fd_);
}

std::vector<DiskStore::FetchedDoc> DiskStore::read_span(uint64_t offset,
                                                        uint64_t length) {
  std::vector<char> buf(length);
  ssize_t got = ::pread(fd_, buf.data(), length, static_cast<off_t>(offset));
  if (got < 0 || static_cast<uint64_t>(got) != length)
    throw Error(ErrorKind::Io, path_ + ": short read");
  ++stats_.read_ops;
  stats_.bytes_read += length;

  const uint64_t rec = record_size(dim_);
  std::vector<FetchedDoc> docs(length / rec);
  for (size_t i = 0; i < docs.size(); ++i) {
    const char* p = buf.data() + i * rec;
    uint64_t id;
    std::memcpy(&id, p, 8);
    docs[i].doc_id = static_cast<uint32_t>(id);
    docs[i].dense.resize(dim_);
    std::memcpy(docs[i].dense.data(), p + 8, static_cast<size_t>(dim_) * 4);
  }
  return docs;
}

std::vector<std::vector<DiskStore::FetchedDoc>> DiskStore::fetch_clusters(
    const std::vector<uint32_t>& cluster_ids) {
  for (uint32_t c : cluster_ids)
    if (c >= directory_.size())
      throw Error(ErrorKind::State,
                  "fetch_clusters: invalid cluster id " + std::to_string(c));

  std::vector<std::vector<FetchedDoc>> out;
  out.reserve(cluster_ids.size());
  size_t i = 0;
  while (i < cluster_ids.size()) {
    // coalesce a run of requested clusters that are adjacent on disk
    size_t j = i;
    uint64_t end = directory_[cluster_ids[i]].offset;
    while (j < cluster_ids.size() &&
           directory_[cluster_ids[j]].offset == end) {
      end += directory_[cluster_ids[j]].length;
      ++j;
    }
    uint64_t begin = directory_[cluster_ids[i]].offset;
    auto docs = read_span(begin, end - begin);
    size_t consumed = 0;
    for (size_t c = i; c < j; ++c) {
      uint32_t count = directory_[cluster_ids[c]].doc_count;
      out.emplace_back(docs.begin() + consumed,
                       docs.begin() + consumed + count);
      consumed += count;
    }
    i = j;
  }
  return out;
}

std::vector<DiskStore::FetchedDoc> DiskStore::fetch_documents(
    const std::vector<uint32_t>& doc_ids, bool coalesce) {
  for (uint32_t d : doc_ids)
    if (d >= doc_count_)
      throw Error(ErrorKind::State,
                  "fetch_documents: invalid doc id " + std::to_string(d));
  const uint64_t rec = record_size(dim_);
  std::vector<FetchedDoc> out;
  out.reserve(doc_ids.size());
  size_t i = 0;
  while (i < doc_ids.size()) {
    size_t j = i + 1;
    if (coalesce) {
      while (j < doc_ids.size() &&
             doc_offset_[doc_ids[j]] == doc_offset_[doc_ids[j - 1]] + rec)
        ++j;
    }
    auto docs = read_span(doc_offset_[doc_ids[i]],
                          rec * static_cast<uint64_t>(j - i));
    out.insert(out.end(), docs.begin(), docs.end());
    i = j;
  }
  return out;
}

}  // namespace clusd
