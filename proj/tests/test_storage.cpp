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

#include <doctest.h>

#include <filesystem>

#include "core/cluster.hpp"
#include "core/storage.hpp"
#include "core/types.hpp"

using namespace clusd;

namespace {

// Six documents in three clusters laid out 0,1 | 2,3 | 4,5 on disk.
struct Fixture {
  Corpus corpus;
  ClusterModel model;
  std::string path;

  Fixture() {
    corpus.dim = 4;
    corpus.docs.resize(6);
    for (uint32_t d = 0; d < 6; ++d) {
      corpus.docs[d].doc_id = d;
      corpus.docs[d].dense = {static_cast<float>(d), 0.0f, 1.0f,
                              static_cast<float>(d) * 0.5f};
    }
    model.dim = 4;
    model.centroids = {{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}};
    model.assignment = {0, 0, 1, 1, 2, 2};
    model.members = {{0, 1}, {2, 3}, {4, 5}};
    path = (std::filesystem::temp_directory_path() / "clusd_store.bin").string();
    write_store(corpus, model, path);
  }
};

}  // namespace

TEST_CASE("store metadata and full round-trip") {
  Fixture f;
  DiskStore store(f.path);
  CHECK(store.num_clusters() == 3);
  CHECK(store.dim() == 4);
  CHECK(store.doc_count() == 6);

  auto clusters = store.fetch_clusters({0, 1, 2});
  REQUIRE(clusters.size() == 3);
  for (uint32_t c = 0; c < 3; ++c) {
    REQUIRE(clusters[c].size() == f.model.members[c].size());
    for (size_t i = 0; i < clusters[c].size(); ++i) {
      uint32_t doc = f.model.members[c][i];
      CHECK(clusters[c][i].doc_id == doc);
      CHECK(clusters[c][i].dense == f.corpus.docs[doc].dense);
    }
  }
}

TEST_CASE("adjacent cluster requests coalesce into one read") {
  Fixture f;
  DiskStore store(f.path);

  store.reset_stats();
  store.fetch_clusters({0, 1, 2});
  CHECK(store.stats().read_ops == 1);  // whole file span

  store.reset_stats();
  store.fetch_clusters({0, 2});
  CHECK(store.stats().read_ops == 2);  // gap at cluster 1

  store.reset_stats();
  store.fetch_clusters({2, 1});
  CHECK(store.stats().read_ops == 2);  // descending offsets never coalesce

  store.reset_stats();
  auto res = store.fetch_clusters({});
  CHECK(res.empty());
  CHECK(store.stats().read_ops == 0);
}

TEST_CASE("per-document fetch with and without coalescing") {
  Fixture f;
  DiskStore store(f.path);
  const uint64_t rec = 8 + 4ull * 4;  // id u64 + dense f32 * dim

  store.reset_stats();
  auto docs = store.fetch_documents({1, 2, 3, 5}, true);
  REQUIRE(docs.size() == 4);
  CHECK(docs[0].doc_id == 1);
  CHECK(docs[3].doc_id == 5);
  // 1,2,3 are one disk run; 5 stands alone
  CHECK(store.stats().read_ops == 2);
  CHECK(store.stats().bytes_read == 4 * rec);

  store.reset_stats();
  store.fetch_documents({1, 2, 3, 5}, false);
  CHECK(store.stats().read_ops == 4);

  store.reset_stats();
  CHECK(store.fetch_documents({}, true).empty());
  CHECK(store.stats().read_ops == 0);
}

TEST_CASE("simulated overhead is read_ops times the per-op cost") {
  Fixture f;
  DiskStore store(f.path, 0.002);
  store.fetch_documents({0, 3, 5}, false);
  CHECK(store.stats().read_ops == 3);
  CHECK(store.stats().simulated_overhead() == doctest::Approx(3 * 0.002));
  store.reset_stats();
  CHECK(store.stats().simulated_overhead() == 0.0);
}

TEST_CASE("invalid requests throw") {
  Fixture f;
  DiskStore store(f.path);
  CHECK_THROWS_AS(store.fetch_clusters({3}), Error);
  CHECK_THROWS_AS(store.fetch_documents({6}), Error);
}

TEST_CASE("write_store rejects mismatched model") {
  Fixture f;
  ClusterModel bad = f.model;
  bad.assignment.pop_back();
  CHECK_THROWS_AS(write_store(f.corpus, bad, f.path + ".bad"), Error);
}

TEST_CASE("store with scrambled member order still resolves doc ids") {
  // members need not be a contiguous id range; fetch_documents must follow
  // the directory, not assume doc_id == position
  Fixture f;
  f.model.assignment = {2, 1, 0, 2, 1, 0};
  f.model.members = {{2, 5}, {1, 4}, {0, 3}};
  std::string path =
      (std::filesystem::temp_directory_path() / "clusd_store2.bin").string();
  write_store(f.corpus, f.model, path);
  DiskStore store(path);
  auto docs = store.fetch_documents({0, 5}, true);
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].doc_id == 0);
  CHECK(docs[0].dense == f.corpus.docs[0].dense);
  CHECK(docs[1].doc_id == 5);
  CHECK(docs[1].dense == f.corpus.docs[5].dense);
}
