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

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "clusd/clusd.h"

namespace fs = std::filesystem;

namespace {

struct Engine {
  clusd_engine* handle;
  Engine() : handle(clusd_engine_create()) {}
  ~Engine() { clusd_engine_destroy(handle); }
};

fs::path work_dir() {
  fs::path dir = fs::temp_directory_path() / "clusd_capi";
  fs::create_directories(dir);
  return dir;
}

// Tiny corpus overrides shared by the end-to-end cases.
const std::vector<const char*> kSynthOverrides = {
    "num_docs=400",  "num_queries=30",         "dim=16",
    "vocab_size=400", "num_topics=4",          "sparse_terms_per_doc=32",
    "rng_seed=5",
};

}  // namespace

TEST_CASE("version string is present") {
  const char* v = clusd_version();
  REQUIRE(v != nullptr);
  CHECK(std::strlen(v) > 0);
}

TEST_CASE("engine lifecycle and null handling") {
  Engine e;
  REQUIRE(e.handle != nullptr);
  CHECK(std::string(clusd_last_error(e.handle)) == "");
  clusd_engine_destroy(nullptr);  // must be a safe no-op
  CHECK(clusd_synth(nullptr, nullptr, "x", nullptr, 0) == CLUSD_ERR_STATE);
  CHECK(std::string(clusd_last_error(nullptr)) == "null engine");
}

TEST_CASE("null required arguments are config errors with messages") {
  Engine e;
  CHECK(clusd_synth(e.handle, nullptr, nullptr, nullptr, 0) ==
        CLUSD_ERR_CONFIG);
  CHECK(std::string(clusd_last_error(e.handle)).find("out_dir") !=
        std::string::npos);
  CHECK(clusd_build(e.handle, nullptr, "out", nullptr, 0) == CLUSD_ERR_CONFIG);
  CHECK(clusd_train(e.handle, nullptr, nullptr, 0) == CLUSD_ERR_CONFIG);
  CHECK(clusd_search(e.handle, "d", "q", nullptr, "o", nullptr, 0) ==
        CLUSD_ERR_CONFIG);
  CHECK(clusd_bench(e.handle, "d", nullptr, nullptr, 0) == CLUSD_ERR_CONFIG);

  const char* bad[] = {nullptr};
  CHECK(clusd_synth(e.handle, nullptr, "out", bad, 1) == CLUSD_ERR_CONFIG);
}

TEST_CASE("error statuses map to failure kinds") {
  Engine e;
  // nonexistent built directory -> missing artifact
  fs::path nowhere = work_dir() / "missing";
  clusd_status st = clusd_build(e.handle, nowhere.string().c_str(),
                                (work_dir() / "b").string().c_str(), nullptr, 0);
  CHECK(st == CLUSD_ERR_STATE);
  CHECK(std::strlen(clusd_last_error(e.handle)) > 0);

  // malformed override -> config error
  const char* bad_cfg[] = {"num_docs=not_a_number"};
  st = clusd_synth(e.handle, nullptr, (work_dir() / "s").string().c_str(),
                   bad_cfg, 1);
  CHECK(st == CLUSD_ERR_CONFIG);

  // invalid config value caught by validation
  const char* bad_val[] = {"num_docs=0"};
  st = clusd_synth(e.handle, nullptr, (work_dir() / "s").string().c_str(),
                   bad_val, 1);
  CHECK(st == CLUSD_ERR_CONFIG);
}

TEST_CASE("full chain through the C API") {
  Engine e;
  fs::path dir = work_dir() / "chain";
  fs::remove_all(dir);
  std::string data = (dir / "data").string();
  std::string built = (dir / "built").string();
  std::string bench = (dir / "bench").string();

  REQUIRE(clusd_synth(e.handle, nullptr, data.c_str(), kSynthOverrides.data(),
                      kSynthOverrides.size()) == CLUSD_OK);
  CHECK(fs::exists(fs::path(data) / "corpus.bin"));
  CHECK(fs::exists(fs::path(data) / "queries.bin"));
  CHECK(fs::exists(fs::path(data) / "qrels.txt"));
  CHECK(fs::exists(fs::path(data) / "synth_manifest.txt"));

  const char* build_overrides[] = {"build.clusters=8", "build.kmeans_iters=10",
                                   "build.neighbors_m=7"};
  REQUIRE(clusd_build(e.handle, data.c_str(), built.c_str(), build_overrides,
                      3) == CLUSD_OK);
  CHECK(fs::exists(fs::path(built) / "index.clsi"));
  CHECK(fs::exists(fs::path(built) / "clusters.clsc"));
  CHECK(fs::exists(fs::path(built) / "store.clss"));

  // the build dir lacks queries/qrels until they are copied alongside
  for (const char* name : {"corpus.bin", "queries.bin", "qrels.txt"})
    fs::copy_file(fs::path(data) / name, fs::path(built) / name,
                  fs::copy_options::overwrite_existing);

  const char* train_overrides[] = {"train.epochs=10", "train.queries=20",
                                   "train.hidden_dim=8",
                                   "selector.stage1_n=6"};
  REQUIRE(clusd_train(e.handle, built.c_str(), train_overrides, 4) ==
          CLUSD_OK);
  CHECK(fs::exists(fs::path(built) / "lstm.clsl"));
  CHECK(fs::exists(fs::path(built) / "train_trace.txt"));

  // search must reject an unknown pipeline by name
  std::string run_path = (dir / "run.txt").string();
  std::string qfile = (fs::path(data) / "queries.bin").string();
  CHECK(clusd_search(e.handle, built.c_str(), qfile.c_str(), "warp_drive",
                     run_path.c_str(), nullptr, 0) == CLUSD_ERR_CONFIG);

  const char* search_overrides[] = {"selector.stage1_n=6", "bench.k=50"};
  REQUIRE(clusd_search(e.handle, built.c_str(), qfile.c_str(), "fuse_clusd",
                       run_path.c_str(), search_overrides, 2) == CLUSD_OK);
  // the error slate is clean after a success
  CHECK(std::string(clusd_last_error(e.handle)) == "");
  std::ifstream run(run_path);
  std::string first;
  REQUIRE(std::getline(run, first));
  CHECK(first.find(" Q0 ") != std::string::npos);
  CHECK(first.find("clusd-fuse_clusd") != std::string::npos);

  const char* bench_overrides[] = {"bench.eval_queries=10", "bench.k=50",
                                   "bench.recall_k=50", "selector.stage1_n=6",
                                   "bench.reps=1"};
  REQUIRE(clusd_bench(e.handle, built.c_str(), bench.c_str(), bench_overrides,
                      5) == CLUSD_OK);
  for (const char* name :
       {"table.txt", "table.csv", "bench_manifest.txt", "timing.txt",
        "metrics_fuse_clusd.txt", "run_fuse_clusd.txt", "bench_summary.txt"})
    CHECK(fs::exists(fs::path(bench) / name));
}

TEST_CASE("train before build is a clean failure") {
  Engine e;
  fs::path dir = work_dir() / "nobuild";
  fs::create_directories(dir);
  clusd_status st = clusd_train(e.handle, dir.string().c_str(), nullptr, 0);
  CHECK(st != CLUSD_OK);
  CHECK(std::strlen(clusd_last_error(e.handle)) > 0);
}
