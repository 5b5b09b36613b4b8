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

// Command-line front end. Talks to the engine exclusively through the
// public C API in clusd/clusd.h.

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clusd/clusd.h"

namespace {

struct EngineDeleter {
  void operator()(clusd_engine* e) const { clusd_engine_destroy(e); }
};
using EnginePtr = std::unique_ptr<clusd_engine, EngineDeleter>;

std::vector<const char*> as_cstrs(const std::vector<std::string>& v) {
  std::vector<const char*> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s.c_str());
  return out;
}

int finish(clusd_engine* engine, clusd_status status) {
  if (status == CLUSD_OK) return 0;
  std::fprintf(stderr, "error: status=%d message=%s\n",
               static_cast<int>(status), clusd_last_error(engine));
  return 1;
}

void add_override_flag(CLI::App* cmd, std::vector<std::string>& overrides) {
  cmd->add_option("-D,--define", overrides,
                  "extra key=value configuration override (repeatable)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clusd: selective dense cluster retrieval engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(clusd_version()));

  EnginePtr engine(clusd_engine_create());

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic benchmark");
  std::string synth_config, synth_out;
  std::optional<uint64_t> synth_seed;
  std::vector<std::string> synth_ov;
  synth->add_option("--config", synth_config, "synth key=value config file");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", synth_seed, "generator rng seed");
  add_override_flag(synth, synth_ov);

  // build
  auto* build = app.add_subcommand("build", "build index, clusters and store");
  std::string build_data, build_out;
  std::optional<uint64_t> build_clusters, build_seed, build_k;
  std::vector<std::string> build_ov;
  build->add_option("data_dir", build_data, "synth output dir or corpus file")
      ->required();
  build->add_option("--out", build_out, "output directory")->required();
  build->add_option("--clusters", build_clusters, "number of k-means clusters");
  build->add_option("--seed", build_seed, "clustering rng seed");
  build->add_option("--k", build_k, "default retrieval depth");
  add_override_flag(build, build_ov);

  // train
  auto* train = app.add_subcommand("train", "train the cluster-selection LSTM");
  std::string train_dir;
  std::optional<uint64_t> train_seed, train_n;
  std::vector<std::string> train_ov;
  train->add_option("built_dir", train_dir, "directory with built artifacts")
      ->required();
  train->add_option("--seed", train_seed, "training rng seed");
  train->add_option("--stage1-n", train_n, "Stage-I candidate count");
  add_override_flag(train, train_ov);

  // search
  auto* search = app.add_subcommand("search", "run one pipeline over queries");
  std::string search_dir, search_queries, search_pipeline, search_out;
  std::optional<double> search_theta, search_alpha;
  std::optional<uint64_t> search_k, search_n;
  bool search_disk = false, search_memory = false;
  std::vector<std::string> search_ov;
  search->add_option("built_dir", search_dir, "directory with built artifacts")
      ->required();
  search->add_option("--queries", search_queries, "query file")->required();
  search
      ->add_option("--pipeline", search_pipeline,
                   "sparse|dense_full|fuse_full|fuse_ivf|fuse_rerank|fuse_clusd")
      ->required();
  search->add_option("--out", search_out, "run-file output path")->required();
  search->add_option("--theta", search_theta, "LSTM selection threshold");
  search->add_option("--alpha", search_alpha, "sparse interpolation weight");
  search->add_option("--k", search_k, "retrieval depth");
  search->add_option("--stage1-n", search_n, "Stage-I candidate count");
  search->add_flag("--disk", search_disk, "score dense candidates from disk");
  search->add_flag("--memory", search_memory, "score dense candidates in memory");
  add_override_flag(search, search_ov);

  // bench
  auto* bench = app.add_subcommand("bench", "run all pipelines and report");
  std::string bench_dir, bench_out;
  std::optional<double> bench_theta, bench_alpha;
  std::optional<uint64_t> bench_k, bench_n;
  bool bench_disk = false, bench_memory = false;
  std::vector<std::string> bench_ov;
  bench->add_option("built_dir", bench_dir, "directory with built artifacts")
      ->required();
  bench->add_option("--out", bench_out, "report output directory")->required();
  bench->add_option("--theta", bench_theta, "LSTM selection threshold");
  bench->add_option("--alpha", bench_alpha, "sparse interpolation weight");
  bench->add_option("--k", bench_k, "retrieval depth");
  bench->add_option("--stage1-n", bench_n, "Stage-I candidate count");
  bench->add_flag("--disk", bench_disk, "disk-mode benchmark");
  bench->add_flag("--memory", bench_memory, "memory-mode benchmark");
  add_override_flag(bench, bench_ov);

  CLI11_PARSE(app, argc, argv);

  if (synth->parsed()) {
    if (synth_seed) synth_ov.push_back("rng_seed=" + std::to_string(*synth_seed));
    auto cstrs = as_cstrs(synth_ov);
    return finish(engine.get(),
                  clusd_synth(engine.get(),
                              synth_config.empty() ? nullptr : synth_config.c_str(),
                              synth_out.c_str(), cstrs.data(), cstrs.size()));
  }
  if (build->parsed()) {
    if (build_clusters)
      build_ov.push_back("build.clusters=" + std::to_string(*build_clusters));
    if (build_seed) build_ov.push_back("build.seed=" + std::to_string(*build_seed));
    if (build_k) build_ov.push_back("build.k_default=" + std::to_string(*build_k));
    auto cstrs = as_cstrs(build_ov);
    return finish(engine.get(),
                  clusd_build(engine.get(), build_data.c_str(), build_out.c_str(),
                              cstrs.data(), cstrs.size()));
  }
  if (train->parsed()) {
    if (train_seed) train_ov.push_back("train.seed=" + std::to_string(*train_seed));
    if (train_n) train_ov.push_back("selector.stage1_n=" + std::to_string(*train_n));
    auto cstrs = as_cstrs(train_ov);
    return finish(engine.get(), clusd_train(engine.get(), train_dir.c_str(),
                                            cstrs.data(), cstrs.size()));
  }
  if (search->parsed()) {
    if (search_theta) search_ov.push_back("selector.theta=" + std::to_string(*search_theta));
    if (search_alpha) search_ov.push_back("fusion.alpha=" + std::to_string(*search_alpha));
    if (search_k) search_ov.push_back("bench.k=" + std::to_string(*search_k));
    if (search_n) search_ov.push_back("selector.stage1_n=" + std::to_string(*search_n));
    if (search_disk) search_ov.push_back("bench.disk=1");
    if (search_memory) search_ov.push_back("bench.disk=0");
    auto cstrs = as_cstrs(search_ov);
    return finish(engine.get(),
                  clusd_search(engine.get(), search_dir.c_str(),
                               search_queries.c_str(), search_pipeline.c_str(),
                               search_out.c_str(), cstrs.data(), cstrs.size()));
  }
  if (bench->parsed()) {
    if (bench_theta) bench_ov.push_back("selector.theta=" + std::to_string(*bench_theta));
    if (bench_alpha) bench_ov.push_back("fusion.alpha=" + std::to_string(*bench_alpha));
    if (bench_k) bench_ov.push_back("bench.k=" + std::to_string(*bench_k));
    if (bench_n) bench_ov.push_back("selector.stage1_n=" + std::to_string(*bench_n));
    if (bench_disk) bench_ov.push_back("bench.disk=1");
    if (bench_memory) bench_ov.push_back("bench.disk=0");
    auto cstrs = as_cstrs(bench_ov);
    return finish(engine.get(),
                  clusd_bench(engine.get(), bench_dir.c_str(), bench_out.c_str(),
                              cstrs.data(), cstrs.size()));
  }
  return 1;
}
