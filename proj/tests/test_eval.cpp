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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "core/eval.hpp"

using namespace clusd;

namespace {

// Straight-line metric re-implementations used as oracles.
double naive_mrr(const std::vector<RankedList>& results,
                 const std::vector<uint32_t>& qids, const Qrels& qrels,
                 size_t k) {
  double sum = 0.0;
  for (size_t i = 0; i < results.size(); ++i) {
    for (size_t r = 0; r < results[i].size() && r < k; ++r) {
      if (qrels.grade(qids[i], results[i][r].doc_id) > 0) {
        sum += 1.0 / static_cast<double>(r + 1);
        break;
      }
    }
  }
  return results.empty() ? 0.0 : sum / static_cast<double>(results.size());
}

double naive_recall(const std::vector<RankedList>& results,
                    const std::vector<uint32_t>& qids, const Qrels& qrels,
                    size_t k) {
  double sum = 0.0;
  size_t counted = 0;
  for (size_t i = 0; i < results.size(); ++i) {
    auto it = qrels.judgments.find(qids[i]);
    if (it == qrels.judgments.end()) continue;
    size_t rel = 0;
    for (const auto& [_, g] : it->second)
      if (g > 0) ++rel;
    if (rel == 0) continue;
    ++counted;
    size_t hit = 0;
    for (size_t r = 0; r < results[i].size() && r < k; ++r)
      if (qrels.grade(qids[i], results[i][r].doc_id) > 0) ++hit;
    sum += static_cast<double>(hit) / static_cast<double>(rel);
  }
  return counted == 0 ? 0.0 : sum / static_cast<double>(counted);
}

double naive_ndcg(const std::vector<RankedList>& results,
                  const std::vector<uint32_t>& qids, const Qrels& qrels,
                  size_t k) {
  double sum = 0.0;
  for (size_t i = 0; i < results.size(); ++i) {
    double dcg = 0.0;
    for (size_t r = 0; r < results[i].size() && r < k; ++r) {
      int g = qrels.grade(qids[i], results[i][r].doc_id);
      dcg += (std::pow(2.0, g) - 1.0) / std::log2(static_cast<double>(r) + 2.0);
    }
    std::vector<int> grades;
    if (auto it = qrels.judgments.find(qids[i]); it != qrels.judgments.end())
      for (const auto& [_, g] : it->second)
        if (g > 0) grades.push_back(g);
    std::sort(grades.rbegin(), grades.rend());
    double idcg = 0.0;
    for (size_t r = 0; r < grades.size() && r < k; ++r)
      idcg += (std::pow(2.0, grades[r]) - 1.0) /
              std::log2(static_cast<double>(r) + 2.0);
    if (idcg > 0.0) sum += dcg / idcg;
  }
  return results.empty() ? 0.0 : sum / static_cast<double>(results.size());
}

}  // namespace

TEST_CASE("mrr hand fixture") {
  // three queries: relevant at rank 1, rank 4, absent -> (1 + 0.25 + 0) / 3
  Qrels qrels;
  qrels.judgments[0][5] = 1;
  qrels.judgments[1][9] = 1;
  qrels.judgments[2][7] = 1;
  std::vector<uint32_t> qids = {0, 1, 2};
  std::vector<RankedList> results = {
      {{5, 1.0}, {6, 0.9}},
      {{1, 1.0}, {2, 0.9}, {3, 0.8}, {9, 0.7}},
      {{1, 1.0}, {2, 0.9}},
  };
  CHECK(mrr_at_k(results, qids, qrels, 10) ==
        doctest::Approx((1.0 + 0.25 + 0.0) / 3.0));
  // cutoff above the hit suppresses it
  CHECK(mrr_at_k(results, qids, qrels, 3) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ndcg hand fixture with graded judgments") {
  // one query, grades 2 and 1; ranking puts grade 1 first.
  // DCG  = (2^1-1)/log2(2) + (2^2-1)/log2(3) = 1 + 3/log2(3)
  // IDCG = (2^2-1)/log2(2) + (2^1-1)/log2(3) = 3 + 1/log2(3)
  Qrels qrels;
  qrels.judgments[0][1] = 2;
  qrels.judgments[0][2] = 1;
  std::vector<RankedList> results = {{{2, 1.0}, {1, 0.9}, {3, 0.8}}};
  std::vector<uint32_t> qids = {0};
  double dcg = 1.0 + 3.0 / std::log2(3.0);
  double idcg = 3.0 + 1.0 / std::log2(3.0);
  CHECK(ndcg_at_k(results, qids, qrels, 10) == doctest::Approx(dcg / idcg));
  // perfect ordering scores 1
  std::vector<RankedList> perfect = {{{1, 1.0}, {2, 0.9}}};
  CHECK(ndcg_at_k(perfect, qids, qrels, 10) == doctest::Approx(1.0));
}

TEST_CASE("recall hand fixture") {
  Qrels qrels;
  qrels.judgments[0][1] = 1;
  qrels.judgments[0][2] = 1;
  qrels.judgments[1][3] = 1;
  std::vector<uint32_t> qids = {0, 1};
  std::vector<RankedList> results = {
      {{1, 1.0}, {9, 0.9}},   // 1 of 2
      {{3, 1.0}},             // 1 of 1
  };
  CHECK(recall_at_k(results, qids, qrels, 10) == doctest::Approx(0.75));
}

TEST_CASE("metrics match naive oracles on random fixtures") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> grade(0, 3);
  std::uniform_int_distribution<uint32_t> doc(0, 49);
  for (int trial = 0; trial < 50; ++trial) {
    Qrels qrels;
    std::vector<uint32_t> qids;
    std::vector<RankedList> results;
    for (uint32_t q = 0; q < 8; ++q) {
      qids.push_back(q);
      for (int j = 0; j < 4; ++j) {
        int g = grade(rng);
        if (g > 0) qrels.judgments[q][doc(rng)] = g;
      }
      RankedList list;
      std::vector<uint32_t> ids(50);
      std::iota(ids.begin(), ids.end(), 0u);
      std::shuffle(ids.begin(), ids.end(), rng);
      for (int r = 0; r < 20; ++r)
        list.push_back({ids[r], 20.0 - r});
      results.push_back(std::move(list));
    }
    CHECK(mrr_at_k(results, qids, qrels, 10) ==
          doctest::Approx(naive_mrr(results, qids, qrels, 10)));
    CHECK(recall_at_k(results, qids, qrels, 15) ==
          doctest::Approx(naive_recall(results, qids, qrels, 15)));
    CHECK(ndcg_at_k(results, qids, qrels, 10) ==
          doctest::Approx(naive_ndcg(results, qids, qrels, 10)));
  }
}

TEST_CASE("latency stats use the nearest-rank p99") {
  std::vector<double> samples;
  for (int i = 1; i <= 100; ++i) samples.push_back(static_cast<double>(i));
  std::mt19937_64 rng(2);
  std::shuffle(samples.begin(), samples.end(), rng);
  auto [mean, p99] = latency_stats(samples);
  CHECK(mean == doctest::Approx(50.5));
  CHECK(p99 == doctest::Approx(99.0));  // ceil(0.99 * 100) = 99th order stat

  auto [m1, p1] = latency_stats({4.0});
  CHECK(m1 == doctest::Approx(4.0));
  CHECK(p1 == doctest::Approx(4.0));
}

TEST_CASE("pipeline names round-trip and bad names throw") {
  for (PipelineKind kind : all_pipelines())
    CHECK(pipeline_from_name(pipeline_name(kind)) == kind);
  CHECK(pipeline_name(PipelineKind::FuseClusd) == "fuse_clusd");
  CHECK_THROWS_AS(pipeline_from_name("bogus"), Error);
  CHECK_THROWS_AS(pipeline_from_name(""), Error);
}

TEST_CASE("run file format") {
  RunResult run;
  run.label = "sparse";
  run.query_ids = {3, 4};
  run.results = {{{10, 1.5}, {11, 0.5}}, {{12, 2.0}}};
  auto path = std::filesystem::temp_directory_path() / "clusd_run_file.txt";
  write_run_file(run, path.string(), "tagx");
  std::ifstream in(path);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  // six columns: query_id Q0 doc_id rank score tag
  std::istringstream first(lines[0]);
  std::string qid, q0, did, rank, score, tag;
  first >> qid >> q0 >> did >> rank >> score >> tag;
  CHECK(qid == "3");
  CHECK(q0 == "Q0");
  CHECK(did == "10");
  CHECK(rank == "1");
  CHECK(std::stod(score) == doctest::Approx(1.5));
  CHECK(tag == "tagx");
  std::istringstream third(lines[2]);
  third >> qid >> q0 >> did >> rank;
  CHECK(qid == "4");
  CHECK(did == "12");
  CHECK(rank == "1");
}

TEST_CASE("metrics_to_text mentions every reported number") {
  MetricsReport rep;
  rep.label = "fuse_clusd";
  rep.mrr_at_10 = 0.5;
  rep.recall_at_k = 0.25;
  rep.recall_k = 100;
  std::string text = metrics_to_text(rep);
  CHECK(text.find("fuse_clusd") != std::string::npos);
  CHECK(text.find("mrr") != std::string::npos);
  CHECK(text.find("recall") != std::string::npos);
}
