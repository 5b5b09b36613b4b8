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

#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "binio.hpp"

namespace clusd {

namespace {

constexpr char kCorpusMagic[4] = {'C', 'L', 'S', 'D'};
constexpr uint32_t kFormatVersion = 1;

void check_dense(const DenseVector& v, uint32_t dim, const std::string& ctx) {
  if (v.size() != dim)
    throw Error(ErrorKind::Parse, ctx + ": dense length " +
                                      std::to_string(v.size()) +
                                      " != dim " + std::to_string(dim));
  for (float x : v)
    if (!std::isfinite(x))
      throw Error(ErrorKind::Parse, ctx + ": non-finite dense value");
}

template <typename Record>
Record read_record(BinReader& in, uint32_t dim, size_t index) {
  std::string ctx = in.path() + ": record " + std::to_string(index);
  Record rec;
  uint64_t id = in.pod<uint64_t>();
  if (id > UINT32_MAX)
    throw Error(ErrorKind::Parse, ctx + ": id out of range");
  uint32_t count = in.pod<uint32_t>();
  rec.sparse.entries.resize(count);
  for (uint32_t i = 0; i < count; ++i) {
    rec.sparse.entries[i].term_id = in.pod<uint32_t>();
    rec.sparse.entries[i].weight = in.pod<float>();
  }
  validate_sparse(rec.sparse, ctx);
  rec.dense.resize(dim);
  in.array(rec.dense.data(), dim);
  check_dense(rec.dense, dim, ctx);
  if constexpr (std::is_same_v<Record, Document>)
    rec.doc_id = static_cast<uint32_t>(id);
  else
    rec.query_id = static_cast<uint32_t>(id);
  return rec;
}

template <typename Record>
void write_record(BinWriter& out, uint64_t id, const Record& rec) {
  out.pod<uint64_t>(id);
  out.pod<uint32_t>(static_cast<uint32_t>(rec.sparse.entries.size()));
  for (const auto& e : rec.sparse.entries) {
    out.pod<uint32_t>(e.term_id);
    out.pod<float>(e.weight);
  }
  out.array(rec.dense.data(), rec.dense.size());
}

std::pair<uint64_t, uint32_t> read_header(BinReader& in) {
  in.expect_magic(kCorpusMagic);
  uint32_t version = in.pod<uint32_t>();
  if (version != kFormatVersion)
    throw Error(ErrorKind::Parse,
                in.path() + ": unsupported format version " +
                    std::to_string(version));
  uint64_t count = in.pod<uint64_t>();
  uint32_t dim = in.pod<uint32_t>();
  return {count, dim};
}

DenseVector normalized(const DenseVector& v) {
  double n2 = 0.0;
  for (float x : v) n2 += static_cast<double>(x) * x;
  double n = std::sqrt(n2);
  DenseVector out(v.size());
  if (n == 0.0) {
    if (!v.empty()) out[0] = 1.0f;  // degenerate all-zero draw
    return out;
  }
  for (size_t i = 0; i < v.size(); ++i)
    out[i] = static_cast<float>(v[i] / n);
  return out;
}

}  // namespace

SynthConfig SynthConfig::from_config(const KeyValueConfig& cfg) {
  SynthConfig c;
  c.num_docs = cfg.get_uint("num_docs", c.num_docs);
  c.num_queries = cfg.get_uint("num_queries", c.num_queries);
  c.dim = static_cast<uint32_t>(cfg.get_uint("dim", c.dim));
  c.vocab_size = static_cast<uint32_t>(cfg.get_uint("vocab_size", c.vocab_size));
  c.num_topics = static_cast<uint32_t>(cfg.get_uint("num_topics", c.num_topics));
  c.dense_noise_sigma = cfg.get_real("dense_noise_sigma", c.dense_noise_sigma);
  c.sparse_terms_per_doc = static_cast<uint32_t>(
      cfg.get_uint("sparse_terms_per_doc", c.sparse_terms_per_doc));
  c.relevant_per_query = static_cast<uint32_t>(
      cfg.get_uint("relevant_per_query", c.relevant_per_query));
  c.rng_seed = cfg.get_uint("rng_seed", c.rng_seed);
  c.validate();
  return c;
}

void SynthConfig::validate() const {
  if (num_docs < 1 || num_queries < 1 || dim < 1 || vocab_size < 1 ||
      num_topics < 1 || sparse_terms_per_doc < 1 || relevant_per_query < 1)
    throw Error(ErrorKind::Config, "synth config: all counts must be >= 1");
  if (dense_noise_sigma < 0.0)
    throw Error(ErrorKind::Config, "synth config: dense_noise_sigma must be >= 0");
  if (sparse_terms_per_doc > vocab_size)
    throw Error(ErrorKind::Config,
                "synth config: sparse_terms_per_doc exceeds vocab_size");
}

float quantize_weight(double w) {
  return static_cast<float>(std::round(w * 1000.0) / 1000.0);
}

Corpus load_corpus(const std::string& path, bool remap_ids) {
  BinReader in(path);
  auto [count, dim] = read_header(in);
  Corpus corpus;
  corpus.dim = dim;
  corpus.docs.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    Document doc = read_record<Document>(in, dim, i);
    if (remap_ids) {
      doc.doc_id = static_cast<uint32_t>(i);
    } else if (doc.doc_id != i) {
      throw Error(ErrorKind::Parse,
                  path + ": record " + std::to_string(i) +
                      ": doc_id " + std::to_string(doc.doc_id) +
                      " breaks the contiguous 0-based range (use id remapping "
                      "for external data)");
    }
    corpus.docs.push_back(std::move(doc));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  BinWriter out(path);
  out.magic(kCorpusMagic);
  out.pod<uint32_t>(kFormatVersion);
  out.pod<uint64_t>(corpus.docs.size());
  out.pod<uint32_t>(corpus.dim);
  for (const auto& doc : corpus.docs) write_record(out, doc.doc_id, doc);
  out.close();
}

QuerySet load_queries(const std::string& path) {
  BinReader in(path);
  auto [count, dim] = read_header(in);
  QuerySet qs;
  qs.dim = dim;
  qs.queries.reserve(count);
  for (uint64_t i = 0; i < count; ++i)
    qs.queries.push_back(read_record<QueryRecord>(in, dim, i));
  return qs;
}

void save_queries(const QuerySet& queries, const std::string& path) {
  BinWriter out(path);
  out.magic(kCorpusMagic);
  out.pod<uint32_t>(kFormatVersion);
  out.pod<uint64_t>(queries.queries.size());
  out.pod<uint32_t>(queries.dim);
  for (const auto& q : queries.queries) write_record(out, q.query_id, q);
  out.close();
}

Qrels load_qrels(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open qrels: " + path);
  Qrels qrels;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = path + ":" + std::to_string(lineno);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    int64_t query_id, iter, doc_id, grade;
    if (!(ss >> query_id >> iter >> doc_id >> grade))
      throw Error(ErrorKind::Parse, where + ": expected 4 fields");
    if (query_id < 0 || doc_id < 0)
      throw Error(ErrorKind::Parse, where + ": negative id");
    if (grade < 0)
      throw Error(ErrorKind::Parse, where + ": negative grade");
    auto& per_query = qrels.judgments[static_cast<uint32_t>(query_id)];
    auto [it, inserted] =
        per_query.emplace(static_cast<uint32_t>(doc_id),
                          static_cast<uint32_t>(grade));
    if (!inserted) {
      std::cerr << "warning: " << where << ": duplicate judgment for query "
                << query_id << " doc " << doc_id << ", last grade wins\n";
      it->second = static_cast<uint32_t>(grade);
    }
  }
  return qrels;
}

void save_qrels(const Qrels& qrels, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open for write: " + path);
  for (const auto& [qid, docs] : qrels.judgments)
    for (const auto& [did, grade] : docs)
      out << qid << " 0 " << did << " " << grade << "\n";
  if (!out) throw Error(ErrorKind::Io, "write failed: " + path);
}

std::tuple<Corpus, QuerySet, Qrels> generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  auto gaussian_vec = [&](double sigma) {
    DenseVector v(cfg.dim);
    for (auto& x : v) x = static_cast<float>(sigma * gauss(rng));
    return v;
  };

  // Topic centers and per-topic term pools with base weights. Each topic
  // also carries a few stretched noise directions so its document cloud is
  // anisotropic; k-means cells then cut the cloud and centroid distance is
  // only a rough proxy for cell membership, as with real embeddings.
  std::vector<DenseVector> centers(cfg.num_topics);
  for (auto& c : centers) c = normalized(gaussian_vec(1.0));
  const uint32_t kStretchDirs = 6;
  const double kStretchScale = 1.5;
  std::vector<std::vector<DenseVector>> stretch(cfg.num_topics);
  for (auto& dirs : stretch) {
    dirs.resize(kStretchDirs);
    for (auto& u : dirs) u = normalized(gaussian_vec(1.0));
  }
  auto topic_noise = [&](uint32_t topic) {
    DenseVector v = gaussian_vec(cfg.dense_noise_sigma);
    for (const auto& u : stretch[topic]) {
      double h = kStretchScale * cfg.dense_noise_sigma * gauss(rng);
      for (uint32_t i = 0; i < cfg.dim; ++i)
        v[i] += static_cast<float>(h * u[i]);
    }
    return v;
  };

  uint32_t pool_size =
      std::min(cfg.vocab_size, cfg.sparse_terms_per_doc * 4);
  struct TopicTerms {
    std::vector<uint32_t> terms;            // ascending
    std::vector<DenseVector> direction;     // unit vector per term
  };
  std::vector<TopicTerms> topics(cfg.num_topics);
  {
    std::vector<uint32_t> vocab(cfg.vocab_size);
    std::iota(vocab.begin(), vocab.end(), 0u);
    for (auto& topic : topics) {
      // Partial Fisher-Yates draw of pool_size distinct terms.
      std::vector<uint32_t> deck = vocab;
      for (uint32_t i = 0; i < pool_size; ++i) {
        std::uniform_int_distribution<uint32_t> pick(i, cfg.vocab_size - 1);
        std::swap(deck[i], deck[pick(rng)]);
      }
      deck.resize(pool_size);
      std::sort(deck.begin(), deck.end());
      topic.terms = std::move(deck);
      topic.direction.resize(pool_size);
      for (auto& u : topic.direction) u = normalized(gaussian_vec(1.0));
    }
  }

  // Sparse vector for a record with the given latent direction. Each pool
  // term carries a fixed random direction; a record keeps the pool terms
  // best aligned with its latent vector and weights them by that alignment,
  // so two records share heavy terms exactly when their latents are close.
  // Selection jitter and weight jitter add channel noise that is
  // independent of the dense observation noise.
  auto make_sparse = [&](uint32_t topic_id, const DenseVector& latent) {
    const TopicTerms& t = topics[topic_id];
    std::vector<std::pair<double, uint32_t>> scored(t.terms.size());
    for (uint32_t i = 0; i < t.terms.size(); ++i) {
      double align = dot(latent, t.direction[i]);
      scored[i] = {align + 0.005 * gauss(rng), i};
    }
    size_t keep = std::min<size_t>(cfg.sparse_terms_per_doc, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                      std::greater<>());
    std::vector<uint32_t> idx;
    idx.reserve(keep);
    for (size_t i = 0; i < keep; ++i) idx.push_back(scored[i].second);
    std::sort(idx.begin(), idx.end());
    SparseVector sv;
    for (uint32_t i : idx) {
      double align = dot(latent, t.direction[i]);
      double w = std::exp(3.0 * align) * (0.98 + 0.04 * unif(rng));
      float q = quantize_weight(w);
      if (q < 0.001f) q = 0.001f;
      sv.entries.push_back({t.terms[i], q});
    }
    return sv;
  };

  std::uniform_int_distribution<uint32_t> pick_topic(0, cfg.num_topics - 1);

  Corpus corpus;
  corpus.dim = cfg.dim;
  corpus.docs.resize(cfg.num_docs);
  std::vector<uint32_t> doc_topic(cfg.num_docs);
  std::vector<std::vector<uint32_t>> topic_docs(cfg.num_topics);
  for (uint64_t d = 0; d < cfg.num_docs; ++d) {
    uint32_t topic = pick_topic(rng);
    doc_topic[d] = topic;
    topic_docs[topic].push_back(static_cast<uint32_t>(d));
    DenseVector noise = topic_noise(topic);
    DenseVector latent = centers[topic];
    for (uint32_t i = 0; i < cfg.dim; ++i) latent[i] += noise[i];
    Document& doc = corpus.docs[d];
    doc.doc_id = static_cast<uint32_t>(d);
    doc.dense = normalized(latent);
    doc.sparse = make_sparse(topic, doc.dense);
  }

  QuerySet queries;
  queries.dim = cfg.dim;
  queries.queries.resize(cfg.num_queries);
  Qrels qrels;
  for (uint64_t q = 0; q < cfg.num_queries; ++q) {
    uint32_t topic = pick_topic(rng);
    if (topic_docs[topic].size() < cfg.relevant_per_query)
      throw Error(ErrorKind::Config,
                  "synth: relevant_per_query " +
                      std::to_string(cfg.relevant_per_query) +
                      " exceeds document count of topic " +
                      std::to_string(topic));
    // The latent vector defines relevance. Each emitted representation
    // observes the latent through its own independent noise draw, so the
    // lexical and dense channels are partially informative and fusing them
    // has headroom over either alone.
    const double fqd = 0.35;
    const double fqs = 0.05;
    DenseVector g1 = topic_noise(topic);
    DenseVector latent = centers[topic];
    for (uint32_t i = 0; i < cfg.dim; ++i) latent[i] += g1[i];
    latent = normalized(latent);
    DenseVector g2 = gaussian_vec(fqd * cfg.dense_noise_sigma);
    DenseVector observed = latent;
    for (uint32_t i = 0; i < cfg.dim; ++i) observed[i] += g2[i];
    DenseVector g3 = gaussian_vec(fqs * cfg.dense_noise_sigma);
    DenseVector lexical = latent;
    for (uint32_t i = 0; i < cfg.dim; ++i) lexical[i] += g3[i];

    QueryRecord& rec = queries.queries[q];
    rec.query_id = static_cast<uint32_t>(q);
    rec.dense = normalized(observed);
    rec.sparse = make_sparse(topic, normalized(lexical));

    // Relevant docs: nearest same-topic documents to the latent vector.
    std::vector<ScoredDoc> cands;
    cands.reserve(topic_docs[topic].size());
    for (uint32_t d : topic_docs[topic])
      cands.push_back({d, dot(latent, corpus.docs[d].dense)});
    RankedList top = make_ranked_list(std::move(cands), cfg.relevant_per_query);
    for (const auto& sd : top)
      qrels.judgments[rec.query_id][sd.doc_id] = 1;
  }

  return {std::move(corpus), std::move(queries), std::move(qrels)};
}

}  // namespace clusd
