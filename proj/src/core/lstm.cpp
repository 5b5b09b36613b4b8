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

#include "lstm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "binio.hpp"

namespace clusd {

namespace {

constexpr char kLstmMagic[4] = {'C', 'L', 'S', 'L'};
constexpr uint32_t kFormatVersion = 1;

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Clamped log for BCE; forward scores are strictly inside (0,1) for finite
// params, but extreme logits can round to exactly 0 or 1 in f64.
inline double safe_log(double x) { return std::log(std::max(x, 1e-300)); }

struct StepCache {
  std::vector<double> gate_i, gate_f, gate_o, gate_g;  // post-activation
  std::vector<double> cell, tanh_cell, hidden;
  double score;
};

void check_width(const LstmParams& p,
                 const std::vector<std::vector<double>>& seq) {
  for (const auto& x : seq)
    if (x.size() != p.input_dim)
      throw Error(ErrorKind::State,
                  "lstm: feature width " + std::to_string(x.size()) +
                      " != input_dim " + std::to_string(p.input_dim));
}

std::vector<StepCache> forward_cached(
    const LstmParams& p, const std::vector<std::vector<double>>& seq) {
  check_width(p, seq);
  const uint32_t H = p.hidden_dim;
  const uint32_t I = p.input_dim;
  std::vector<StepCache> steps;
  steps.reserve(seq.size());
  std::vector<double> h(H, 0.0), c(H, 0.0);
  std::vector<double> pre(4 * H);
  for (const auto& x : seq) {
    for (int g = 0; g < 4; ++g) {
      const double* W = p.W(g);
      const double* U = p.U(g);
      const double* b = p.b(g);
      for (uint32_t r = 0; r < H; ++r) {
        double acc = b[r];
        const double* wrow = W + static_cast<size_t>(r) * I;
        for (uint32_t j = 0; j < I; ++j) acc += wrow[j] * x[j];
        const double* urow = U + static_cast<size_t>(r) * H;
        for (uint32_t j = 0; j < H; ++j) acc += urow[j] * h[j];
        pre[g * H + r] = acc;
      }
    }
    StepCache sc;
    sc.gate_i.resize(H);
    sc.gate_f.resize(H);
    sc.gate_o.resize(H);
    sc.gate_g.resize(H);
    sc.cell.resize(H);
    sc.tanh_cell.resize(H);
    sc.hidden.resize(H);
    for (uint32_t r = 0; r < H; ++r) {
      sc.gate_i[r] = sigmoid(pre[0 * H + r]);
      sc.gate_f[r] = sigmoid(pre[1 * H + r]);
      sc.gate_o[r] = sigmoid(pre[2 * H + r]);
      sc.gate_g[r] = std::tanh(pre[3 * H + r]);
      sc.cell[r] = sc.gate_f[r] * c[r] + sc.gate_i[r] * sc.gate_g[r];
      sc.tanh_cell[r] = std::tanh(sc.cell[r]);
      sc.hidden[r] = sc.gate_o[r] * sc.tanh_cell[r];
    }
    double z = p.out_b();
    for (uint32_t r = 0; r < H; ++r) z += p.out_w()[r] * sc.hidden[r];
    sc.score = sigmoid(z);
    h = sc.hidden;
    c = sc.cell;
    steps.push_back(std::move(sc));
  }
  return steps;
}

}  // namespace

LstmParams LstmParams::zeros(uint32_t input_dim, uint32_t hidden_dim) {
  LstmParams p;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  p.flat.assign(p.param_count(), 0.0);
  return p;
}

LstmParams LstmParams::init_random(uint32_t input_dim, uint32_t hidden_dim,
                                   uint64_t rng_seed) {
  LstmParams p = zeros(input_dim, hidden_dim);
  double r = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  std::mt19937_64 rng(rng_seed);
  std::uniform_real_distribution<double> unif(-r, r);
  for (auto& v : p.flat) v = unif(rng);
  return p;
}

std::vector<double> lstm_forward(
    const LstmParams& params,
    const std::vector<std::vector<double>>& sequence) {
  auto steps = forward_cached(params, sequence);
  std::vector<double> scores;
  scores.reserve(steps.size());
  for (const auto& s : steps) scores.push_back(s.score);
  return scores;
}

double lstm_loss(const LstmParams& params, const TrainingInstance& instance) {
  if (instance.features.size() != instance.labels.size())
    throw Error(ErrorKind::State, "lstm_loss: feature/label length mismatch");
  if (instance.features.empty()) return 0.0;
  auto scores = lstm_forward(params, instance.features);
  double loss = 0.0;
  for (size_t t = 0; t < scores.size(); ++t) {
    double p = scores[t];
    loss -= instance.labels[t] ? safe_log(p) : safe_log(1.0 - p);
  }
  return loss / static_cast<double>(scores.size());
}

std::vector<double> lstm_backward(const LstmParams& params,
                                  const TrainingInstance& instance) {
  if (instance.features.size() != instance.labels.size())
    throw Error(ErrorKind::State, "lstm_backward: length mismatch");
  const uint32_t H = params.hidden_dim;
  const uint32_t I = params.input_dim;
  std::vector<double> grad(params.param_count(), 0.0);
  if (instance.features.empty()) return grad;

  auto steps = forward_cached(params, instance.features);
  const size_t T = steps.size();
  const double inv_t = 1.0 / static_cast<double>(T);

  // Gradient views share the parameter layout.
  LstmParams gview = params;  // copy for offsets only
  gview.flat.swap(grad);

  std::vector<double> dh(H, 0.0), dc(H, 0.0);
  std::vector<double> da(4 * H);
  for (size_t t = T; t-- > 0;) {
    const StepCache& s = steps[t];
    const std::vector<double>& x = instance.features[t];
    const std::vector<double>* h_prev = t > 0 ? &steps[t - 1].hidden : nullptr;
    const std::vector<double>* c_prev = t > 0 ? &steps[t - 1].cell : nullptr;

    // output head
    double dz = (s.score - static_cast<double>(instance.labels[t])) * inv_t;
    for (uint32_t r = 0; r < H; ++r) {
      gview.out_w()[r] += dz * s.hidden[r];
      dh[r] += dz * params.out_w()[r];
    }
    gview.out_b() += dz;

    for (uint32_t r = 0; r < H; ++r) {
      double do_r = dh[r] * s.tanh_cell[r];
      dc[r] += dh[r] * s.gate_o[r] * (1.0 - s.tanh_cell[r] * s.tanh_cell[r]);
      double di = dc[r] * s.gate_g[r];
      double dg = dc[r] * s.gate_i[r];
      double df = dc[r] * (c_prev ? (*c_prev)[r] : 0.0);
      da[0 * H + r] = di * s.gate_i[r] * (1.0 - s.gate_i[r]);
      da[1 * H + r] = df * s.gate_f[r] * (1.0 - s.gate_f[r]);
      da[2 * H + r] = do_r * s.gate_o[r] * (1.0 - s.gate_o[r]);
      da[3 * H + r] = dg * (1.0 - s.gate_g[r] * s.gate_g[r]);
      dc[r] *= s.gate_f[r];  // carries to t-1
    }

    std::fill(dh.begin(), dh.end(), 0.0);
    for (int g = 0; g < 4; ++g) {
      double* dW = gview.W(g);
      double* dU = gview.U(g);
      double* db = gview.b(g);
      const double* U = params.U(g);
      for (uint32_t r = 0; r < H; ++r) {
        double a = da[g * H + r];
        double* wrow = dW + static_cast<size_t>(r) * I;
        for (uint32_t j = 0; j < I; ++j) wrow[j] += a * x[j];
        if (h_prev) {
          double* urow = dU + static_cast<size_t>(r) * H;
          for (uint32_t j = 0; j < H; ++j) urow[j] += a * (*h_prev)[j];
        }
        db[r] += a;
        const double* urow = U + static_cast<size_t>(r) * H;
        for (uint32_t j = 0; j < H; ++j) dh[j] += a * urow[j];
      }
    }
  }
  return gview.flat;
}

TrainResult lstm_train(const LstmParams& params_init,
                       const std::vector<TrainingInstance>& instances,
                       const TrainConfig& config) {
  if (instances.empty())
    throw Error(ErrorKind::Config, "lstm_train: empty instance set");
  if (config.epochs < 1 || config.learning_rate < 0.0)
    throw Error(ErrorKind::Config, "lstm_train: bad config");

  TrainResult result;
  result.params = params_init;
  LstmParams& p = result.params;
  std::mt19937_64 rng(config.rng_seed);

  std::vector<size_t> order(instances.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> batch_grad(p.param_count());
  for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < order.size(); start += config.batch_size) {
      size_t end = std::min(order.size(), start + config.batch_size);
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      for (size_t i = start; i < end; ++i) {
        const TrainingInstance& inst = instances[order[i]];
        epoch_loss += lstm_loss(p, inst);
        auto g = lstm_backward(p, inst);
        for (size_t j = 0; j < g.size(); ++j) batch_grad[j] += g[j];
      }
      double inv = 1.0 / static_cast<double>(end - start);
      double norm2 = 0.0;
      for (auto& g : batch_grad) {
        g *= inv;
        norm2 += g * g;
      }
      double norm = std::sqrt(norm2);
      double scale = config.learning_rate;
      if (config.clip_norm > 0.0 && norm > config.clip_norm)
        scale *= config.clip_norm / norm;
      for (size_t j = 0; j < p.flat.size(); ++j)
        p.flat[j] -= scale * batch_grad[j];
    }
    epoch_loss /= static_cast<double>(instances.size());
    if (!std::isfinite(epoch_loss))
      throw Error(ErrorKind::Internal,
                  "lstm_train: non-finite loss at epoch " +
                      std::to_string(epoch));
    result.epoch_loss.push_back(epoch_loss);
  }
  return result;
}

void save_lstm(const LstmParams& params, const std::string& path) {
  BinWriter out(path);
  out.magic(kLstmMagic);
  out.pod<uint32_t>(kFormatVersion);
  out.pod<uint32_t>(params.input_dim);
  out.pod<uint32_t>(params.hidden_dim);
  out.array(params.flat.data(), params.flat.size());
  out.close();
}

LstmParams load_lstm(const std::string& path) {
  BinReader in(path);
  in.expect_magic(kLstmMagic);
  uint32_t version = in.pod<uint32_t>();
  if (version != kFormatVersion)
    throw Error(ErrorKind::Parse, path + ": unsupported LSTM params version");
  uint32_t input_dim = in.pod<uint32_t>();
  uint32_t hidden_dim = in.pod<uint32_t>();
  LstmParams p = LstmParams::zeros(input_dim, hidden_dim);
  in.array(p.flat.data(), p.flat.size());
  for (double v : p.flat)
    if (!std::isfinite(v))
      throw Error(ErrorKind::Parse, path + ": non-finite parameter");
  return p;
}

}  // namespace clusd
