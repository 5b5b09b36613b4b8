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

#include "types.hpp"

namespace clusd {

/// Single-layer LSTM with a scalar sigmoid output head. All parameters live
/// in one flat f64 vector; per-gate views are computed from offsets, which
/// keeps SGD, clipping and the finite-difference check trivial.
///
/// Flat layout: for each gate in {input, forget, output, candidate}:
///   W (hidden x input, row-major), U (hidden x hidden), b (hidden);
/// then the output projection w (hidden) and scalar bias.
struct LstmParams {
  uint32_t input_dim = 0;
  uint32_t hidden_dim = 0;
  std::vector<double> flat;

  static LstmParams zeros(uint32_t input_dim, uint32_t hidden_dim);
  /// uniform(-r, r) with r = 1/sqrt(hidden_dim)
  static LstmParams init_random(uint32_t input_dim, uint32_t hidden_dim,
                                uint64_t rng_seed);

  size_t gate_stride() const {
    return static_cast<size_t>(hidden_dim) * input_dim +
           static_cast<size_t>(hidden_dim) * hidden_dim + hidden_dim;
  }
  size_t param_count() const { return 4 * gate_stride() + hidden_dim + 1; }

  // gate: 0=input 1=forget 2=output 3=candidate
  const double* W(int gate) const { return flat.data() + gate * gate_stride(); }
  const double* U(int gate) const {
    return W(gate) + static_cast<size_t>(hidden_dim) * input_dim;
  }
  const double* b(int gate) const {
    return U(gate) + static_cast<size_t>(hidden_dim) * hidden_dim;
  }
  const double* out_w() const { return flat.data() + 4 * gate_stride(); }
  double out_b() const { return flat[param_count() - 1]; }

  double* W(int gate) { return flat.data() + gate * gate_stride(); }
  double* U(int gate) {
    return W(gate) + static_cast<size_t>(hidden_dim) * input_dim;
  }
  double* b(int gate) {
    return U(gate) + static_cast<size_t>(hidden_dim) * hidden_dim;
  }
  double* out_w() { return flat.data() + 4 * gate_stride(); }
  double& out_b() { return flat[param_count() - 1]; }
};

struct TrainingInstance {
  std::vector<std::vector<double>> features;  // T x input_dim
  std::vector<uint8_t> labels;                // T, values in {0,1}
};

struct TrainConfig {
  uint32_t epochs = 150;
  double learning_rate = 0.15;
  uint64_t rng_seed = 1;
  uint32_t batch_size = 4;
  double clip_norm = 5.0;
};

/// Per-step scores in (0,1); zero initial hidden and cell state.
std::vector<double> lstm_forward(
    const LstmParams& params,
    const std::vector<std::vector<double>>& sequence);

/// Mean per-timestep binary cross-entropy.
double lstm_loss(const LstmParams& params, const TrainingInstance& instance);

/// Exact analytic gradient of lstm_loss, same flat layout as the params.
std::vector<double> lstm_backward(const LstmParams& params,
                                  const TrainingInstance& instance);

struct TrainResult {
  LstmParams params;
  std::vector<double> epoch_loss;
};

/// Mini-batch SGD with global gradient-norm clipping. Deterministic in
/// (params_init, instances, config). Throws on non-finite loss.
TrainResult lstm_train(const LstmParams& params_init,
                       const std::vector<TrainingInstance>& instances,
                       const TrainConfig& config);

void save_lstm(const LstmParams& params, const std::string& path);
LstmParams load_lstm(const std::string& path);

}  // namespace clusd
