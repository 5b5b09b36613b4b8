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
#include <random>

#include "core/lstm.hpp"
#include "core/types.hpp"

using namespace clusd;

namespace {

TrainingInstance random_instance(uint32_t input_dim, size_t steps,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  TrainingInstance inst;
  inst.features.resize(steps, std::vector<double>(input_dim));
  inst.labels.resize(steps);
  for (size_t t = 0; t < steps; ++t) {
    for (auto& x : inst.features[t]) x = gauss(rng);
    inst.labels[t] = coin(rng) ? 1 : 0;
  }
  return inst;
}

}  // namespace

TEST_CASE("empty sequence gives no scores") {
  LstmParams p = LstmParams::init_random(3, 4, 1);
  CHECK(lstm_forward(p, {}).empty());
}

TEST_CASE("all-zero parameters score 0.5 everywhere") {
  LstmParams p = LstmParams::zeros(3, 4);
  std::vector<std::vector<double>> seq = {{1.0, -2.0, 0.5}, {0.0, 0.0, 0.0}};
  auto scores = lstm_forward(p, seq);
  REQUIRE(scores.size() == 2);
  for (double s : scores) CHECK(s == doctest::Approx(0.5));

  TrainingInstance inst;
  inst.features = seq;
  inst.labels = {1, 0};
  CHECK(lstm_loss(p, inst) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("two-step recurrence matches a frozen external computation") {
  // 2x2 LSTM evaluated independently; scores and loss frozen to 12 decimals
  LstmParams p = LstmParams::zeros(2, 2);
  p.flat = {0.5,  -0.3, 0.1,  0.2,  0.1,  -0.2, 0.05, 0.3,  0.1,  -0.1, -0.2,
            0.4,  0.3,  -0.1, -0.3, 0.2,  0.1,  0.1,  0.2,  0.0,  0.6,  0.1,
            -0.4, 0.2,  0.2,  0.2,  -0.1, 0.4,  -0.2, 0.1,  0.2,  0.3,  -0.5,
            0.1,  0.3,  -0.1, 0.2,  0.2,  0.05, 0.15, 0.7,  -0.5, 0.2};
  REQUIRE(p.flat.size() == p.param_count());

  TrainingInstance inst;
  inst.features = {{1.0, -0.5}, {0.25, 0.75}};
  inst.labels = {1, 0};
  auto scores = lstm_forward(p, inst.features);
  REQUIRE(scores.size() == 2);
  CHECK(scores[0] == doctest::Approx(0.565516446920471).epsilon(1e-12));
  CHECK(scores[1] == doctest::Approx(0.570421959904716).epsilon(1e-12));
  CHECK(lstm_loss(p, inst) == doctest::Approx(0.707483877091852).epsilon(1e-12));
}

TEST_CASE("analytic gradient matches finite differences") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    LstmParams p = LstmParams::init_random(3, 4, 100 + trial);
    TrainingInstance inst = random_instance(3, 5, rng);
    std::vector<double> grad = lstm_backward(p, inst);
    REQUIRE(grad.size() == p.param_count());

    const double h = 1e-5;
    double max_rel = 0.0;
    for (size_t i = 0; i < grad.size(); ++i) {
      LstmParams plus = p, minus = p;
      plus.flat[i] += h;
      minus.flat[i] -= h;
      double fd = (lstm_loss(plus, inst) - lstm_loss(minus, inst)) / (2 * h);
      // floor above the absolute noise of the central difference itself
      double denom = std::max({std::abs(fd), std::abs(grad[i]), 1e-6});
      max_rel = std::max(max_rel, std::abs(fd - grad[i]) / denom);
    }
    CHECK(max_rel < 1e-4);
  }
}

TEST_CASE("zero learning rate is a no-op") {
  std::mt19937_64 rng(7);
  LstmParams p = LstmParams::init_random(3, 4, 2);
  std::vector<TrainingInstance> data = {random_instance(3, 4, rng),
                                        random_instance(3, 3, rng)};
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.learning_rate = 0.0;
  TrainResult res = lstm_train(p, data, cfg);
  CHECK(res.params.flat == p.flat);
  REQUIRE(res.epoch_loss.size() == 5);
  for (double l : res.epoch_loss) CHECK(l == doctest::Approx(res.epoch_loss[0]));
}

TEST_CASE("training is deterministic") {
  std::mt19937_64 rng(19);
  LstmParams p = LstmParams::init_random(3, 4, 3);
  std::vector<TrainingInstance> data;
  for (int i = 0; i < 6; ++i) data.push_back(random_instance(3, 4, rng));
  TrainConfig cfg;
  cfg.epochs = 10;
  cfg.batch_size = 2;
  TrainResult a = lstm_train(p, data, cfg);
  TrainResult b = lstm_train(p, data, cfg);
  CHECK(a.params.flat == b.params.flat);
  CHECK(a.epoch_loss == b.epoch_loss);
}

TEST_CASE("loss decreases on a separable problem") {
  // label equals the sign of the first feature: easily learnable
  std::mt19937_64 rng(29);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<TrainingInstance> data;
  for (int i = 0; i < 16; ++i) {
    TrainingInstance inst;
    inst.features.resize(6, std::vector<double>(2));
    inst.labels.resize(6);
    for (size_t t = 0; t < 6; ++t) {
      double v = gauss(rng);
      inst.features[t] = {v, gauss(rng)};
      inst.labels[t] = v > 0 ? 1 : 0;
    }
    data.push_back(inst);
  }
  LstmParams p = LstmParams::init_random(2, 8, 5);
  TrainConfig cfg;
  cfg.epochs = 150;
  cfg.learning_rate = 0.2;
  cfg.batch_size = 4;
  TrainResult res = lstm_train(p, data, cfg);
  REQUIRE(res.epoch_loss.size() == 150);
  for (size_t e = 1; e <= 10; ++e)
    CHECK(res.epoch_loss[e] < res.epoch_loss[e - 1]);
  CHECK(res.epoch_loss.back() < 0.5 * res.epoch_loss.front());
}

TEST_CASE("all-zero labels stay finite over a long run") {
  std::mt19937_64 rng(31);
  std::vector<TrainingInstance> data;
  for (int i = 0; i < 8; ++i) {
    TrainingInstance inst = random_instance(4, 5, rng);
    std::fill(inst.labels.begin(), inst.labels.end(), uint8_t{0});
    data.push_back(inst);
  }
  LstmParams p = LstmParams::init_random(4, 6, 9);
  TrainConfig cfg;
  cfg.epochs = 150;
  cfg.learning_rate = 0.3;
  TrainResult res = lstm_train(p, data, cfg);
  for (double l : res.epoch_loss) CHECK(std::isfinite(l));
  for (double w : res.params.flat) CHECK(std::isfinite(w));
  // scores should be pushed toward 0
  double s = lstm_forward(res.params, data[0].features).back();
  CHECK(s < 0.2);
}

TEST_CASE("gradient clipping bounds the step") {
  std::mt19937_64 rng(37);
  LstmParams p = LstmParams::init_random(3, 4, 11);
  std::vector<TrainingInstance> data = {random_instance(3, 4, rng)};
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.learning_rate = 1.0;
  cfg.batch_size = 1;
  cfg.clip_norm = 1e-6;  // clamp to a nearly zero step
  TrainResult res = lstm_train(p, data, cfg);
  double step = 0.0;
  for (size_t i = 0; i < p.flat.size(); ++i)
    step += (res.params.flat[i] - p.flat[i]) * (res.params.flat[i] - p.flat[i]);
  CHECK(std::sqrt(step) <= 1e-6 + 1e-12);
}

TEST_CASE("params round-trip through disk") {
  LstmParams p = LstmParams::init_random(21, 32, 77);
  auto path = std::filesystem::temp_directory_path() / "clusd_lstm_rt.bin";
  save_lstm(p, path.string());
  LstmParams back = load_lstm(path.string());
  CHECK(back.input_dim == p.input_dim);
  CHECK(back.hidden_dim == p.hidden_dim);
  CHECK(back.flat == p.flat);
}

TEST_CASE("init_random is seeded and bounded") {
  LstmParams a = LstmParams::init_random(5, 16, 1);
  LstmParams b = LstmParams::init_random(5, 16, 1);
  LstmParams c = LstmParams::init_random(5, 16, 2);
  CHECK(a.flat == b.flat);
  CHECK(a.flat != c.flat);
  double r = 1.0 / std::sqrt(16.0);
  for (double w : a.flat) CHECK(std::abs(w) <= r);
}
