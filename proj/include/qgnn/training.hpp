// Copyright 2026 The qgnn-tracking Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Binary cross-entropy training with Adam (one graph per step), threshold
 * metrics, ROC AUC and multi-seed sweeps.
 */
#pragma once

#include "qgnn/graph.hpp"
#include "qgnn/model.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qgnn::training {

inline constexpr double kClampEps = 1e-7;

struct TrainConfig {
    double learning_rate{0.01};
    std::size_t epochs{10};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    double split_ratio{0.5};
    /// Seed of the train/validation split; fixed across initialization seeds.
    std::uint64_t split_seed{0};
    double threshold{0.5};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-8};

    void validate() const;
    nlohmann::json to_json() const;
};

/// Mean binary cross entropy with predictions clamped to [eps, 1 - eps].
double bce_loss(std::span<const std::uint8_t> y, std::span<const double> e_hat);
/// d(bce_loss)/d(e_hat); zero where the clamp is active.
std::vector<double> bce_grad(std::span<const std::uint8_t> y,
                             std::span<const double> e_hat);

class Adam {
  public:
    Adam(std::size_t n, const TrainConfig &cfg);
    /// Throws NumericalError on a non-finite gradient, leaving params untouched.
    void step(std::span<double> params, std::span<const double> grads);
    [[nodiscard]] std::size_t steps() const { return t_; }

  private:
    double lr_, beta1_, beta2_, eps_;
    std::vector<double> m_, v_;
    std::size_t t_{0};
};

/// Trapezoidal area under the ROC curve with tied scores grouped; nullopt
/// if either class is absent.
std::optional<double> roc_auc(std::span<const double> scores,
                              std::span<const std::uint8_t> labels);

struct Metrics {
    double loss{0.0};
    double accuracy{0.0};
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> auc;
};

/// Metrics from pooled per-edge scores; loss is the mean of per-graph losses.
Metrics evaluate(const model::Model &model, const model::ModelParams &params,
                 std::span<const graph::HitGraph> graphs, double threshold,
                 std::vector<std::vector<double>> *scores = nullptr);
Metrics score_metrics(std::span<const double> scores,
                      std::span<const std::uint8_t> labels, double threshold);

struct Split {
    std::vector<std::size_t> train;
    std::vector<std::size_t> valid;
};
Split split_dataset(std::size_t n, double ratio, std::uint64_t seed);

/// Epoch 0 is the untrained model.
struct EpochRecord {
    std::size_t epoch;
    /// mean loss over the optimization steps of the epoch (NaN for epoch 0)
    double running_loss;
    Metrics train;
    Metrics valid;
};

struct TrainRecord {
    std::uint64_t seed{0};
    double initial_valid_loss{0.0};
    std::vector<EpochRecord> history;
    double best_valid_loss{0.0};
    std::size_t best_epoch{0};
    model::ModelParams best_params;
    double wall_seconds{0.0};
};

/// One initialization seed. Graph order is reshuffled every epoch from `seed`.
TrainRecord train_one(const model::Model &model,
                      std::span<const graph::HitGraph> graphs,
                      const Split &split, const TrainConfig &cfg,
                      std::uint64_t seed);

/// Every seed of `cfg`, run on up to `workers` threads.
std::vector<TrainRecord> train(std::span<const graph::HitGraph> graphs,
                               const model::ModelConfig &model_cfg,
                               const TrainConfig &cfg, std::size_t workers = 1);

struct MeanStd {
    double mean;
    double std;
};
/// Sample standard deviation (n - 1); 0 for a single value.
MeanStd mean_std(std::span<const double> values);
MeanStd best_loss_stats(std::span<const TrainRecord> records);

void write_history_csv(const TrainRecord &record, const std::filesystem::path &path);

struct SweepPoint {
    model::ModelConfig model;
    MeanStd best_loss;
    std::vector<double> per_seed;
};

enum class SweepAxis { EmbeddingAxis, NLayers, NIterations, HiddenDim };
SweepAxis parse_sweep_axis(std::string_view text);
std::string_view to_string(SweepAxis axis);

/**
 * Expands `values` along `axis` around `base` (for HiddenDim, N_Q follows
 * N_D) and trains every point for every seed.
 */
std::vector<SweepPoint> sweep(std::span<const graph::HitGraph> graphs,
                              const model::ModelConfig &base, SweepAxis axis,
                              std::span<const std::string> values,
                              const TrainConfig &cfg, std::size_t workers = 1);

void write_sweep_csv(std::span<const SweepPoint> points,
                     const std::filesystem::path &path);

} // namespace qgnn::training
