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
 * Attention-passing GNN with hybrid (dense -> QNN -> dense) inner networks.
 *
 *   v   = x (+) sigmoid(W_in x + b_in)
 *   repeat N_I times:
 *     e_k = EdgeNet(v[out_k] (+) v[in_k])
 *     v_j = x_j (+) NodeNet(sum_{in_k = j} e_k v[out_k]
 *                           (+) sum_{out_k = j} e_k v[in_k] (+) v_j)
 *   return EdgeNet(v[out_k] (+) v[in_k])
 *
 * A single EdgeNet parameter set is shared by every iteration and by the
 * readout; gradients from all uses are summed.
 */
#pragma once

#include "qgnn/graph.hpp"
#include "qgnn/pqc.hpp"
#include "qgnn/statevector.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qgnn::model {

enum class Mode { Hybrid, Classical };

std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view text);

/// Divisors applied to (r, phi, z) before the input network.
struct InputScaling {
    double r{1100.0};
    double phi{std::numbers::pi};
    double z{1100.0};
};

struct ModelConfig {
    std::size_t hidden_dim{4};   // N_D
    std::size_t n_qubits{4};     // N_Q
    std::size_t n_iterations{3}; // N_I
    std::size_t n_layers{1};     // N_L
    pqc::Family edge_pqc{pqc::Family::Circuit10};
    pqc::Family node_pqc{pqc::Family::Circuit10};
    pqc::Axis axis{pqc::Axis::Y};
    Mode mode{Mode::Hybrid};
    InputScaling scaling{};

    void validate() const;

    /// Sets edge/node families from a preset label: circuit10, circuit19,
    /// MPS-10 or TTN-10.
    void apply_preset(std::string_view label);
    [[nodiscard]] std::string preset_label() const;

    [[nodiscard]] pqc::QnnSpec edge_qnn() const;
    [[nodiscard]] pqc::QnnSpec node_qnn() const;

    nlohmann::json to_json() const;
    static ModelConfig from_json(const nlohmann::json &j);
};

/// Fully connected layer with sigmoid activation.
struct DenseLayer {
    std::size_t in{0};
    std::size_t out{0};
    std::vector<double> weights; // out x in, row-major
    std::vector<double> bias;

    DenseLayer() = default;
    DenseLayer(std::size_t n_in, std::size_t n_out)
        : in{n_in}, out{n_out}, weights(n_in * n_out, 0.0), bias(n_out, 0.0) {}

    void forward(std::span<const double> x, std::span<double> y) const;
    /// Accumulates into `grad` and writes d(loss)/dx into `dx` (if non-empty).
    void backward(std::span<const double> x, std::span<const double> y,
                  std::span<const double> dy, DenseLayer &grad,
                  std::span<double> dx) const;
};

/// fc1 -> (QNN | dense) -> fc2. `qnn` is empty in classical mode and `inner`
/// is empty in hybrid mode.
struct HybridNet {
    DenseLayer fc1;
    std::vector<double> qnn;
    DenseLayer inner;
    DenseLayer fc2;
};

struct ModelParams {
    DenseLayer input_net;
    HybridNet edge_net;
    HybridNet node_net;

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::vector<double> flatten() const;
    void assign(std::span<const double> flat);
    /// Same shapes, all zero.
    [[nodiscard]] ModelParams zeros_like() const;

    /// Visits every parameter block in flatten() order.
    template <typename F> void for_each_block(F &&f) {
        for_each_block_impl(*this, f);
    }
    template <typename F> void for_each_block(F &&f) const {
        for_each_block_impl(*this, f);
    }

  private:
    template <typename Self, typename F>
    static void for_each_block_impl(Self &self, F &f) {
        auto dense = [&](auto &d) {
            f(d.weights);
            f(d.bias);
        };
        dense(self.input_net);
        for (auto *net : {&self.edge_net, &self.node_net}) {
            dense(net->fc1);
            f(net->qnn);
            dense(net->inner);
            dense(net->fc2);
        }
    }
};

/// Intermediates of one hybrid-net evaluation.
struct HybridCache {
    std::vector<double> input;
    std::vector<double> h1;
    std::vector<double> q;
    std::vector<double> out;
};

/// Everything the reverse pass needs.
struct ForwardTape {
    std::vector<double> x; // N_V x 3, scaled
    /// node features after the input network and after each node update
    std::vector<std::vector<double>> v;
    std::vector<std::vector<HybridCache>> edge_caches;
    std::vector<std::vector<double>> e;
    std::vector<std::vector<HybridCache>> node_caches;

    [[nodiscard]] const std::vector<double> &output() const { return e.back(); }
};

class Model {
  public:
    explicit Model(ModelConfig cfg);

    [[nodiscard]] const ModelConfig &config() const { return cfg_; }
    [[nodiscard]] std::size_t feature_dim() const { return 3 + cfg_.hidden_dim; }
    [[nodiscard]] const sim::CircuitTemplate &edge_circuit() const {
        return edge_circuit_;
    }
    [[nodiscard]] const sim::CircuitTemplate &node_circuit() const {
        return node_circuit_;
    }

    /// Glorot-uniform dense weights, zero biases, circuit angles in [0, 2pi).
    [[nodiscard]] ModelParams init(std::uint64_t seed) const;
    [[nodiscard]] ModelParams zeros() const;

    /// Scaled coordinates, N_V x 3 row-major.
    [[nodiscard]] std::vector<double> scale_inputs(const graph::HitGraph &g) const;

    /// v = x (+) sigmoid(W x + b), N_V x (3 + N_D)
    [[nodiscard]] std::vector<double>
    input_network(std::span<const double> x, const ModelParams &p) const;

    [[nodiscard]] std::vector<double>
    edge_network(std::span<const double> v, const graph::HitGraph &g,
                 const ModelParams &p,
                 std::vector<HybridCache> *caches = nullptr) const;

    [[nodiscard]] std::vector<double>
    node_network(std::span<const double> x, std::span<const double> v,
                 std::span<const double> e, const graph::HitGraph &g,
                 const ModelParams &p,
                 std::vector<HybridCache> *caches = nullptr) const;

    /// Final edge probabilities in (0, 1).
    [[nodiscard]] std::vector<double> forward(const graph::HitGraph &g,
                                              const ModelParams &p) const;
    [[nodiscard]] ForwardTape forward_tape(const graph::HitGraph &g,
                                           const ModelParams &p) const;

    /// Gradients of sum_k upstream[k] * e_k with respect to every parameter.
    [[nodiscard]] ModelParams backward(const ForwardTape &tape,
                                       const graph::HitGraph &g,
                                       const ModelParams &p,
                                       std::span<const double> upstream) const;

    void hybrid_forward(const HybridNet &net, const sim::CircuitTemplate &circuit,
                        std::span<const double> in, HybridCache &cache) const;
    void hybrid_backward(const HybridNet &net,
                         const sim::CircuitTemplate &circuit,
                         const HybridCache &cache, std::span<const double> d_out,
                         HybridNet &grad, std::span<double> d_in) const;

  private:
    ModelConfig cfg_;
    sim::CircuitTemplate edge_circuit_;
    sim::CircuitTemplate node_circuit_;
};

double sigmoid(double z);

/// Checkpoint: "QGNNCKPT", u64 header length, JSON header, f64 parameters
/// (little-endian, flatten() order).
void write_checkpoint(const std::filesystem::path &path, const ModelConfig &cfg,
                      const ModelParams &params, const nlohmann::json &header);
struct Checkpoint {
    ModelConfig config;
    ModelParams params;
    nlohmann::json header;
};
Checkpoint read_checkpoint(const std::filesystem::path &path);

} // namespace qgnn::model
