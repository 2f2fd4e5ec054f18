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
 * Central finite-difference checks of analytic gradients, for single
 * circuits and for the full model loss.
 *
 * Errors are measured as |a - n| / max(|a|, |n|, floor). The floor keeps
 * gradients that are zero (or nearly so) from being judged on rounding
 * noise alone: with step h the difference quotient carries an absolute
 * error around 1e-16 / h, so for h = 1e-5 anything under the floor is
 * compared absolutely at tolerance * floor.
 */
#pragma once

#include "qgnn/graph.hpp"
#include "qgnn/model.hpp"
#include "qgnn/statevector.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qgnn::gradcheck {

struct Options {
    double step{1e-5};
    double tolerance{1e-5};
    double floor{1e-5};
};

double relative_error(double analytic, double numeric, double floor);

struct Result {
    std::string label;
    std::size_t n_checked{0};
    std::size_t n_failed{0};
    double worst_error{0.0};
    std::size_t worst_index{0};
    double worst_analytic{0.0};
    double worst_numeric{0.0};
    double seconds{0.0};

    [[nodiscard]] bool passed() const { return n_checked > 0 && n_failed == 0; }
    nlohmann::json to_json() const;
};

/// Every (output, parameter) and (output, input) entry of the adjoint
/// Jacobian against differences of expectation values.
Result check_circuit(const sim::CircuitTemplate &circuit,
                     std::span<const double> params,
                     std::span<const double> inputs, const Options &opts,
                     std::string label = "circuit");

/// Gradient of the mean BCE loss on `g` with respect to every parameter.
Result check_model(const model::Model &model, const model::ModelParams &params,
                   const graph::HitGraph &g, const Options &opts,
                   std::string label = "model");

/// A synthetic graph (cuts disabled) cut down to its first `n_edges` edges.
graph::HitGraph small_graph(std::size_t n_edges, std::uint64_t seed);

/// N_Q = N_D = 3, N_I = 2, N_L = 1 for the given preset. TTN needs a power
/// of two, so TTN-10 gets N_Q = 4.
model::ModelConfig preset_config(std::string_view preset);

inline constexpr std::string_view kPresets[] = {"circuit10", "circuit19",
                                                "MPS-10", "TTN-10"};

/// check_model for each preset on small_graph(n_edges, seed), model
/// initialized from `seed`.
std::vector<Result> check_presets(std::span<const std::string> presets,
                                  std::size_t n_edges, std::uint64_t seed,
                                  const Options &opts, std::size_t workers = 1);

} // namespace qgnn::gradcheck
