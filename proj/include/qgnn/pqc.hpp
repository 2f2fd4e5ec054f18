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
 * Angle-encoding circuits, the four PQC families used by the hybrid layers
 * and the encode -> PQC -> measure QNN built from them.
 *
 * Layouts (parameter counts in parentheses):
 *   Circuit10: RY on all qubits, then per layer a CZ ring and another RY
 *              layer (n * (L + 1)).
 *   Circuit19: per layer RX on all, RZ on all, CRX ring i -> i+1 (3 n L).
 *   MPS:       ladder of blocks RY(k) RY(k+1) CZ(k, k+1), then a readout RY
 *              on qubit n-1, which is measured (2n - 1).
 *   TTN:       binary tree of the same block, keeping the lower qubit of each
 *              pair, then a readout RY on qubit 0, which is measured (2n - 1).
 *   Identity:  no trainable gates; the encoding is measured directly.
 *
 * The readout rotation matters: a CZ commutes with Z, so without it the
 * measured qubit of either hierarchical circuit would ignore the final
 * entangler (and for MPS, every other qubit).
 */
#pragma once

#include "qgnn/statevector.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qgnn::pqc {

enum class Axis { X, Y, Z };
enum class Family { Circuit10, Circuit19, MPS, TTN, Identity };

std::string_view to_string(Axis axis);
std::string_view to_string(Family family);
Axis parse_axis(std::string_view text);
Family parse_family(std::string_view text);

struct EncodingSpec {
    Axis axis{Axis::Y};
    /// radians per unit input; inputs in [0, 1] map onto [0, scale]
    double scale{std::numbers::pi};
};

struct PqcSpec {
    Family family{Family::Circuit10};
    std::size_t n_qubits{4};
    /// Ignored by the hierarchical families.
    std::size_t n_layers{1};

    void validate() const;
};

struct QnnSpec {
    EncodingSpec encoding{};
    PqcSpec pqc{};
};

[[nodiscard]] bool is_layered(Family family);
[[nodiscard]] std::size_t parameter_count(const PqcSpec &spec);
[[nodiscard]] std::size_t output_count(const PqcSpec &spec);

/// The trainable part alone: no inputs, starts from |0...0>.
sim::CircuitTemplate build_pqc(const PqcSpec &spec);

/// Encoding rotations (input k on qubit k) followed by the PQC.
sim::CircuitTemplate build_qnn(const QnnSpec &spec);

/// One <Z> per measured qubit. Inputs must lie in [0, 1].
std::vector<double> qnn_forward(const sim::CircuitTemplate &circuit,
                                std::span<const double> params,
                                std::span<const double> inputs);

/// Gate list with bindings, for inspection and drawing tools.
nlohmann::json to_json(const sim::CircuitTemplate &circuit);

} // namespace qgnn::pqc
