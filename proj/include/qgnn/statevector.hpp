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
 * Dense statevector simulation for the {RX, RY, RZ, CZ, CRX} gate alphabet,
 * Pauli-Z expectations and adjoint-mode gradients.
 *
 * Conventions: R_A(t) = exp(-i t A / 2); CRX applies RX on the target when
 * the control is 1; qubit 0 is the least significant bit of a basis index.
 */
#pragma once

#include "qgnn/matrix.hpp"

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace qgnn::sim {

inline constexpr std::size_t kMaxQubits = 20;

using complex_t = std::complex<double>;

class Statevector {
  public:
    /// |0...0> on `n_qubits` qubits.
    explicit Statevector(std::size_t n_qubits);
    Statevector(std::size_t n_qubits, std::vector<complex_t> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const { return n_qubits_; }
    [[nodiscard]] std::size_t size() const { return amps_.size(); }
    [[nodiscard]] std::span<const complex_t> amplitudes() const { return amps_; }
    [[nodiscard]] std::span<complex_t> amplitudes() { return amps_; }
    complex_t operator[](std::size_t i) const { return amps_[i]; }
    complex_t &operator[](std::size_t i) { return amps_[i]; }

    [[nodiscard]] double squared_norm() const;
    void normalize();

  private:
    std::size_t n_qubits_;
    std::vector<complex_t> amps_;
};

enum class GateKind { RX, RY, RZ, CZ, CRX };

std::string_view to_string(GateKind kind);

struct ConstantAngle {
    double radians;
};
struct TrainableAngle {
    std::size_t param;
};
/// angle = scale * inputs[feature]
struct InputAngle {
    std::size_t feature;
    double scale;
};
using Binding =
    std::variant<std::monostate, ConstantAngle, TrainableAngle, InputAngle>;

struct GateOp {
    GateKind kind;
    /// wires[0] is the target of single-qubit gates and the control of CRX.
    std::array<std::size_t, 2> wires{0, 0};
    Binding binding{};

    [[nodiscard]] std::size_t arity() const;
    [[nodiscard]] bool parameterized() const { return kind != GateKind::CZ; }
    [[nodiscard]] std::span<const std::size_t> qubits() const {
        return {wires.data(), arity()};
    }

    static GateOp rotation(GateKind kind, std::size_t qubit, Binding binding);
    static GateOp cz(std::size_t a, std::size_t b);
    static GateOp crx(std::size_t control, std::size_t target, Binding binding);
};

struct CircuitTemplate {
    std::size_t n_qubits{0};
    std::vector<GateOp> ops;
    std::size_t n_params{0};
    std::size_t n_inputs{0};
    std::vector<std::size_t> measured_qubits;

    /// Throws std::invalid_argument when any structural invariant is broken.
    void validate() const;
    [[nodiscard]] std::size_t count_trainable_bindings() const;
};

/// Applies `gate` in place. `angle` must be given iff the gate is parameterized.
void apply_gate(Statevector &state, const GateOp &gate,
                std::optional<double> angle);

/// Resolves the rotation angle of `gate` for the given bindings.
double bound_angle(const GateOp &gate, std::span<const double> params,
                   std::span<const double> inputs);

Statevector run(const CircuitTemplate &circuit, std::span<const double> params,
                std::span<const double> inputs);

double expectation_z(const Statevector &state, std::size_t qubit);

/// |<a|b>|^2
double fidelity(const Statevector &a, const Statevector &b);

struct Jacobians {
    /// One <Z> per measured qubit.
    std::vector<double> expectations;
    /// measured x n_params
    Matrix d_params;
    /// measured x n_inputs
    Matrix d_inputs;
};

/**
 * @brief Exact Jacobians of every measured <Z> with respect to all trainable
 * parameters and input features, by a single reverse sweep over the gate list
 * carrying one adjoint state per measured qubit.
 */
Jacobians adjoint_gradients(const CircuitTemplate &circuit,
                            std::span<const double> params,
                            std::span<const double> inputs);

struct VectorJacobian {
    std::vector<double> expectations;
    std::vector<double> d_params;
    std::vector<double> d_inputs;
};

/**
 * @brief Vector-Jacobian product: gradients of sum_m cotangent[m] * <Z_m>.
 *
 * Uses one adjoint state for the weighted observable, so the cost does not
 * grow with the number of measured qubits.
 */
VectorJacobian adjoint_vjp(const CircuitTemplate &circuit,
                           std::span<const double> params,
                           std::span<const double> inputs,
                           std::span<const double> cotangent);

} // namespace qgnn::sim
