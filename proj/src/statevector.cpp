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
#include "qgnn/statevector.hpp"
#include "qgnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qgnn::sim {

namespace {

using Mat2 = std::array<complex_t, 4>; // row-major 2x2

constexpr complex_t kI{0.0, 1.0};

Mat2 rotation_matrix(GateKind kind, double theta) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    switch (kind) {
    case GateKind::RX:
    case GateKind::CRX:
        return {c, -kI * s, -kI * s, c};
    case GateKind::RY:
        return {c, -s, s, c};
    case GateKind::RZ:
        return {std::polar(1.0, -theta / 2), 0.0, 0.0, std::polar(1.0, theta / 2)};
    case GateKind::CZ:
        break;
    }
    throw std::logic_error("CZ has no rotation matrix");
}

// d/dtheta of rotation_matrix(kind, theta)
Mat2 rotation_derivative(GateKind kind, double theta) {
    const double c = std::cos(theta / 2) / 2;
    const double s = std::sin(theta / 2) / 2;
    switch (kind) {
    case GateKind::RX:
    case GateKind::CRX:
        return {-s, -kI * c, -kI * c, -s};
    case GateKind::RY:
        return {-s, -c, c, -s};
    case GateKind::RZ:
        return {-kI / 2.0 * std::polar(1.0, -theta / 2), 0.0, 0.0,
                kI / 2.0 * std::polar(1.0, theta / 2)};
    case GateKind::CZ:
        break;
    }
    throw std::logic_error("CZ has no rotation derivative");
}

void apply_1q(std::span<complex_t> amps, std::size_t target, const Mat2 &m) {
    const std::size_t mask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & mask) {
            continue;
        }
        const complex_t a = amps[i];
        const complex_t b = amps[i | mask];
        amps[i] = m[0] * a + m[1] * b;
        amps[i | mask] = m[2] * a + m[3] * b;
    }
}

// Applies m on target where control = 1. With `project`, amplitudes with
// control = 0 are zeroed (derivative of a controlled rotation).
void apply_controlled_1q(std::span<complex_t> amps, std::size_t control,
                         std::size_t target, const Mat2 &m, bool project) {
    const std::size_t cmask = std::size_t{1} << control;
    const std::size_t tmask = std::size_t{1} << target;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (!(i & cmask)) {
            if (project) {
                amps[i] = 0.0;
            }
            continue;
        }
        if (i & tmask) {
            continue;
        }
        const complex_t a = amps[i];
        const complex_t b = amps[i | tmask];
        amps[i] = m[0] * a + m[1] * b;
        amps[i | tmask] = m[2] * a + m[3] * b;
    }
}

void apply_cz(std::span<complex_t> amps, std::size_t a, std::size_t b) {
    const std::size_t mask = (std::size_t{1} << a) | (std::size_t{1} << b);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if ((i & mask) == mask) {
            amps[i] = -amps[i];
        }
    }
}

void apply_unchecked(std::span<complex_t> amps, const GateOp &gate,
                     double theta) {
    switch (gate.kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
        apply_1q(amps, gate.wires[0], rotation_matrix(gate.kind, theta));
        break;
    case GateKind::CZ:
        apply_cz(amps, gate.wires[0], gate.wires[1]);
        break;
    case GateKind::CRX:
        apply_controlled_1q(amps, gate.wires[0], gate.wires[1],
                            rotation_matrix(gate.kind, theta), false);
        break;
    }
}

// Replaces amps by dU/dtheta |amps>.
void apply_derivative(std::span<complex_t> amps, const GateOp &gate,
                      double theta) {
    const Mat2 d = rotation_derivative(gate.kind, theta);
    if (gate.kind == GateKind::CRX) {
        apply_controlled_1q(amps, gate.wires[0], gate.wires[1], d, true);
    } else {
        apply_1q(amps, gate.wires[0], d);
    }
}

// Every gate in the alphabet satisfies U(theta)^dagger = U(-theta).
void apply_inverse(std::span<complex_t> amps, const GateOp &gate,
                   double theta) {
    apply_unchecked(amps, gate, -theta);
}

void check_lengths(const CircuitTemplate &circuit,
                   std::span<const double> params,
                   std::span<const double> inputs) {
    if (params.size() != circuit.n_params) {
        throw std::invalid_argument(
            "parameter vector has length " + std::to_string(params.size()) +
            ", circuit expects " + std::to_string(circuit.n_params));
    }
    if (inputs.size() != circuit.n_inputs) {
        throw std::invalid_argument(
            "input vector has length " + std::to_string(inputs.size()) +
            ", circuit expects " + std::to_string(circuit.n_inputs));
    }
}

complex_t inner(std::span<const complex_t> a, std::span<const complex_t> b) {
    complex_t acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc += std::conj(a[i]) * b[i];
    }
    return acc;
}

// Multiplies by the diagonal sum_m w[m] Z_{q_m}.
void apply_weighted_z(std::span<complex_t> amps,
                      std::span<const std::size_t> qubits,
                      std::span<const double> weights) {
    for (std::size_t i = 0; i < amps.size(); ++i) {
        double w = 0.0;
        for (std::size_t m = 0; m < qubits.size(); ++m) {
            w += ((i >> qubits[m]) & 1U) ? -weights[m] : weights[m];
        }
        amps[i] *= w;
    }
}

/*
 * Shared reverse sweep. `bras` hold O_k|psi> on entry; `accumulate` receives
 * (bra index, gate, d<O_k>/dtheta) for every parameterized, non-constant gate.
 */
template <typename Accumulate>
void reverse_sweep(const CircuitTemplate &circuit,
                   std::span<const double> params,
                   std::span<const double> inputs, Statevector ket,
                   std::vector<Statevector> &bras, Accumulate &&accumulate) {
    Statevector mu(circuit.n_qubits);
    for (std::size_t g = circuit.ops.size(); g-- > 0;) {
        const GateOp &gate = circuit.ops[g];
        const double theta =
            gate.parameterized() ? bound_angle(gate, params, inputs) : 0.0;
        apply_inverse(ket.amplitudes(), gate, theta);
        const bool differentiable =
            gate.parameterized() &&
            !std::holds_alternative<ConstantAngle>(gate.binding);
        if (differentiable) {
            std::copy(ket.amplitudes().begin(), ket.amplitudes().end(),
                      mu.amplitudes().begin());
            apply_derivative(mu.amplitudes(), gate, theta);
            for (std::size_t k = 0; k < bras.size(); ++k) {
                const double d =
                    2.0 * std::real(inner(bras[k].amplitudes(), mu.amplitudes()));
                accumulate(k, gate, d);
            }
        }
        for (auto &bra : bras) {
            apply_inverse(bra.amplitudes(), gate, theta);
        }
    }
}

} // namespace

// ---------------------------------------------------------------------------
// Statevector

Statevector::Statevector(std::size_t n_qubits)
    : n_qubits_{n_qubits}, amps_{} {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in 1..20, got " +
                                    std::to_string(n_qubits));
    }
    amps_.assign(std::size_t{1} << n_qubits, complex_t{0.0, 0.0});
    amps_[0] = 1.0;
}

Statevector::Statevector(std::size_t n_qubits, std::vector<complex_t> amplitudes)
    : n_qubits_{n_qubits}, amps_{std::move(amplitudes)} {
    if (n_qubits == 0 || n_qubits > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in 1..20, got " +
                                    std::to_string(n_qubits));
    }
    if (amps_.size() != (std::size_t{1} << n_qubits)) {
        throw std::invalid_argument("amplitude array length must be 2^n");
    }
}

double Statevector::squared_norm() const {
    double acc = 0.0;
    for (const auto &a : amps_) {
        acc += std::norm(a);
    }
    return acc;
}

void Statevector::normalize() {
    const double n = std::sqrt(squared_norm());
    if (n == 0.0) {
        throw NumericalError("cannot normalize a zero vector");
    }
    for (auto &a : amps_) {
        a /= n;
    }
}

// ---------------------------------------------------------------------------
// Gates and templates

std::string_view to_string(GateKind kind) {
    switch (kind) {
    case GateKind::RX:
        return "RX";
    case GateKind::RY:
        return "RY";
    case GateKind::RZ:
        return "RZ";
    case GateKind::CZ:
        return "CZ";
    case GateKind::CRX:
        return "CRX";
    }
    return "?";
}

std::size_t GateOp::arity() const {
    return (kind == GateKind::CZ || kind == GateKind::CRX) ? 2 : 1;
}

GateOp GateOp::rotation(GateKind kind, std::size_t qubit, Binding binding) {
    QGNN_REQUIRE(kind == GateKind::RX || kind == GateKind::RY ||
                     kind == GateKind::RZ,
                 "rotation() takes RX, RY or RZ");
    return GateOp{kind, {qubit, qubit}, binding};
}

GateOp GateOp::cz(std::size_t a, std::size_t b) {
    return GateOp{GateKind::CZ, {a, b}, std::monostate{}};
}

GateOp GateOp::crx(std::size_t control, std::size_t target, Binding binding) {
    return GateOp{GateKind::CRX, {control, target}, binding};
}

void CircuitTemplate::validate() const {
    QGNN_REQUIRE(n_qubits >= 1 && n_qubits <= kMaxQubits,
                 "circuit qubit count must be in 1..20");
    std::vector<int> param_seen(n_params, 0);
    std::vector<int> input_seen(n_inputs, 0);
    for (const auto &op : ops) {
        for (auto q : op.qubits()) {
            if (q >= n_qubits) {
                throw std::out_of_range("gate qubit index " + std::to_string(q) +
                                        " out of range");
            }
        }
        if (op.arity() == 2) {
            QGNN_REQUIRE(op.wires[0] != op.wires[1],
                         "two-qubit gate on identical qubits");
        }
        const bool bound = !std::holds_alternative<std::monostate>(op.binding);
        QGNN_REQUIRE(bound == op.parameterized(),
                     "CZ carries no binding; rotations carry exactly one");
        if (const auto *t = std::get_if<TrainableAngle>(&op.binding)) {
            QGNN_REQUIRE(t->param < n_params, "trainable index out of range");
            ++param_seen[t->param];
        }
        if (const auto *in = std::get_if<InputAngle>(&op.binding)) {
            QGNN_REQUIRE(in->feature < n_inputs, "input index out of range");
            ++input_seen[in->feature];
        }
    }
    for (int c : param_seen) {
        QGNN_REQUIRE(c >= 1, "every trainable parameter must be used");
    }
    for (int c : input_seen) {
        QGNN_REQUIRE(c == 1, "every input feature must be bound exactly once");
    }
    QGNN_REQUIRE(!measured_qubits.empty(), "no measured qubits");
    std::vector<bool> seen(n_qubits, false);
    for (auto q : measured_qubits) {
        QGNN_REQUIRE(q < n_qubits, "measured qubit out of range");
        QGNN_REQUIRE(!seen[q], "measured qubits must be distinct");
        seen[q] = true;
    }
}

std::size_t CircuitTemplate::count_trainable_bindings() const {
    std::vector<bool> seen(n_params, false);
    for (const auto &op : ops) {
        if (const auto *t = std::get_if<TrainableAngle>(&op.binding)) {
            if (t->param < n_params) {
                seen[t->param] = true;
            }
        }
    }
    return static_cast<std::size_t>(std::count(seen.begin(), seen.end(), true));
}

void apply_gate(Statevector &state, const GateOp &gate,
                std::optional<double> angle) {
    for (auto q : gate.qubits()) {
        if (q >= state.num_qubits()) {
            throw std::out_of_range("gate qubit index " + std::to_string(q) +
                                    " out of range for " +
                                    std::to_string(state.num_qubits()) +
                                    " qubits");
        }
    }
    if (gate.arity() == 2 && gate.wires[0] == gate.wires[1]) {
        throw std::invalid_argument("two-qubit gate on identical qubits");
    }
    if (gate.parameterized() != angle.has_value()) {
        throw std::invalid_argument(
            gate.parameterized()
                ? std::string(to_string(gate.kind)) + " requires an angle"
                : "CZ takes no angle");
    }
    apply_unchecked(state.amplitudes(), gate, angle.value_or(0.0));
}

double bound_angle(const GateOp &gate, std::span<const double> params,
                   std::span<const double> inputs) {
    return std::visit(
        [&](const auto &b) -> double {
            using B = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<B, ConstantAngle>) {
                return b.radians;
            } else if constexpr (std::is_same_v<B, TrainableAngle>) {
                return params[b.param];
            } else if constexpr (std::is_same_v<B, InputAngle>) {
                return b.scale * inputs[b.feature];
            } else {
                return 0.0;
            }
        },
        gate.binding);
}

Statevector run(const CircuitTemplate &circuit, std::span<const double> params,
                std::span<const double> inputs) {
    check_lengths(circuit, params, inputs);
    Statevector state(circuit.n_qubits);
    for (const auto &gate : circuit.ops) {
        apply_unchecked(state.amplitudes(), gate,
                        gate.parameterized() ? bound_angle(gate, params, inputs)
                                             : 0.0);
    }
    return state;
}

double expectation_z(const Statevector &state, std::size_t qubit) {
    if (qubit >= state.num_qubits()) {
        throw std::out_of_range("measured qubit " + std::to_string(qubit) +
                                " out of range");
    }
    double acc = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double p = std::norm(amps[i]);
        acc += ((i >> qubit) & 1U) ? -p : p;
    }
    return acc;
}

double fidelity(const Statevector &a, const Statevector &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw std::invalid_argument("fidelity of states with different sizes");
    }
    return std::norm(inner(a.amplitudes(), b.amplitudes()));
}

Jacobians adjoint_gradients(const CircuitTemplate &circuit,
                            std::span<const double> params,
                            std::span<const double> inputs) {
    check_lengths(circuit, params, inputs);
    const std::size_t m = circuit.measured_qubits.size();
    Jacobians out;
    out.d_params = Matrix(m, circuit.n_params);
    out.d_inputs = Matrix(m, circuit.n_inputs);

    Statevector ket = run(circuit, params, inputs);
    std::vector<Statevector> bras;
    bras.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t q = circuit.measured_qubits[k];
        out.expectations.push_back(expectation_z(ket, q));
        Statevector bra = ket;
        const double one = 1.0;
        apply_weighted_z(bra.amplitudes(), {&q, 1}, {&one, 1});
        bras.push_back(std::move(bra));
    }
    reverse_sweep(circuit, params, inputs, std::move(ket), bras,
                  [&](std::size_t k, const GateOp &gate, double d) {
                      if (const auto *t = std::get_if<TrainableAngle>(&gate.binding)) {
                          out.d_params(k, t->param) += d;
                      } else if (const auto *in =
                                     std::get_if<InputAngle>(&gate.binding)) {
                          out.d_inputs(k, in->feature) += in->scale * d;
                      }
                  });
    return out;
}

VectorJacobian adjoint_vjp(const CircuitTemplate &circuit,
                           std::span<const double> params,
                           std::span<const double> inputs,
                           std::span<const double> cotangent) {
    check_lengths(circuit, params, inputs);
    QGNN_REQUIRE(cotangent.size() == circuit.measured_qubits.size(),
                 "cotangent length must equal the number of measured qubits");
    VectorJacobian out;
    out.d_params.assign(circuit.n_params, 0.0);
    out.d_inputs.assign(circuit.n_inputs, 0.0);

    Statevector ket = run(circuit, params, inputs);
    for (auto q : circuit.measured_qubits) {
        out.expectations.push_back(expectation_z(ket, q));
    }
    std::vector<Statevector> bras{ket};
    apply_weighted_z(bras[0].amplitudes(), circuit.measured_qubits, cotangent);
    reverse_sweep(circuit, params, inputs, std::move(ket), bras,
                  [&](std::size_t, const GateOp &gate, double d) {
                      if (const auto *t = std::get_if<TrainableAngle>(&gate.binding)) {
                          out.d_params[t->param] += d;
                      } else if (const auto *in =
                                     std::get_if<InputAngle>(&gate.binding)) {
                          out.d_inputs[in->feature] += in->scale * d;
                      }
                  });
    return out;
}

} // namespace qgnn::sim
