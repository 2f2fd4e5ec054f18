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
#include "qgnn/pqc.hpp"
#include "qgnn/error.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace qgnn::pqc {

using sim::GateKind;
using sim::GateOp;
using sim::TrainableAngle;

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](char c) { return c == '_' || c == ' ' || c == '-'; }),
              out.end());
    return out;
}

GateKind encoding_gate(Axis axis) {
    switch (axis) {
    case Axis::X:
        return GateKind::RX;
    case Axis::Y:
        return GateKind::RY;
    case Axis::Z:
        return GateKind::RZ;
    }
    return GateKind::RY;
}

class Builder {
  public:
    explicit Builder(sim::CircuitTemplate &c) : c_{c} {}

    void ry(std::size_t q) { rot(GateKind::RY, q); }
    void rot(GateKind kind, std::size_t q) {
        c_.ops.push_back(
            GateOp::rotation(kind, q, TrainableAngle{c_.n_params++}));
    }
    void cz(std::size_t a, std::size_t b) { c_.ops.push_back(GateOp::cz(a, b)); }
    void crx(std::size_t control, std::size_t target) {
        c_.ops.push_back(
            GateOp::crx(control, target, TrainableAngle{c_.n_params++}));
    }

  private:
    sim::CircuitTemplate &c_;
};

void append_pqc(sim::CircuitTemplate &c, const PqcSpec &spec) {
    const std::size_t n = spec.n_qubits;
    Builder b{c};
    switch (spec.family) {
    case Family::Identity:
        break;
    case Family::Circuit10:
        for (std::size_t q = 0; q < n; ++q) {
            b.ry(q);
        }
        for (std::size_t l = 0; l < spec.n_layers; ++l) {
            if (n == 2) {
                b.cz(0, 1);
            } else if (n >= 3) {
                for (std::size_t q = 0; q < n; ++q) {
                    b.cz(q, (q + 1) % n);
                }
            }
            for (std::size_t q = 0; q < n; ++q) {
                b.ry(q);
            }
        }
        break;
    case Family::Circuit19:
        for (std::size_t l = 0; l < spec.n_layers; ++l) {
            for (std::size_t q = 0; q < n; ++q) {
                b.rot(GateKind::RX, q);
            }
            for (std::size_t q = 0; q < n; ++q) {
                b.rot(GateKind::RZ, q);
            }
            for (std::size_t q = 0; q < n; ++q) {
                b.crx(q, (q + 1) % n);
            }
        }
        break;
    case Family::MPS:
        for (std::size_t k = 0; k + 1 < n; ++k) {
            b.ry(k);
            b.ry(k + 1);
            b.cz(k, k + 1);
        }
        // without it the last CZ commutes with the Z readout and the
        // measured qubit decouples from the ladder
        b.ry(n - 1);
        break;
    case Family::TTN: {
        std::vector<std::size_t> alive(n);
        for (std::size_t q = 0; q < n; ++q) {
            alive[q] = q;
        }
        while (alive.size() > 1) {
            std::vector<std::size_t> next;
            for (std::size_t i = 0; i + 1 < alive.size(); i += 2) {
                b.ry(alive[i]);
                b.ry(alive[i + 1]);
                b.cz(alive[i], alive[i + 1]);
                next.push_back(alive[i]);
            }
            alive = std::move(next);
        }
        b.ry(0);
        break;
    }
    }
    switch (spec.family) {
    case Family::MPS:
        c.measured_qubits = {n - 1};
        break;
    case Family::TTN:
        c.measured_qubits = {0};
        break;
    default:
        c.measured_qubits.resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            c.measured_qubits[q] = q;
        }
    }
}

} // namespace

std::string_view to_string(Axis axis) {
    switch (axis) {
    case Axis::X:
        return "x";
    case Axis::Y:
        return "y";
    case Axis::Z:
        return "z";
    }
    return "?";
}

std::string_view to_string(Family family) {
    switch (family) {
    case Family::Circuit10:
        return "circuit10";
    case Family::Circuit19:
        return "circuit19";
    case Family::MPS:
        return "mps";
    case Family::TTN:
        return "ttn";
    case Family::Identity:
        return "identity";
    }
    return "?";
}

Axis parse_axis(std::string_view text) {
    const auto s = lower(text);
    if (s == "x") {
        return Axis::X;
    }
    if (s == "y") {
        return Axis::Y;
    }
    if (s == "z") {
        return Axis::Z;
    }
    throw std::invalid_argument("unknown encoding axis '" + std::string(text) +
                                "'");
}

Family parse_family(std::string_view text) {
    const auto s = lower(text);
    if (s == "circuit10" || s == "10") {
        return Family::Circuit10;
    }
    if (s == "circuit19" || s == "19") {
        return Family::Circuit19;
    }
    if (s == "mps") {
        return Family::MPS;
    }
    if (s == "ttn") {
        return Family::TTN;
    }
    if (s == "identity") {
        return Family::Identity;
    }
    throw std::invalid_argument("unknown circuit family '" + std::string(text) +
                                "'");
}

void PqcSpec::validate() const {
    QGNN_REQUIRE(n_qubits >= 1 && n_qubits <= sim::kMaxQubits,
                 "qubit count must be in 1..20");
    QGNN_REQUIRE(family == Family::Identity || !is_layered(family) || n_layers >= 1,
                 "layered circuits need at least one layer");
    switch (family) {
    case Family::Circuit10:
    case Family::Identity:
        break;
    case Family::Circuit19:
        QGNN_REQUIRE(n_qubits >= 2, "Circuit19 needs at least 2 qubits");
        break;
    case Family::MPS:
        QGNN_REQUIRE(n_qubits >= 2, "MPS needs at least 2 qubits");
        break;
    case Family::TTN:
        QGNN_REQUIRE(n_qubits >= 2 && (n_qubits & (n_qubits - 1)) == 0,
                     "TTN needs a power-of-two qubit count >= 2");
        break;
    }
}

bool is_layered(Family family) {
    return family == Family::Circuit10 || family == Family::Circuit19 ||
           family == Family::Identity;
}

std::size_t parameter_count(const PqcSpec &spec) {
    spec.validate();
    const std::size_t n = spec.n_qubits;
    switch (spec.family) {
    case Family::Circuit10:
        return n * (spec.n_layers + 1);
    case Family::Circuit19:
        return 3 * n * spec.n_layers;
    case Family::MPS:
    case Family::TTN:
        return 2 * n - 1;
    case Family::Identity:
        return 0;
    }
    return 0;
}

std::size_t output_count(const PqcSpec &spec) {
    return is_layered(spec.family) ? spec.n_qubits : 1;
}

sim::CircuitTemplate build_pqc(const PqcSpec &spec) {
    spec.validate();
    sim::CircuitTemplate c;
    c.n_qubits = spec.n_qubits;
    append_pqc(c, spec);
    c.validate();
    return c;
}

sim::CircuitTemplate build_qnn(const QnnSpec &spec) {
    spec.pqc.validate();
    QGNN_REQUIRE(spec.encoding.scale > 0.0, "encoding scale must be positive");
    sim::CircuitTemplate c;
    c.n_qubits = spec.pqc.n_qubits;
    c.n_inputs = spec.pqc.n_qubits;
    const GateKind g = encoding_gate(spec.encoding.axis);
    for (std::size_t q = 0; q < c.n_qubits; ++q) {
        c.ops.push_back(
            GateOp::rotation(g, q, sim::InputAngle{q, spec.encoding.scale}));
    }
    append_pqc(c, spec.pqc);
    c.validate();
    return c;
}

std::vector<double> qnn_forward(const sim::CircuitTemplate &circuit,
                                std::span<const double> params,
                                std::span<const double> inputs) {
    for (double x : inputs) {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw std::domain_error("QNN input outside [0, 1]: " +
                                    std::to_string(x));
        }
    }
    const auto state = sim::run(circuit, params, inputs);
    std::vector<double> out;
    out.reserve(circuit.measured_qubits.size());
    for (auto q : circuit.measured_qubits) {
        out.push_back(sim::expectation_z(state, q));
    }
    return out;
}

nlohmann::json to_json(const sim::CircuitTemplate &circuit) {
    nlohmann::json ops = nlohmann::json::array();
    for (const auto &op : circuit.ops) {
        nlohmann::json j;
        j["gate"] = std::string(sim::to_string(op.kind));
        const auto qs = op.qubits();
        j["qubits"] = std::vector<std::size_t>(qs.begin(), qs.end());
        std::visit(
            [&](const auto &b) {
                using B = std::decay_t<decltype(b)>;
                if constexpr (std::is_same_v<B, sim::ConstantAngle>) {
                    j["binding"] = {{"kind", "constant"}, {"angle", b.radians}};
                } else if constexpr (std::is_same_v<B, sim::TrainableAngle>) {
                    j["binding"] = {{"kind", "trainable"}, {"index", b.param}};
                } else if constexpr (std::is_same_v<B, sim::InputAngle>) {
                    j["binding"] = {{"kind", "input"},
                                    {"index", b.feature},
                                    {"scale", b.scale}};
                }
            },
            op.binding);
        ops.push_back(std::move(j));
    }
    return {{"n_qubits", circuit.n_qubits},
            {"n_params", circuit.n_params},
            {"n_inputs", circuit.n_inputs},
            {"measured_qubits", circuit.measured_qubits},
            {"ops", std::move(ops)}};
}

} // namespace qgnn::pqc
