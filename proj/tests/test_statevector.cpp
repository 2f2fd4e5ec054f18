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
#include "oracles.hpp"

#include "qgnn/gradcheck.hpp"
#include "qgnn/pqc.hpp"
#include "qgnn/statevector.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

using namespace qgnn;
using namespace qgnn::sim;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

Statevector random_state(std::size_t n, std::mt19937_64 &rng) {
    std::normal_distribution<double> g;
    std::vector<complex_t> a(std::size_t{1} << n);
    for (auto &x : a) {
        x = {g(rng), g(rng)};
    }
    Statevector s(n, a);
    s.normalize();
    return s;
}

/// Random circuit over the whole gate alphabet with mixed bindings.
CircuitTemplate random_circuit(std::size_t n, std::size_t n_ops, std::mt19937_64 &rng) {
    CircuitTemplate c;
    c.n_qubits = n;
    std::uniform_int_distribution<int> kind(0, n >= 2 ? 4 : 2);
    std::uniform_int_distribution<std::size_t> qubit(0, n - 1);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (std::size_t i = 0; i < n_ops; ++i) {
        const auto k = static_cast<GateKind>(kind(rng));
        if (k == GateKind::CZ || k == GateKind::CRX) {
            const auto a = qubit(rng);
            auto b = qubit(rng);
            while (b == a) {
                b = qubit(rng);
            }
            c.ops.push_back(k == GateKind::CZ
                                ? GateOp::cz(a, b)
                                : GateOp::crx(a, b, TrainableAngle{c.n_params++}));
        } else if (i % 3 == 0) {
            c.ops.push_back(GateOp::rotation(k, qubit(rng), ConstantAngle{angle(rng)}));
        } else {
            c.ops.push_back(GateOp::rotation(k, qubit(rng), TrainableAngle{c.n_params++}));
        }
    }
    c.measured_qubits = {0};
    return c;
}

std::vector<double> uniform(std::size_t n, std::mt19937_64 &rng, double lo, double hi) {
    std::uniform_real_distribution<double> d(lo, hi);
    std::vector<double> v(n);
    for (auto &x : v) {
        x = d(rng);
    }
    return v;
}

} // namespace

TEST_CASE("Statevector construction", "[statevector]") {
    SECTION("starts in |0...0>") {
        Statevector s(3);
        REQUIRE(s.size() == 8);
        CHECK(s[0] == complex_t{1.0, 0.0});
        for (std::size_t i = 1; i < 8; ++i) {
            CHECK(s[i] == complex_t{});
        }
    }
    SECTION("qubit count bounds") {
        CHECK_THROWS_AS(Statevector(0), std::invalid_argument);
        CHECK_THROWS_AS(Statevector(kMaxQubits + 1), std::invalid_argument);
        CHECK_THROWS_AS(Statevector(2, std::vector<complex_t>(3)), std::invalid_argument);
    }
}

TEST_CASE("apply_gate closed forms", "[statevector]") {
    SECTION("RY(pi) on |0> gives |1>") {
        Statevector s(1);
        apply_gate(s, GateOp::rotation(GateKind::RY, 0, TrainableAngle{0}), kPi);
        CHECK(std::abs(s[0]) == Approx(0.0).margin(1e-15));
        CHECK(std::abs(s[1]) == Approx(1.0));
        CHECK(expectation_z(s, 0) == Approx(-1.0));
    }
    SECTION("CZ negates only |11>") {
        std::vector<complex_t> a{{0.1, 0.2}, {0.3, -0.1}, {-0.4, 0.5}, {0.6, 0.2}};
        Statevector s(2, a);
        apply_gate(s, GateOp::cz(0, 1), std::nullopt);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(s[i] == a[i]);
        }
        CHECK(s[3] == -a[3]);
    }
    SECTION("CRX with control in |0> is the identity") {
        std::mt19937_64 rng(3);
        // qubit 1 (control) in |0>, target qubit 0 arbitrary
        std::vector<complex_t> a{{0.6, 0.0}, {0.0, 0.8}, {0.0, 0.0}, {0.0, 0.0}};
        for (double t : {0.0, 0.7, kPi, -2.5, 6.0}) {
            Statevector s(2, a);
            apply_gate(s, GateOp::crx(1, 0, TrainableAngle{0}), t);
            for (std::size_t i = 0; i < 4; ++i) {
                CHECK(s[i] == a[i]);
            }
        }
    }
    SECTION("CRX with control in |1> rotates the target") {
        Statevector s(2);
        apply_gate(s, GateOp::rotation(GateKind::RX, 0, TrainableAngle{0}), kPi);
        apply_gate(s, GateOp::crx(0, 1, TrainableAngle{0}), kPi);
        // |01> -> -i |11>
        CHECK(std::abs(s[3]) == Approx(1.0));
        CHECK(expectation_z(s, 1) == Approx(-1.0));
    }
    SECTION("argument errors") {
        Statevector s(2);
        CHECK_THROWS_AS(apply_gate(s, GateOp::rotation(GateKind::RX, 2, TrainableAngle{0}), 0.1),
                        std::out_of_range);
        CHECK_THROWS_AS(apply_gate(s, GateOp::rotation(GateKind::RX, 0, TrainableAngle{0}),
                                   std::nullopt),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply_gate(s, GateOp::cz(0, 1), 0.3), std::invalid_argument);
        CHECK_THROWS_AS(apply_gate(s, GateOp::cz(1, 1), std::nullopt), std::invalid_argument);
    }
}

TEST_CASE("run", "[statevector]") {
    SECTION("empty circuit leaves |0...0>") {
        CircuitTemplate c;
        c.n_qubits = 3;
        c.measured_qubits = {0};
        const auto s = run(c, {}, {});
        CHECK(s[0] == complex_t{1.0, 0.0});
        CHECK(s.squared_norm() == 1.0);
    }
    SECTION("RY(pi x) with x = 0.5") {
        CircuitTemplate c;
        c.n_qubits = 1;
        c.n_inputs = 1;
        c.ops = {GateOp::rotation(GateKind::RY, 0, InputAngle{0, kPi})};
        c.measured_qubits = {0};
        const std::vector<double> x{0.5};
        const auto s = run(c, {}, x);
        CHECK(s[0].real() == Approx(std::cos(kPi / 4)).epsilon(1e-14));
        CHECK(s[1].real() == Approx(std::sin(kPi / 4)).epsilon(1e-14));
        CHECK(std::abs(expectation_z(s, 0)) < 1e-12);
    }
    SECTION("length mismatches") {
        const auto c = pqc::build_qnn({});
        std::vector<double> p(c.n_params), x(c.n_inputs, 0.5);
        CHECK_THROWS_AS(run(c, std::vector<double>(c.n_params + 1), x), std::invalid_argument);
        CHECK_THROWS_AS(run(c, p, std::vector<double>(1)), std::invalid_argument);
    }
}

TEST_CASE("run agrees with a dense unitary product", "[statevector][oracle]") {
    std::mt19937_64 rng(11);
    SECTION("Circuit10, 4 qubits, zero parameters") {
        const auto c = pqc::build_pqc({pqc::Family::Circuit10, 4, 1});
        const std::vector<double> p(c.n_params, 0.0);
        const auto ref = oracle::column0(oracle::unitary(c, p, {}));
        const auto s = run(c, p, {});
        for (std::size_t i = 0; i < ref.size(); ++i) {
            CHECK(std::abs(s[i] - ref[i]) < 1e-10);
        }
    }
    SECTION("every family at random angles") {
        for (auto f : {pqc::Family::Circuit10, pqc::Family::Circuit19, pqc::Family::MPS,
                       pqc::Family::TTN}) {
            for (std::size_t n : {2, 4}) {
                pqc::QnnSpec spec;
                spec.pqc = {f, n, 2};
                const auto c = pqc::build_qnn(spec);
                const auto p = uniform(c.n_params, rng, 0.0, 2 * kPi);
                const auto x = uniform(c.n_inputs, rng, 0.0, 1.0);
                const auto ref = oracle::column0(oracle::unitary(c, p, x));
                const auto s = run(c, p, x);
                for (std::size_t i = 0; i < ref.size(); ++i) {
                    CHECK(std::abs(s[i] - ref[i]) < 1e-10);
                }
            }
        }
    }
    SECTION("random gate sequences on 3 qubits") {
        for (int trial = 0; trial < 50; ++trial) {
            const auto c = random_circuit(3, 25, rng);
            const auto p = uniform(c.n_params, rng, -kPi, kPi);
            const auto ref = oracle::column0(oracle::unitary(c, p, {}));
            const auto s = run(c, p, {});
            for (std::size_t i = 0; i < ref.size(); ++i) {
                REQUIRE(std::abs(s[i] - ref[i]) < 1e-10);
            }
        }
    }
}

TEST_CASE("norm is preserved by random gate sequences", "[statevector]") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> qubits(1, 6);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const auto c = random_circuit(qubits(rng), 40, rng);
        const auto p = uniform(c.n_params, rng, -10.0, 10.0);
        worst = std::max(worst, std::abs(run(c, p, {}).squared_norm() - 1.0));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("expectation_z", "[statevector]") {
    SECTION("basis states give +-1 exactly") {
        for (std::size_t b = 0; b < 8; ++b) {
            std::vector<complex_t> a(8);
            a[b] = 1.0;
            Statevector s(3, a);
            for (std::size_t q = 0; q < 3; ++q) {
                CHECK(expectation_z(s, q) == ((b >> q) & 1 ? -1.0 : 1.0));
            }
        }
    }
    SECTION("random 3-qubit state against the exhaustive sum") {
        std::mt19937_64 rng(17);
        for (int trial = 0; trial < 20; ++trial) {
            const auto s = random_state(3, rng);
            const std::vector<complex_t> psi(s.amplitudes().begin(), s.amplitudes().end());
            for (std::size_t q = 0; q < 3; ++q) {
                CHECK(expectation_z(s, q) == Approx(oracle::expect_z(psi, q)).margin(1e-14));
            }
        }
    }
    SECTION("out of range") { CHECK_THROWS_AS(expectation_z(Statevector(2), 2), std::out_of_range); }
}

TEST_CASE("fidelity", "[statevector]") {
    std::mt19937_64 rng(2);
    const auto psi = random_state(3, rng);
    CHECK(fidelity(psi, psi) == Approx(1.0).epsilon(1e-14));

    Statevector zero(1);
    Statevector one(1, {0.0, 1.0});
    CHECK(fidelity(zero, one) == 0.0);

    Statevector half(1);
    apply_gate(half, GateOp::rotation(GateKind::RY, 0, TrainableAngle{0}), kPi / 2);
    CHECK(fidelity(zero, half) == Approx(0.5).epsilon(1e-14));

    CHECK_THROWS_AS(fidelity(Statevector(1), Statevector(2)), std::invalid_argument);
}

TEST_CASE("adjoint gradients", "[statevector][gradient]") {
    SECTION("single RY: d cos(t) / dt = -sin(t)") {
        CircuitTemplate c;
        c.n_qubits = 1;
        c.n_params = 1;
        c.ops = {GateOp::rotation(GateKind::RY, 0, TrainableAngle{0})};
        c.measured_qubits = {0};
        const std::vector<double> p{0.3};
        const auto j = adjoint_gradients(c, p, {});
        CHECK(j.expectations[0] == Approx(std::cos(0.3)).epsilon(1e-14));
        CHECK(std::abs(j.d_params(0, 0) + std::sin(0.3)) < 1e-10);
    }
    SECTION("no trainable parameters still yields input gradients") {
        pqc::QnnSpec spec;
        spec.pqc = {pqc::Family::Identity, 3, 1};
        const auto c = pqc::build_qnn(spec);
        REQUIRE(c.n_params == 0);
        const std::vector<double> x{0.1, 0.4, 0.8};
        const auto j = adjoint_gradients(c, {}, x);
        CHECK(j.d_params.cols == 0);
        REQUIRE(j.d_inputs.rows == 3);
        REQUIRE(j.d_inputs.cols == 3);
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t i = 0; i < 3; ++i) {
                const double expected = k == i ? -kPi * std::sin(kPi * x[i]) : 0.0;
                CHECK(j.d_inputs(k, i) == Approx(expected).margin(1e-12));
            }
        }
    }
    SECTION("every PQC family matches central differences") {
        std::mt19937_64 rng(23);
        // gradients that vanish by symmetry are compared absolutely at 1e-10
        const gradcheck::Options opts{1e-5, 1e-6, 1e-4};
        for (auto f : {pqc::Family::Circuit10, pqc::Family::Circuit19, pqc::Family::MPS,
                       pqc::Family::TTN}) {
            for (auto axis : {pqc::Axis::X, pqc::Axis::Y, pqc::Axis::Z}) {
                for (std::size_t n : {2, 4}) {
                    for (std::size_t l : {1, 3}) {
                        pqc::QnnSpec spec;
                        spec.encoding.axis = axis;
                        spec.pqc = {f, n, l};
                        const auto c = pqc::build_qnn(spec);
                        const auto p = uniform(c.n_params, rng, 0.0, 2 * kPi);
                        const auto x = uniform(c.n_inputs, rng, 0.0, 1.0);
                        const auto r = gradcheck::check_circuit(c, p, x, opts);
                        INFO(pqc::to_string(f) << " n=" << n << " L=" << l << " worst "
                                               << r.worst_error);
                        CHECK(r.passed());
                    }
                }
            }
        }
    }
    SECTION("random circuits with CRX match central differences") {
        std::mt19937_64 rng(29);
        const gradcheck::Options opts{1e-5, 1e-6, 1e-4};
        for (int trial = 0; trial < 30; ++trial) {
            auto c = random_circuit(4, 30, rng);
            c.measured_qubits = {0, 1, 2, 3};
            const auto p = uniform(c.n_params, rng, -kPi, kPi);
            CHECK(gradcheck::check_circuit(c, p, {}, opts).passed());
        }
    }
    SECTION("vector-Jacobian product equals the weighted Jacobian") {
        std::mt19937_64 rng(31);
        pqc::QnnSpec spec;
        spec.pqc = {pqc::Family::Circuit19, 4, 2};
        const auto c = pqc::build_qnn(spec);
        const auto p = uniform(c.n_params, rng, 0.0, 2 * kPi);
        const auto x = uniform(c.n_inputs, rng, 0.0, 1.0);
        const std::vector<double> w{0.3, -1.2, 0.7, 2.0};
        const auto j = adjoint_gradients(c, p, x);
        const auto v = adjoint_vjp(c, p, x, w);
        for (std::size_t i = 0; i < c.n_params; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                s += w[k] * j.d_params(k, i);
            }
            CHECK(v.d_params[i] == Approx(s).margin(1e-12));
        }
        for (std::size_t i = 0; i < c.n_inputs; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) {
                s += w[k] * j.d_inputs(k, i);
            }
            CHECK(v.d_inputs[i] == Approx(s).margin(1e-12));
        }
        CHECK_THROWS_AS(adjoint_vjp(c, p, x, std::vector<double>{1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("CircuitTemplate validation", "[statevector]") {
    CircuitTemplate c;
    c.n_qubits = 2;
    c.n_params = 2;
    c.ops = {GateOp::rotation(GateKind::RY, 0, TrainableAngle{0})};
    c.measured_qubits = {0};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument); // parameter 1 unused
    c.n_params = 1;
    CHECK_NOTHROW(c.validate());
    c.measured_qubits = {0, 0};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.measured_qubits = {};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}
