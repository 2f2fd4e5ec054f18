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
#include "qgnn/descriptors.hpp"
#include "qgnn/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qgnn::descriptors {

namespace {

constexpr std::uint64_t kStreamFidelity = 1;
constexpr std::uint64_t kStreamEntanglement = 2;
constexpr std::uint64_t kStreamHaar = 3;

std::vector<double> random_params(std::size_t n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<double> p(n);
    for (auto &x : p) {
        x = angle(rng);
    }
    return p;
}

} // namespace

void DescriptorConfig::validate() const {
    QGNN_REQUIRE(n_samples >= 100, "descriptor sampling needs >= 100 samples");
    QGNN_REQUIRE(n_bins >= 2, "descriptor histogram needs >= 2 bins");
    QGNN_REQUIRE(input_value >= 0.0 && input_value <= 1.0,
                 "descriptor input value must lie in [0, 1]");
}

std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

sim::Statevector haar_sample(std::size_t n_qubits, std::mt19937_64 &rng) {
    QGNN_REQUIRE(n_qubits >= 1 && n_qubits <= sim::kMaxQubits,
                 "qubit count must be in 1..20");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<sim::complex_t> amps(std::size_t{1} << n_qubits);
    for (auto &a : amps) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        a = {re, im};
    }
    sim::Statevector s(n_qubits, std::move(amps));
    s.normalize();
    return s;
}

std::vector<double> histogram(std::span<const double> values,
                              std::size_t n_bins) {
    QGNN_REQUIRE(n_bins >= 1, "histogram needs bins");
    QGNN_REQUIRE(!values.empty(), "histogram of no values");
    std::vector<double> h(n_bins, 0.0);
    for (double v : values) {
        // fidelities may overshoot [0, 1] by rounding, nothing more
        QGNN_REQUIRE(v >= -1e-9 && v <= 1.0 + 1e-9, "histogram value outside [0, 1]");
        auto b = static_cast<std::size_t>(std::clamp(v, 0.0, 1.0) *
                                          static_cast<double>(n_bins));
        h[std::min(b, n_bins - 1)] += 1.0;
    }
    for (auto &x : h) {
        x /= static_cast<double>(values.size());
    }
    return h;
}

std::vector<double> haar_bin_mass(std::size_t n_qubits, std::size_t n_bins) {
    // CDF(F) = 1 - (1 - F)^(N - 1)
    const double nm1 = std::ldexp(1.0, static_cast<int>(n_qubits)) - 1.0;
    std::vector<double> q(n_bins);
    for (std::size_t b = 0; b < n_bins; ++b) {
        const double lo = static_cast<double>(b) / static_cast<double>(n_bins);
        const double hi =
            static_cast<double>(b + 1) / static_cast<double>(n_bins);
        q[b] = std::pow(1.0 - lo, nm1) - std::pow(1.0 - hi, nm1);
    }
    return q;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
    QGNN_REQUIRE(p.size() == q.size(), "KL of differently binned histograms");
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] <= 0.0) {
            continue;
        }
        if (q[i] <= 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        acc += p[i] * std::log(p[i] / q[i]);
    }
    // rounding can leave tiny negatives for identical histograms
    return std::max(acc, 0.0);
}

std::vector<double> sample_fidelities(const pqc::QnnSpec &spec,
                                      const DescriptorConfig &cfg) {
    cfg.validate();
    const auto circuit = pqc::build_qnn(spec);
    const std::vector<double> inputs(circuit.n_inputs, cfg.input_value);
    std::vector<double> out(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        auto rng = sample_rng(cfg.rng_seed, kStreamFidelity, i);
        const auto a = random_params(circuit.n_params, rng);
        const auto b = random_params(circuit.n_params, rng);
        out[i] = sim::fidelity(sim::run(circuit, a, inputs),
                               sim::run(circuit, b, inputs));
    }
    return out;
}

std::vector<double> sample_fidelity_distribution(const pqc::QnnSpec &spec,
                                                 const DescriptorConfig &cfg) {
    return histogram(sample_fidelities(spec, cfg), cfg.n_bins);
}

std::vector<double> sample_fidelity_distribution(const pqc::PqcSpec &spec,
                                                 const DescriptorConfig &cfg) {
    return sample_fidelity_distribution(pqc::QnnSpec{{}, spec}, cfg);
}

std::vector<double> haar_fidelities(std::size_t n_qubits,
                                    const DescriptorConfig &cfg) {
    cfg.validate();
    std::vector<double> out(cfg.n_samples);
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        auto rng = sample_rng(cfg.rng_seed, kStreamHaar, i);
        const auto a = haar_sample(n_qubits, rng);
        const auto b = haar_sample(n_qubits, rng);
        out[i] = sim::fidelity(a, b);
    }
    return out;
}

Expressibility expressibility_from_histogram(std::span<const double> hist,
                                             std::size_t n_qubits) {
    const auto q = haar_bin_mass(n_qubits, hist.size());
    const double e = kl_divergence(hist, q);
    const double eprime =
        e == 0.0 ? std::numeric_limits<double>::infinity() : -std::log10(e);
    return {e, eprime};
}

Expressibility expressibility(const pqc::QnnSpec &spec,
                              const DescriptorConfig &cfg) {
    return expressibility_from_histogram(sample_fidelity_distribution(spec, cfg),
                                         spec.pqc.n_qubits);
}

Expressibility expressibility(const pqc::PqcSpec &spec,
                              const DescriptorConfig &cfg) {
    return expressibility(pqc::QnnSpec{{}, spec}, cfg);
}

double meyer_wallach_q(const sim::Statevector &state) {
    const std::size_t n = state.num_qubits();
    if (n < 2) {
        throw std::invalid_argument("Meyer-Wallach Q needs at least 2 qubits");
    }
    const auto amps = state.amplitudes();
    double purity_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        // rho_k = [[p0, c], [c*, p1]], purity = p0^2 + p1^2 + 2|c|^2
        const std::size_t mask = std::size_t{1} << k;
        double p0 = 0.0;
        double p1 = 0.0;
        sim::complex_t c{0.0, 0.0};
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (i & mask) {
                continue;
            }
            const auto a = amps[i];
            const auto b = amps[i | mask];
            p0 += std::norm(a);
            p1 += std::norm(b);
            c += a * std::conj(b);
        }
        purity_sum += p0 * p0 + p1 * p1 + 2.0 * std::norm(c);
    }
    const double q = 2.0 * (1.0 - purity_sum / static_cast<double>(n));
    return std::clamp(q, 0.0, 1.0);
}

double entanglement_capability(const pqc::QnnSpec &spec,
                               const DescriptorConfig &cfg) {
    cfg.validate();
    const auto circuit = pqc::build_qnn(spec);
    const std::vector<double> inputs(circuit.n_inputs, cfg.input_value);
    double acc = 0.0;
    for (std::size_t i = 0; i < cfg.n_samples; ++i) {
        auto rng = sample_rng(cfg.rng_seed, kStreamEntanglement, i);
        const auto p = random_params(circuit.n_params, rng);
        acc += meyer_wallach_q(sim::run(circuit, p, inputs));
    }
    return acc / static_cast<double>(cfg.n_samples);
}

double entanglement_capability(const pqc::PqcSpec &spec,
                               const DescriptorConfig &cfg) {
    return entanglement_capability(pqc::QnnSpec{{}, spec}, cfg);
}

DescriptorReport describe(const pqc::QnnSpec &spec,
                          const DescriptorConfig &cfg) {
    DescriptorReport r;
    r.histogram = sample_fidelity_distribution(spec, cfg);
    const auto e = expressibility_from_histogram(r.histogram, spec.pqc.n_qubits);
    r.expressibility_E = e.E;
    r.expressibility_Eprime = e.Eprime;
    r.entanglement = entanglement_capability(spec, cfg);
    return r;
}

} // namespace qgnn::descriptors
