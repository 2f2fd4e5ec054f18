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
 * Expressibility (KL divergence of the sampled state-fidelity distribution
 * against the Haar law) and entanglement capability (mean Meyer-Wallach Q)
 * of parametrized circuits.
 *
 * Sampling varies only the PQC parameters, uniform in [0, 2pi). The encoding
 * stage is held at a fixed input so it contributes a constant unitary. Every
 * sample draws from its own generator seeded by (seed, stream, index), so
 * results do not depend on evaluation order.
 */
#pragma once

#include "qgnn/pqc.hpp"
#include "qgnn/statevector.hpp"

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace qgnn::descriptors {

struct DescriptorConfig {
    std::size_t n_samples{5000};
    std::size_t n_bins{75};
    std::uint64_t rng_seed{0};
    /// value fed to every encoding input while sampling
    double input_value{0.5};

    void validate() const;
};

struct DescriptorReport {
    double expressibility_E{0.0};
    /// -log10(E); +infinity when E == 0
    double expressibility_Eprime{0.0};
    double entanglement{0.0};
    /// normalized fidelity histogram over [0, 1]
    std::vector<double> histogram;
};

/// Generator for sample `index` of logical stream `stream`.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream,
                           std::uint64_t index);

/// Normalized complex-Gaussian vector.
sim::Statevector haar_sample(std::size_t n_qubits, std::mt19937_64 &rng);

/// Bins values in [0, 1] into `n_bins` equal-width bins; the result sums to 1.
std::vector<double> histogram(std::span<const double> values, std::size_t n_bins);

/// Analytic per-bin mass of P(F) = (N - 1)(1 - F)^(N - 2), N = 2^n.
std::vector<double> haar_bin_mass(std::size_t n_qubits, std::size_t n_bins);

/// Discrete KL(p || q) in nats, with 0 log 0 := 0.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Raw fidelities of random parameter pairs.
std::vector<double> sample_fidelities(const pqc::QnnSpec &spec,
                                      const DescriptorConfig &cfg);

std::vector<double> sample_fidelity_distribution(const pqc::QnnSpec &spec,
                                                 const DescriptorConfig &cfg);
std::vector<double> sample_fidelity_distribution(const pqc::PqcSpec &spec,
                                                 const DescriptorConfig &cfg);

/// Fidelities between independent Haar-random states.
std::vector<double> haar_fidelities(std::size_t n_qubits,
                                    const DescriptorConfig &cfg);

struct Expressibility {
    double E;
    double Eprime;
};

Expressibility expressibility_from_histogram(std::span<const double> hist,
                                             std::size_t n_qubits);
Expressibility expressibility(const pqc::QnnSpec &spec,
                              const DescriptorConfig &cfg);
Expressibility expressibility(const pqc::PqcSpec &spec,
                              const DescriptorConfig &cfg);

/// Q = 2 (1 - mean_k Tr(rho_k^2)).
double meyer_wallach_q(const sim::Statevector &state);

double entanglement_capability(const pqc::QnnSpec &spec,
                               const DescriptorConfig &cfg);
double entanglement_capability(const pqc::PqcSpec &spec,
                               const DescriptorConfig &cfg);

DescriptorReport describe(const pqc::QnnSpec &spec, const DescriptorConfig &cfg);

} // namespace qgnn::descriptors
