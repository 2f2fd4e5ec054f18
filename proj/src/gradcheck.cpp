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
#include "qgnn/gradcheck.hpp"
#include "qgnn/error.hpp"
#include "qgnn/event.hpp"
#include "qgnn/parallel.hpp"
#include "qgnn/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

namespace qgnn::gradcheck {

namespace {

void record(Result &r, std::size_t index, double analytic, double numeric,
            const Options &opts) {
    const double err = relative_error(analytic, numeric, opts.floor);
    ++r.n_checked;
    if (!(err < opts.tolerance)) {
        ++r.n_failed;
    }
    if (r.n_checked == 1 || err > r.worst_error || std::isnan(err)) {
        r.worst_error = err;
        r.worst_index = index;
        r.worst_analytic = analytic;
        r.worst_numeric = numeric;
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

double relative_error(double analytic, double numeric, double floor) {
    const double scale =
        std::max({std::abs(analytic), std::abs(numeric), floor});
    return std::abs(analytic - numeric) / scale;
}

nlohmann::json Result::to_json() const {
    return {{"label", label},
            {"passed", passed()},
            {"n_checked", n_checked},
            {"n_failed", n_failed},
            {"worst_error", worst_error},
            {"worst_index", worst_index},
            {"worst_analytic", worst_analytic},
            {"worst_numeric", worst_numeric}};
}

Result check_circuit(const sim::CircuitTemplate &circuit,
                     std::span<const double> params,
                     std::span<const double> inputs, const Options &opts,
                     std::string label) {
    QGNN_REQUIRE(opts.step > 0.0, "finite-difference step must be positive");
    const auto t0 = std::chrono::steady_clock::now();
    const auto jac = sim::adjoint_gradients(circuit, params, inputs);
    const std::size_t m = circuit.measured_qubits.size();

    auto expectations = [&](std::span<const double> p, std::span<const double> x) {
        const auto state = sim::run(circuit, p, x);
        std::vector<double> out(m);
        for (std::size_t k = 0; k < m; ++k) {
            out[k] = sim::expectation_z(state, circuit.measured_qubits[k]);
        }
        return out;
    };
    auto central = [&](std::vector<double> &vec, std::size_t i, bool is_param) {
        const double saved = vec[i];
        vec[i] = saved + opts.step;
        const auto plus = is_param ? expectations(vec, inputs)
                                   : expectations(params, vec);
        vec[i] = saved - opts.step;
        const auto minus = is_param ? expectations(vec, inputs)
                                    : expectations(params, vec);
        vec[i] = saved;
        std::vector<double> d(m);
        for (std::size_t k = 0; k < m; ++k) {
            d[k] = (plus[k] - minus[k]) / (2.0 * opts.step);
        }
        return d;
    };

    Result r;
    r.label = std::move(label);
    std::vector<double> p(params.begin(), params.end());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const auto d = central(p, i, true);
        for (std::size_t k = 0; k < m; ++k) {
            record(r, k * p.size() + i, jac.d_params(k, i), d[k], opts);
        }
    }
    std::vector<double> x(inputs.begin(), inputs.end());
    const std::size_t offset = m * p.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto d = central(x, i, false);
        for (std::size_t k = 0; k < m; ++k) {
            record(r, offset + k * x.size() + i, jac.d_inputs(k, i), d[k], opts);
        }
    }
    r.seconds = seconds_since(t0);
    return r;
}

Result check_model(const model::Model &model, const model::ModelParams &params,
                   const graph::HitGraph &g, const Options &opts,
                   std::string label) {
    QGNN_REQUIRE(opts.step > 0.0, "finite-difference step must be positive");
    QGNN_REQUIRE(g.n_edges() > 0, "gradient check needs at least one edge");
    const auto t0 = std::chrono::steady_clock::now();

    const auto tape = model.forward_tape(g, params);
    const auto upstream = training::bce_grad(g.y, tape.output());
    const auto analytic = model.backward(tape, g, params, upstream).flatten();

    auto flat = params.flatten();
    model::ModelParams probe = params;
    auto loss_at = [&] {
        probe.assign(flat);
        return training::bce_loss(g.y, model.forward(g, probe));
    };

    Result r;
    r.label = std::move(label);
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const double saved = flat[i];
        flat[i] = saved + opts.step;
        const double plus = loss_at();
        flat[i] = saved - opts.step;
        const double minus = loss_at();
        flat[i] = saved;
        record(r, i, analytic[i], (plus - minus) / (2.0 * opts.step), opts);
    }
    r.seconds = seconds_since(t0);
    return r;
}

graph::HitGraph small_graph(std::size_t n_edges, std::uint64_t seed) {
    event::SyntheticConfig sc;
    sc.n_tracks = 3;
    sc.seed = seed;
    sc.phi_sector = 2.0 * std::numbers::pi;
    auto g = graph::construct_graph(event::generate_synthetic(sc),
                                    graph::CutConfig::disabled());
    QGNN_REQUIRE(n_edges >= 1 && n_edges <= g.n_edges(),
                 "requested edge count exceeds the generated graph");
    g.edge_in.resize(n_edges);
    g.edge_out.resize(n_edges);
    g.y.resize(n_edges);
    g.validate();
    return g;
}

model::ModelConfig preset_config(std::string_view preset) {
    model::ModelConfig mc;
    mc.hidden_dim = 3;
    mc.n_qubits = 3;
    mc.n_iterations = 2;
    mc.n_layers = 1;
    mc.apply_preset(preset);
    if (mc.edge_pqc == pqc::Family::TTN) {
        mc.n_qubits = 4;
    }
    mc.validate();
    return mc;
}

std::vector<Result> check_presets(std::span<const std::string> presets,
                                  std::size_t n_edges, std::uint64_t seed,
                                  const Options &opts, std::size_t workers) {
    const auto g = small_graph(n_edges, seed);
    std::vector<Result> results(presets.size());
    parallel_for(presets.size(), workers, [&](std::size_t i) {
        const model::Model m(preset_config(presets[i]));
        results[i] = check_model(m, m.init(seed), g, opts, presets[i]);
    });
    return results;
}

} // namespace qgnn::gradcheck
