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
#include "qgnn/model.hpp"
#include "qgnn/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

namespace qgnn::model {

namespace {

constexpr char kCkptMagic[8] = {'Q', 'G', 'N', 'N', 'C', 'K', 'P', 'T'};

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](char c) { return c == '_' || c == ' ' || c == '-'; }),
              out.end());
    return out;
}

void glorot(DenseLayer &d, std::mt19937_64 &rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(d.in + d.out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto &w : d.weights) {
        w = dist(rng);
    }
    std::fill(d.bias.begin(), d.bias.end(), 0.0);
}

void add_into(std::vector<double> &acc, std::span<const double> x) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        acc[i] += x[i];
    }
}

template <typename T> void put(std::ostream &out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(buf, buf + sizeof(T));
    }
    out.write(buf, sizeof(T));
}

template <typename T> T take(std::istream &in) {
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) {
        throw DataError("truncated checkpoint");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(buf, buf + sizeof(T));
    }
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

} // namespace

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double ez = std::exp(z);
    return ez / (1.0 + ez);
}

std::string_view to_string(Mode mode) {
    return mode == Mode::Hybrid ? "hybrid" : "classical";
}

Mode parse_mode(std::string_view text) {
    const auto s = lower(text);
    if (s == "hybrid") {
        return Mode::Hybrid;
    }
    if (s == "classical") {
        return Mode::Classical;
    }
    throw std::invalid_argument("unknown model mode '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------
// ModelConfig

void ModelConfig::validate() const {
    QGNN_REQUIRE(hidden_dim >= 1, "hidden_dim must be >= 1");
    QGNN_REQUIRE(n_qubits >= 1 && n_qubits <= sim::kMaxQubits,
                 "n_qubits must be in 1..20");
    QGNN_REQUIRE(n_layers >= 1, "n_layers must be >= 1");
    QGNN_REQUIRE(pqc::is_layered(node_pqc),
                 "the node network needs a layered circuit (all qubits measured)");
    QGNN_REQUIRE(scaling.r > 0 && scaling.phi > 0 && scaling.z > 0,
                 "input scaling constants must be positive");
    if (mode == Mode::Hybrid) {
        edge_qnn().pqc.validate();
        node_qnn().pqc.validate();
    }
}

void ModelConfig::apply_preset(std::string_view label) {
    const auto s = lower(label);
    if (s == "circuit10") {
        edge_pqc = node_pqc = pqc::Family::Circuit10;
    } else if (s == "circuit19") {
        edge_pqc = node_pqc = pqc::Family::Circuit19;
    } else if (s == "mps10") {
        edge_pqc = pqc::Family::MPS;
        node_pqc = pqc::Family::Circuit10;
    } else if (s == "ttn10") {
        edge_pqc = pqc::Family::TTN;
        node_pqc = pqc::Family::Circuit10;
    } else {
        throw std::invalid_argument("unknown preset '" + std::string(label) + "'");
    }
}

std::string ModelConfig::preset_label() const {
    using pqc::Family;
    if (edge_pqc == node_pqc &&
        (edge_pqc == Family::Circuit10 || edge_pqc == Family::Circuit19)) {
        return std::string(pqc::to_string(edge_pqc));
    }
    if (node_pqc == Family::Circuit10 && edge_pqc == Family::MPS) {
        return "MPS-10";
    }
    if (node_pqc == Family::Circuit10 && edge_pqc == Family::TTN) {
        return "TTN-10";
    }
    return std::string(pqc::to_string(edge_pqc)) + "/" +
           std::string(pqc::to_string(node_pqc));
}

pqc::QnnSpec ModelConfig::edge_qnn() const {
    return {{axis, std::numbers::pi}, {edge_pqc, n_qubits, n_layers}};
}

pqc::QnnSpec ModelConfig::node_qnn() const {
    return {{axis, std::numbers::pi}, {node_pqc, n_qubits, n_layers}};
}

nlohmann::json ModelConfig::to_json() const {
    return {{"hidden_dim", hidden_dim},
            {"n_qubits", n_qubits},
            {"n_iterations", n_iterations},
            {"n_layers", n_layers},
            {"edge_pqc", pqc::to_string(edge_pqc)},
            {"node_pqc", pqc::to_string(node_pqc)},
            {"axis", pqc::to_string(axis)},
            {"mode", to_string(mode)},
            {"scaling", {{"r", scaling.r}, {"phi", scaling.phi}, {"z", scaling.z}}}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json &j) {
    ModelConfig c;
    c.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    c.n_qubits = j.at("n_qubits").get<std::size_t>();
    c.n_iterations = j.at("n_iterations").get<std::size_t>();
    c.n_layers = j.at("n_layers").get<std::size_t>();
    c.edge_pqc = pqc::parse_family(j.at("edge_pqc").get<std::string>());
    c.node_pqc = pqc::parse_family(j.at("node_pqc").get<std::string>());
    c.axis = pqc::parse_axis(j.at("axis").get<std::string>());
    c.mode = parse_mode(j.at("mode").get<std::string>());
    const auto &s = j.at("scaling");
    c.scaling = {s.at("r").get<double>(), s.at("phi").get<double>(),
                 s.at("z").get<double>()};
    c.validate();
    return c;
}

// ---------------------------------------------------------------------------
// DenseLayer

void DenseLayer::forward(std::span<const double> x, std::span<double> y) const {
    for (std::size_t o = 0; o < out; ++o) {
        double z = bias[o];
        const double *w = weights.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) {
            z += w[i] * x[i];
        }
        y[o] = sigmoid(z);
    }
}

void DenseLayer::backward(std::span<const double> x, std::span<const double> y,
                          std::span<const double> dy, DenseLayer &grad,
                          std::span<double> dx) const {
    std::fill(dx.begin(), dx.end(), 0.0);
    for (std::size_t o = 0; o < out; ++o) {
        const double dz = dy[o] * y[o] * (1.0 - y[o]);
        if (dz == 0.0) {
            continue;
        }
        grad.bias[o] += dz;
        const double *w = weights.data() + o * in;
        double *gw = grad.weights.data() + o * in;
        for (std::size_t i = 0; i < in; ++i) {
            gw[i] += dz * x[i];
        }
        if (!dx.empty()) {
            for (std::size_t i = 0; i < in; ++i) {
                dx[i] += dz * w[i];
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ModelParams

std::size_t ModelParams::size() const {
    std::size_t n = 0;
    for_each_block([&](const std::vector<double> &b) { n += b.size(); });
    return n;
}

std::vector<double> ModelParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(size());
    for_each_block([&](const std::vector<double> &b) {
        flat.insert(flat.end(), b.begin(), b.end());
    });
    return flat;
}

void ModelParams::assign(std::span<const double> flat) {
    QGNN_REQUIRE(flat.size() == size(), "flat parameter vector has wrong size");
    std::size_t pos = 0;
    for_each_block([&](std::vector<double> &b) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), b.size(),
                    b.begin());
        pos += b.size();
    });
}

ModelParams ModelParams::zeros_like() const {
    ModelParams z = *this;
    z.for_each_block(
        [](std::vector<double> &b) { std::fill(b.begin(), b.end(), 0.0); });
    return z;
}

// ---------------------------------------------------------------------------
// Model

Model::Model(ModelConfig cfg) : cfg_{std::move(cfg)} {
    cfg_.validate();
    if (cfg_.mode == Mode::Hybrid) {
        edge_circuit_ = pqc::build_qnn(cfg_.edge_qnn());
        node_circuit_ = pqc::build_qnn(cfg_.node_qnn());
    }
}

ModelParams Model::zeros() const {
    const std::size_t f = feature_dim();
    const std::size_t nq = cfg_.n_qubits;
    ModelParams p;
    p.input_net = DenseLayer(3, cfg_.hidden_dim);
    auto make = [&](std::size_t in, std::size_t out,
                    const sim::CircuitTemplate &circuit) {
        HybridNet h;
        h.fc1 = DenseLayer(in, nq);
        std::size_t q_out = nq;
        if (cfg_.mode == Mode::Hybrid) {
            h.qnn.assign(circuit.n_params, 0.0);
            q_out = circuit.measured_qubits.size();
        } else {
            h.inner = DenseLayer(nq, nq);
        }
        h.fc2 = DenseLayer(q_out, out);
        return h;
    };
    p.edge_net = make(2 * f, 1, edge_circuit_);
    p.node_net = make(3 * f, cfg_.hidden_dim, node_circuit_);
    return p;
}

ModelParams Model::init(std::uint64_t seed) const {
    ModelParams p = zeros();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    glorot(p.input_net, rng);
    for (auto *net : {&p.edge_net, &p.node_net}) {
        glorot(net->fc1, rng);
        for (auto &a : net->qnn) {
            a = angle(rng);
        }
        if (net->inner.out > 0) {
            glorot(net->inner, rng);
        }
        glorot(net->fc2, rng);
    }
    return p;
}

std::vector<double> Model::scale_inputs(const graph::HitGraph &g) const {
    std::vector<double> x(g.n_nodes() * 3);
    for (std::size_t j = 0; j < g.n_nodes(); ++j) {
        x[3 * j + 0] = g.X(j, 0) / cfg_.scaling.r;
        x[3 * j + 1] = g.X(j, 1) / cfg_.scaling.phi;
        x[3 * j + 2] = g.X(j, 2) / cfg_.scaling.z;
    }
    return x;
}

std::vector<double> Model::input_network(std::span<const double> x,
                                         const ModelParams &p) const {
    QGNN_REQUIRE(x.size() % 3 == 0, "input coordinates must be N_V x 3");
    const std::size_t nv = x.size() / 3;
    const std::size_t f = feature_dim();
    std::vector<double> v(nv * f);
    for (std::size_t j = 0; j < nv; ++j) {
        const auto xj = x.subspan(3 * j, 3);
        std::copy(xj.begin(), xj.end(), v.begin() + static_cast<std::ptrdiff_t>(j * f));
        p.input_net.forward(xj, std::span(v).subspan(j * f + 3, cfg_.hidden_dim));
    }
    return v;
}

void Model::hybrid_forward(const HybridNet &net,
                           const sim::CircuitTemplate &circuit,
                           std::span<const double> in, HybridCache &cache) const {
    cache.input.assign(in.begin(), in.end());
    cache.h1.resize(net.fc1.out);
    net.fc1.forward(in, cache.h1);
    if (cfg_.mode == Mode::Hybrid) {
        cache.q = pqc::qnn_forward(circuit, net.qnn, cache.h1);
    } else {
        cache.q.resize(net.inner.out);
        net.inner.forward(cache.h1, cache.q);
    }
    cache.out.resize(net.fc2.out);
    net.fc2.forward(cache.q, cache.out);
}

void Model::hybrid_backward(const HybridNet &net,
                            const sim::CircuitTemplate &circuit,
                            const HybridCache &cache,
                            std::span<const double> d_out, HybridNet &grad,
                            std::span<double> d_in) const {
    std::vector<double> dq(cache.q.size());
    net.fc2.backward(cache.q, cache.out, d_out, grad.fc2, dq);
    std::vector<double> dh1(cache.h1.size());
    if (cfg_.mode == Mode::Hybrid) {
        const auto vjp = sim::adjoint_vjp(circuit, net.qnn, cache.h1, dq);
        add_into(grad.qnn, vjp.d_params);
        dh1 = vjp.d_inputs;
    } else {
        net.inner.backward(cache.h1, cache.q, dq, grad.inner, dh1);
    }
    net.fc1.backward(cache.input, cache.h1, dh1, grad.fc1, d_in);
}

std::vector<double> Model::edge_network(std::span<const double> v,
                                        const graph::HitGraph &g,
                                        const ModelParams &p,
                                        std::vector<HybridCache> *caches) const {
    const std::size_t f = feature_dim();
    const std::size_t ne = g.n_edges();
    std::vector<double> e(ne);
    std::vector<double> in(2 * f);
    HybridCache scratch;
    if (caches) {
        caches->assign(ne, {});
    }
    for (std::size_t k = 0; k < ne; ++k) {
        const auto bo = v.subspan(g.edge_out[k] * f, f);
        const auto bi = v.subspan(g.edge_in[k] * f, f);
        std::copy(bo.begin(), bo.end(), in.begin());
        std::copy(bi.begin(), bi.end(), in.begin() + static_cast<std::ptrdiff_t>(f));
        HybridCache &c = caches ? (*caches)[k] : scratch;
        hybrid_forward(p.edge_net, edge_circuit_, in, c);
        e[k] = c.out[0];
    }
    return e;
}

std::vector<double> Model::node_network(std::span<const double> x,
                                        std::span<const double> v,
                                        std::span<const double> e,
                                        const graph::HitGraph &g,
                                        const ModelParams &p,
                                        std::vector<HybridCache> *caches) const {
    const std::size_t f = feature_dim();
    const std::size_t nv = g.n_nodes();
    // per node: [sum over edges where it is the input | ... output]
    std::vector<double> agg(nv * 2 * f, 0.0);
    for (std::size_t k = 0; k < g.n_edges(); ++k) {
        const std::size_t i = g.edge_in[k];
        const std::size_t o = g.edge_out[k];
        for (std::size_t d = 0; d < f; ++d) {
            agg[i * 2 * f + d] += e[k] * v[o * f + d];
            agg[o * 2 * f + f + d] += e[k] * v[i * f + d];
        }
    }
    std::vector<double> next(nv * f);
    std::vector<double> in(3 * f);
    HybridCache scratch;
    if (caches) {
        caches->assign(nv, {});
    }
    for (std::size_t j = 0; j < nv; ++j) {
        std::copy_n(agg.begin() + static_cast<std::ptrdiff_t>(j * 2 * f), 2 * f,
                    in.begin());
        std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(j * f), f,
                    in.begin() + static_cast<std::ptrdiff_t>(2 * f));
        HybridCache &c = caches ? (*caches)[j] : scratch;
        hybrid_forward(p.node_net, node_circuit_, in, c);
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(3 * j), 3,
                    next.begin() + static_cast<std::ptrdiff_t>(j * f));
        std::copy(c.out.begin(), c.out.end(),
                  next.begin() + static_cast<std::ptrdiff_t>(j * f + 3));
    }
    return next;
}

std::vector<double> Model::forward(const graph::HitGraph &g,
                                   const ModelParams &p) const {
    const auto x = scale_inputs(g);
    auto v = input_network(x, p);
    for (std::size_t t = 0; t < cfg_.n_iterations; ++t) {
        const auto e = edge_network(v, g, p);
        v = node_network(x, v, e, g, p);
    }
    return edge_network(v, g, p);
}

ForwardTape Model::forward_tape(const graph::HitGraph &g,
                                const ModelParams &p) const {
    ForwardTape tape;
    const std::size_t iters = cfg_.n_iterations;
    tape.x = scale_inputs(g);
    tape.v.reserve(iters + 1);
    tape.e.resize(iters + 1);
    tape.edge_caches.resize(iters + 1);
    tape.node_caches.resize(iters);
    tape.v.push_back(input_network(tape.x, p));
    for (std::size_t t = 0; t < iters; ++t) {
        tape.e[t] = edge_network(tape.v[t], g, p, &tape.edge_caches[t]);
        tape.v.push_back(
            node_network(tape.x, tape.v[t], tape.e[t], g, p, &tape.node_caches[t]));
    }
    tape.e[iters] = edge_network(tape.v[iters], g, p, &tape.edge_caches[iters]);
    return tape;
}

ModelParams Model::backward(const ForwardTape &tape, const graph::HitGraph &g,
                            const ModelParams &p,
                            std::span<const double> upstream) const {
    const std::size_t f = feature_dim();
    const std::size_t nv = g.n_nodes();
    const std::size_t ne = g.n_edges();
    const std::size_t iters = cfg_.n_iterations;
    QGNN_REQUIRE(upstream.size() == ne, "upstream gradient must have one entry per edge");

    ModelParams grad = p.zeros_like();
    std::vector<double> d_in(3 * f);

    // d(edge pass t)/dv accumulated into dv
    auto edge_backward = [&](std::size_t t, std::span<const double> de,
                             std::vector<double> &dv) {
        for (std::size_t k = 0; k < ne; ++k) {
            if (de[k] == 0.0) {
                continue;
            }
            const double d_out = de[k];
            hybrid_backward(p.edge_net, edge_circuit_, tape.edge_caches[t][k],
                            {&d_out, 1}, grad.edge_net,
                            std::span(d_in).first(2 * f));
            for (std::size_t d = 0; d < f; ++d) {
                dv[g.edge_out[k] * f + d] += d_in[d];
                dv[g.edge_in[k] * f + d] += d_in[f + d];
            }
        }
    };

    std::vector<double> dv(nv * f, 0.0);
    edge_backward(iters, upstream, dv);

    std::vector<double> d_agg(nv * 2 * f);
    for (std::size_t t = iters; t-- > 0;) {
        const auto &v = tape.v[t];
        const auto &e = tape.e[t];
        std::vector<double> dv_prev(nv * f, 0.0);
        std::vector<double> de(ne, 0.0);
        for (std::size_t j = 0; j < nv; ++j) {
            const auto d_hidden = std::span(dv).subspan(j * f + 3, cfg_.hidden_dim);
            hybrid_backward(p.node_net, node_circuit_, tape.node_caches[t][j],
                            d_hidden, grad.node_net, d_in);
            std::copy_n(d_in.begin(), 2 * f,
                        d_agg.begin() + static_cast<std::ptrdiff_t>(j * 2 * f));
            for (std::size_t d = 0; d < f; ++d) {
                dv_prev[j * f + d] += d_in[2 * f + d];
            }
        }
        for (std::size_t k = 0; k < ne; ++k) {
            const std::size_t i = g.edge_in[k];
            const std::size_t o = g.edge_out[k];
            const double *da_in = d_agg.data() + i * 2 * f;
            const double *da_out = d_agg.data() + o * 2 * f + f;
            double acc = 0.0;
            for (std::size_t d = 0; d < f; ++d) {
                acc += da_in[d] * v[o * f + d] + da_out[d] * v[i * f + d];
                dv_prev[o * f + d] += e[k] * da_in[d];
                dv_prev[i * f + d] += e[k] * da_out[d];
            }
            de[k] = acc;
        }
        edge_backward(t, de, dv_prev);
        dv = std::move(dv_prev);
    }

    const auto &v0 = tape.v[0];
    for (std::size_t j = 0; j < nv; ++j) {
        p.input_net.backward(std::span(tape.x).subspan(3 * j, 3),
                             std::span(v0).subspan(j * f + 3, cfg_.hidden_dim),
                             std::span(dv).subspan(j * f + 3, cfg_.hidden_dim),
                             grad.input_net, {});
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Checkpoints

void write_checkpoint(const std::filesystem::path &path, const ModelConfig &cfg,
                      const ModelParams &params, const nlohmann::json &header) {
    nlohmann::json h = header;
    h["model"] = cfg.to_json();
    h["n_params"] = params.size();
    const std::string text = h.dump();
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out.write(kCkptMagic, sizeof kCkptMagic);
    put<std::uint64_t>(out, text.size());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (double v : params.flatten()) {
        put<double>(out, v);
    }
}

Checkpoint read_checkpoint(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    char magic[8];
    if (!in.read(magic, sizeof magic) ||
        !std::equal(magic, magic + 8, kCkptMagic)) {
        throw DataError(path.string() + ": not a checkpoint");
    }
    const auto len = take<std::uint64_t>(in);
    if (len > (std::uint64_t{1} << 30)) {
        throw DataError(path.string() + ": implausible header length");
    }
    std::string text(len, '\0');
    if (!in.read(text.data(), static_cast<std::streamsize>(len))) {
        throw DataError(path.string() + ": truncated header");
    }
    Checkpoint ck;
    ck.header = nlohmann::json::parse(text);
    ck.config = ModelConfig::from_json(ck.header.at("model"));
    const Model model(ck.config);
    ck.params = model.zeros();
    if (ck.header.at("n_params").get<std::size_t>() != ck.params.size()) {
        throw DataError(path.string() + ": parameter count does not match config");
    }
    std::vector<double> flat(ck.params.size());
    for (auto &v : flat) {
        v = take<double>(in);
    }
    ck.params.assign(flat);
    return ck;
}

} // namespace qgnn::model
