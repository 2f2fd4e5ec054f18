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
#include "qgnn/training.hpp"
#include "qgnn/error.hpp"
#include "qgnn/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>

namespace qgnn::training {

namespace {

std::size_t parse_count(const std::string &text) {
    std::size_t value = 0;
    const auto *end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::invalid_argument("not a non-negative integer: '" + text + "'");
    }
    return value;
}

std::string opt(const std::optional<double> &v) {
    return v ? fmt::format("{}", *v) : std::string("nan");
}

} // namespace

void TrainConfig::validate() const {
    QGNN_REQUIRE(learning_rate > 0.0, "learning rate must be positive");
    QGNN_REQUIRE(split_ratio > 0.0 && split_ratio < 1.0,
                 "split ratio must lie in (0, 1)");
    QGNN_REQUIRE(!seeds.empty(), "at least one seed is required");
    QGNN_REQUIRE(threshold > 0.0 && threshold < 1.0,
                 "threshold must lie in (0, 1)");
    QGNN_REQUIRE(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
                 "Adam betas must lie in [0, 1)");
    QGNN_REQUIRE(epsilon > 0.0, "Adam epsilon must be positive");
}

nlohmann::json TrainConfig::to_json() const {
    return {{"learning_rate", learning_rate}, {"epochs", epochs},
            {"seeds", seeds},                 {"split_ratio", split_ratio},
            {"split_seed", split_seed},       {"threshold", threshold},
            {"beta1", beta1},                 {"beta2", beta2},
            {"epsilon", epsilon}};
}

double bce_loss(std::span<const std::uint8_t> y, std::span<const double> e_hat) {
    QGNN_REQUIRE(!y.empty(), "loss of an empty edge set");
    QGNN_REQUIRE(y.size() == e_hat.size(), "label/prediction size mismatch");
    double acc = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double p = std::clamp(e_hat[k], kClampEps, 1.0 - kClampEps);
        acc += y[k] ? std::log(p) : std::log1p(-p);
    }
    return -acc / static_cast<double>(y.size());
}

std::vector<double> bce_grad(std::span<const std::uint8_t> y,
                             std::span<const double> e_hat) {
    QGNN_REQUIRE(!y.empty(), "loss of an empty edge set");
    QGNN_REQUIRE(y.size() == e_hat.size(), "label/prediction size mismatch");
    const double n = static_cast<double>(y.size());
    std::vector<double> g(y.size(), 0.0);
    for (std::size_t k = 0; k < y.size(); ++k) {
        const double p = e_hat[k];
        if (p < kClampEps || p > 1.0 - kClampEps) {
            continue;
        }
        g[k] = (y[k] ? -1.0 / p : 1.0 / (1.0 - p)) / n;
    }
    return g;
}

Adam::Adam(std::size_t n, const TrainConfig &cfg)
    : lr_{cfg.learning_rate}, beta1_{cfg.beta1}, beta2_{cfg.beta2},
      eps_{cfg.epsilon}, m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grads) {
    QGNN_REQUIRE(params.size() == m_.size() && grads.size() == m_.size(),
                 "Adam state size mismatch");
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw NumericalError(
                fmt::format("non-finite gradient at parameter {} (step {})", i,
                            t_ + 1));
        }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
        m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grads[i];
        v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grads[i] * grads[i];
        const double m_hat = m_[i] / c1;
        const double v_hat = v_[i] / c2;
        params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
    }
}

std::optional<double> roc_auc(std::span<const double> scores,
                              std::span<const std::uint8_t> labels) {
    QGNN_REQUIRE(scores.size() == labels.size(), "score/label size mismatch");
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] > scores[b];
    });
    const auto n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), 1));
    const double n_neg = static_cast<double>(labels.size()) - n_pos;
    if (n_pos == 0.0 || n_neg == 0.0) {
        return std::nullopt;
    }
    // walk thresholds from high to low; ties move the curve diagonally
    double tp = 0.0;
    double fp = 0.0;
    double area = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        double dtp = 0.0;
        double dfp = 0.0;
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) {
            (labels[order[i]] ? dtp : dfp) += 1.0;
        }
        area += dfp * (tp + dtp / 2.0);
        tp += dtp;
        fp += dfp;
    }
    return area / (n_pos * n_neg);
}

Metrics score_metrics(std::span<const double> scores,
                      std::span<const std::uint8_t> labels, double threshold) {
    QGNN_REQUIRE(scores.size() == labels.size(), "score/label size mismatch");
    Metrics m;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        const bool pred = scores[k] > threshold;
        if (pred) {
            (labels[k] ? tp : fp) += 1;
        } else {
            (labels[k] ? fn : tn) += 1;
        }
    }
    if (!scores.empty()) {
        m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(scores.size());
    }
    if (tp + fp > 0) {
        m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    }
    if (tp + fn > 0) {
        m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    }
    m.auc = roc_auc(scores, labels);
    if (!scores.empty()) {
        m.loss = bce_loss(labels, scores);
    }
    return m;
}

Metrics evaluate(const model::Model &model, const model::ModelParams &params,
                 std::span<const graph::HitGraph> graphs, double threshold,
                 std::vector<std::vector<double>> *scores) {
    std::vector<double> all_scores;
    std::vector<std::uint8_t> all_labels;
    double loss_sum = 0.0;
    std::size_t n_graphs = 0;
    if (scores) {
        scores->clear();
    }
    for (const auto &g : graphs) {
        if (g.n_edges() == 0) {
            if (scores) {
                scores->emplace_back();
            }
            continue;
        }
        auto e = model.forward(g, params);
        loss_sum += bce_loss(g.y, e);
        ++n_graphs;
        all_scores.insert(all_scores.end(), e.begin(), e.end());
        all_labels.insert(all_labels.end(), g.y.begin(), g.y.end());
        if (scores) {
            scores->push_back(std::move(e));
        }
    }
    QGNN_REQUIRE(n_graphs > 0, "evaluation set has no edges");
    Metrics m = score_metrics(all_scores, all_labels, threshold);
    m.loss = loss_sum / static_cast<double>(n_graphs);
    return m;
}

Split split_dataset(std::size_t n, double ratio, std::uint64_t seed) {
    QGNN_REQUIRE(n >= 2, "need at least two graphs to split");
    QGNN_REQUIRE(ratio > 0.0 && ratio < 1.0, "split ratio must lie in (0, 1)");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    auto n_train = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);
    Split s;
    s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    s.valid.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.valid.begin(), s.valid.end());
    return s;
}

TrainRecord train_one(const model::Model &model,
                      std::span<const graph::HitGraph> graphs,
                      const Split &split, const TrainConfig &cfg,
                      std::uint64_t seed) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<graph::HitGraph> train_set;
    std::vector<graph::HitGraph> valid_set;
    for (auto i : split.train) {
        train_set.push_back(graphs[i]);
    }
    for (auto i : split.valid) {
        valid_set.push_back(graphs[i]);
    }

    TrainRecord rec;
    rec.seed = seed;
    model::ModelParams params = model.init(seed);
    std::vector<double> flat = params.flatten();
    Adam adam(flat.size(), cfg);

    EpochRecord initial{0, std::numeric_limits<double>::quiet_NaN(),
                        evaluate(model, params, train_set, cfg.threshold),
                        evaluate(model, params, valid_set, cfg.threshold)};
    rec.initial_valid_loss = initial.valid.loss;
    rec.history.push_back(initial);
    rec.best_valid_loss = initial.valid.loss;
    rec.best_epoch = 0;
    rec.best_params = params;

    std::mt19937_64 order_rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), order_rng);
        double running = 0.0;
        std::size_t steps = 0;
        for (auto gi : order) {
            const auto &g = train_set[gi];
            if (g.n_edges() == 0) {
                continue;
            }
            const auto tape = model.forward_tape(g, params);
            running += bce_loss(g.y, tape.output());
            const auto upstream = bce_grad(g.y, tape.output());
            const auto grad = model.backward(tape, g, params, upstream);
            adam.step(flat, grad.flatten());
            params.assign(flat);
            ++steps;
        }
        EpochRecord er{epoch,
                       steps ? running / static_cast<double>(steps)
                             : std::numeric_limits<double>::quiet_NaN(),
                       evaluate(model, params, train_set, cfg.threshold),
                       evaluate(model, params, valid_set, cfg.threshold)};
        if (!std::isfinite(er.valid.loss)) {
            throw NumericalError(fmt::format("non-finite validation loss at epoch {}",
                                             epoch));
        }
        if (er.valid.loss < rec.best_valid_loss) {
            rec.best_valid_loss = er.valid.loss;
            rec.best_epoch = epoch;
            rec.best_params = params;
        }
        rec.history.push_back(er);
    }
    rec.wall_seconds = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - start)
                           .count();
    return rec;
}

std::vector<TrainRecord> train(std::span<const graph::HitGraph> graphs,
                               const model::ModelConfig &model_cfg,
                               const TrainConfig &cfg, std::size_t workers) {
    cfg.validate();
    QGNN_REQUIRE(graphs.size() >= 2, "training needs at least two graphs");
    const model::Model model(model_cfg);
    const auto split = split_dataset(graphs.size(), cfg.split_ratio, cfg.split_seed);
    std::vector<TrainRecord> out(cfg.seeds.size());
    parallel_for(cfg.seeds.size(), workers, [&](std::size_t i) {
        out[i] = train_one(model, graphs, split, cfg, cfg.seeds[i]);
    });
    return out;
}

MeanStd mean_std(std::span<const double> values) {
    QGNN_REQUIRE(!values.empty(), "mean of no values");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() == 1) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double v : values) {
        ss += (v - mean) * (v - mean);
    }
    return {mean, std::sqrt(ss / (n - 1.0))};
}

MeanStd best_loss_stats(std::span<const TrainRecord> records) {
    std::vector<double> best;
    for (const auto &r : records) {
        best.push_back(r.best_valid_loss);
    }
    return mean_std(best);
}

void write_history_csv(const TrainRecord &record,
                       const std::filesystem::path &path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << "epoch,split,loss,accuracy,precision,recall,auc\n";
    for (const auto &er : record.history) {
        for (const auto &[name, m] :
             {std::pair{"train", &er.train}, std::pair{"valid", &er.valid}}) {
            out << fmt::format("{},{},{},{},{},{},{}\n", er.epoch, name, m->loss,
                               m->accuracy, opt(m->precision), opt(m->recall),
                               opt(m->auc));
        }
    }
}

SweepAxis parse_sweep_axis(std::string_view text) {
    if (text == "axis") {
        return SweepAxis::EmbeddingAxis;
    }
    if (text == "n_layers") {
        return SweepAxis::NLayers;
    }
    if (text == "n_iterations") {
        return SweepAxis::NIterations;
    }
    if (text == "hidden_dim") {
        return SweepAxis::HiddenDim;
    }
    throw std::invalid_argument("unknown sweep axis '" + std::string(text) +
                                "' (axis, n_layers, n_iterations, hidden_dim)");
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::EmbeddingAxis:
        return "axis";
    case SweepAxis::NLayers:
        return "n_layers";
    case SweepAxis::NIterations:
        return "n_iterations";
    case SweepAxis::HiddenDim:
        return "hidden_dim";
    }
    return "?";
}

std::vector<SweepPoint> sweep(std::span<const graph::HitGraph> graphs,
                              const model::ModelConfig &base, SweepAxis axis,
                              std::span<const std::string> values,
                              const TrainConfig &cfg, std::size_t workers) {
    QGNN_REQUIRE(!values.empty(), "sweep needs at least one grid value");
    std::vector<SweepPoint> points;
    for (const auto &value : values) {
        model::ModelConfig mc = base;
        switch (axis) {
        case SweepAxis::EmbeddingAxis:
            mc.axis = pqc::parse_axis(value);
            break;
        case SweepAxis::NLayers:
            mc.n_layers = parse_count(value);
            break;
        case SweepAxis::NIterations:
            mc.n_iterations = parse_count(value);
            break;
        case SweepAxis::HiddenDim:
            mc.hidden_dim = parse_count(value);
            mc.n_qubits = mc.hidden_dim;
            break;
        }
        mc.validate();
        SweepPoint pt;
        pt.model = mc;
        const auto records = train(graphs, mc, cfg, workers);
        for (const auto &r : records) {
            pt.per_seed.push_back(r.best_valid_loss);
        }
        pt.best_loss = mean_std(pt.per_seed);
        points.push_back(std::move(pt));
    }
    return points;
}

void write_sweep_csv(std::span<const SweepPoint> points,
                     const std::filesystem::path &path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << "N_D,N_Q,N_I,N_L,axis,mode,preset,mean_best_loss,std,n_seeds\n";
    for (const auto &p : points) {
        const auto &m = p.model;
        out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", m.hidden_dim,
                           m.n_qubits, m.n_iterations, m.n_layers,
                           pqc::to_string(m.axis), model::to_string(m.mode),
                           m.preset_label(), p.best_loss.mean, p.best_loss.std,
                           p.per_seed.size());
    }
}

} // namespace qgnn::training
