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
// qgnn: generate -> preprocess -> train -> evaluate, plus descriptor sweeps,
// hyperparameter sweeps, gradient checks and circuit inspection.
//
// Exit codes: 0 ok, 1 usage/configuration, 2 data, 3 numerical failure.
// Failures also print one JSON error record on stderr.

#include "qgnn/config.hpp"
#include "qgnn/descriptors.hpp"
#include "qgnn/error.hpp"
#include "qgnn/event.hpp"
#include "qgnn/gradcheck.hpp"
#include "qgnn/graph.hpp"
#include "qgnn/model.hpp"
#include "qgnn/parallel.hpp"
#include "qgnn/pqc.hpp"
#include "qgnn/training.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qgnn;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumerical = 3 };

std::string opt(const std::optional<double> &v) {
    return v ? fmt::format("{}", *v) : std::string("nan");
}

std::ofstream open_out(const fs::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    return out;
}

void write_json(const fs::path &path, const json &j) {
    open_out(path) << j.dump(2) << "\n";
}

/// config.ini and manifest.json, the common part of every output directory.
void stamp(const fs::path &dir, const config::RunConfig &cfg,
           std::string_view command, json extra = json::object()) {
    fs::create_directories(dir);
    config::write_resolved(cfg, dir);
    extra["provenance"] = config::provenance(cfg, command);
    write_json(dir / "manifest.json", extra);
}

std::vector<graph::HitGraph> load_graphs(const fs::path &dir) {
    std::vector<graph::HitGraph> graphs;
    for (const auto &path : graph::list_graphs(dir)) {
        graphs.push_back(graph::read_graph(path));
    }
    if (graphs.empty()) {
        throw DataError("no graph files in " + dir.string());
    }
    return graphs;
}

int cmd_generate(const config::RunConfig &cfg) {
    const auto &gen = cfg.generate;
    const fs::path dir = cfg.paths.events_dir;
    fs::create_directories(dir);
    std::vector<std::int64_t> ids(gen.n_events);
    parallel_for(gen.n_events, cfg.workers, [&](std::size_t i) {
        auto sc = gen.synthetic;
        sc.event_id = gen.first_event_id + static_cast<std::int64_t>(i);
        sc.seed = config::event_seed(gen.synthetic.seed, sc.event_id);
        event::write_event(event::generate_synthetic(sc),
                           event::EventFiles::in_directory(dir, sc.event_id));
        ids[i] = sc.event_id;
    });
    stamp(dir, cfg, "generate", {{"event_ids", ids}});
    fmt::print("generated {} events in {}\n", ids.size(), dir.string());
    return kOk;
}

int cmd_preprocess(const config::RunConfig &cfg) {
    const auto ids = event::list_events(cfg.paths.events_dir);
    if (ids.empty()) {
        throw DataError("no events in " + cfg.paths.events_dir.string());
    }
    const fs::path dir = cfg.paths.graphs_dir;
    fs::create_directories(dir);
    const auto prov = config::provenance(cfg, "preprocess");

    struct Row {
        std::int64_t id;
        std::size_t hits, nodes, edges, n_true;
        std::optional<double> eff, pur;
        graph::SelectionHistograms hist;
    };
    std::vector<Row> rows(ids.size());
    parallel_for(ids.size(), cfg.workers, [&](std::size_t i) {
        const auto ev = event::load_event(
            event::EventFiles::in_directory(cfg.paths.events_dir, ids[i]), ids[i]);
        const auto g = graph::construct_graph(ev, cfg.cuts);
        graph::write_graph(g, dir / graph::graph_filename(ids[i]), prov);
        rows[i] = {ids[i],          ev.hits.size(),
                   g.n_nodes(),     g.n_edges(),
                   g.n_true(),      graph::efficiency(g, ev),
                   graph::purity(g), graph::selection_histograms(ev, cfg.cuts)};
    });

    auto out = open_out(dir / "summary.csv");
    out << "event_id,n_hits,n_nodes,n_edges,n_true,efficiency,purity\n";
    for (const auto &r : rows) {
        out << fmt::format("{},{},{},{},{},{},{}\n", r.id, r.hits, r.nodes,
                           r.edges, r.n_true, opt(r.eff), opt(r.pur));
    }
    auto merged = rows.front().hist;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        for (auto [into, from] : {std::pair{&merged.dphi_dr, &rows[i].hist.dphi_dr},
                                  std::pair{&merged.z0, &rows[i].hist.z0}}) {
            for (std::size_t b = 0; b < into->true_counts.size(); ++b) {
                into->true_counts[b] += from->true_counts[b];
                into->fake_counts[b] += from->fake_counts[b];
            }
        }
    }
    graph::write_histogram_csv(merged.dphi_dr, dir / "hist_dphi_dr.csv");
    graph::write_histogram_csv(merged.z0, dir / "hist_z0.csv");
    stamp(dir, cfg, "preprocess", {{"n_graphs", rows.size()}});
    fmt::print("wrote {} graphs to {}\n", rows.size(), dir.string());
    return kOk;
}

int cmd_descriptors(const config::RunConfig &cfg) {
    struct Point {
        pqc::PqcSpec spec;
        std::uint64_t seed;
        double E{0}, Eprime{0}, ent{0};
    };
    const auto &d = cfg.descriptors;
    std::vector<Point> points;
    for (auto family : d.families) {
        for (auto n : d.n_qubits) {
            // hierarchical circuits have no layer count
            const std::vector<std::size_t> layers =
                pqc::is_layered(family) ? d.n_layers : std::vector<std::size_t>{1};
            for (auto l : layers) {
                for (auto seed : d.seeds) {
                    pqc::PqcSpec spec{family, n, l};
                    spec.validate();
                    points.push_back({spec, seed});
                }
            }
        }
    }
    parallel_for(points.size(), cfg.workers, [&](std::size_t i) {
        auto sampling = d.sampling;
        sampling.rng_seed = points[i].seed;
        const auto ex = descriptors::expressibility(points[i].spec, sampling);
        points[i].E = ex.E;
        points[i].Eprime = ex.Eprime;
        points[i].ent = descriptors::entanglement_capability(points[i].spec, sampling);
    });
    const fs::path dir = cfg.paths.output_dir / "descriptors";
    fs::create_directories(dir);
    auto out = open_out(dir / "descriptors.csv");
    out << "family,n_qubits,n_layers,E,Eprime,Ent,n_samples,seed\n";
    for (const auto &p : points) {
        out << fmt::format("{},{},{},{},{},{},{},{}\n", pqc::to_string(p.spec.family),
                           p.spec.n_qubits, p.spec.n_layers, p.E, p.Eprime, p.ent,
                           d.sampling.n_samples, p.seed);
    }
    stamp(dir, cfg, "descriptors", {{"n_points", points.size()}});
    fmt::print("wrote {} descriptor rows to {}\n", points.size(),
               (dir / "descriptors.csv").string());
    return kOk;
}

int cmd_train(const config::RunConfig &cfg) {
    const auto graphs = load_graphs(cfg.paths.graphs_dir);
    const auto records = training::train(graphs, cfg.model, cfg.train, cfg.workers);
    const fs::path dir = cfg.paths.output_dir / "train";
    fs::create_directories(dir);
    const auto prov = config::provenance(cfg, "train");

    auto summary = open_out(dir / "summary.csv");
    summary << "seed,initial_valid_loss,best_valid_loss,best_epoch,best_valid_auc\n";
    json timing = json::object();
    for (const auto &r : records) {
        training::write_history_csv(r, dir / fmt::format("history_seed{}.csv", r.seed));
        model::write_checkpoint(dir / fmt::format("best_seed{}.qckpt", r.seed), cfg.model,
                                r.best_params,
                                {{"seed", r.seed},
                                 {"epoch", r.best_epoch},
                                 {"best_valid_loss", r.best_valid_loss},
                                 {"provenance", prov}});
        summary << fmt::format("{},{},{},{},{}\n", r.seed, r.initial_valid_loss,
                               r.best_valid_loss, r.best_epoch,
                               opt(r.history[r.best_epoch].valid.auc));
        timing[std::to_string(r.seed)] = r.wall_seconds;
    }
    const auto stats = training::best_loss_stats(records);
    const auto split = training::split_dataset(graphs.size(), cfg.train.split_ratio,
                                               cfg.train.split_seed);
    auto event_ids = [&](const std::vector<std::size_t> &idx) {
        std::vector<std::int64_t> ids;
        for (auto i : idx) {
            ids.push_back(graphs[i].event_id);
        }
        return ids;
    };
    stamp(dir, cfg, "train",
          {{"model", cfg.model.to_json()},
           {"train", cfg.train.to_json()},
           {"split", {{"train", event_ids(split.train)}, {"valid", event_ids(split.valid)}}},
           {"best_valid_loss", {{"mean", stats.mean}, {"std", stats.std}}}});
    // wall-clock is kept apart so the other outputs stay reproducible
    write_json(dir / "timing.json", {{"wall_seconds", timing}});
    fmt::print("best valid loss {:.6f} +- {:.6f} over {} seeds ({})\n", stats.mean,
               stats.std, records.size(), dir.string());
    return kOk;
}

int cmd_sweep(const config::RunConfig &cfg) {
    const auto graphs = load_graphs(cfg.paths.graphs_dir);
    const auto points = training::sweep(graphs, cfg.model, cfg.sweep.axis,
                                        cfg.sweep.values, cfg.train, cfg.workers);
    const fs::path dir = cfg.paths.output_dir / "sweep";
    fs::create_directories(dir);
    training::write_sweep_csv(points, dir / "sweep.csv");
    stamp(dir, cfg, "sweep", {{"axis", training::to_string(cfg.sweep.axis)}});
    for (const auto &p : points) {
        fmt::print("{}: {:.6f} +- {:.6f}\n", p.model.to_json().dump(), p.best_loss.mean,
                   p.best_loss.std);
    }
    return kOk;
}

int cmd_evaluate(const config::RunConfig &cfg, const std::string &which) {
    const auto ckpt = model::read_checkpoint(cfg.paths.checkpoint);
    const auto all = load_graphs(cfg.paths.graphs_dir);
    std::vector<graph::HitGraph> graphs;
    if (which == "all") {
        graphs = all;
    } else {
        const auto split =
            training::split_dataset(all.size(), cfg.train.split_ratio, cfg.train.split_seed);
        for (auto i : which == "train" ? split.train : split.valid) {
            graphs.push_back(all[i]);
        }
    }
    const model::Model m(ckpt.config);
    std::vector<std::vector<double>> scores;
    const auto metrics =
        training::evaluate(m, ckpt.params, graphs, cfg.train.threshold, &scores);

    const fs::path dir = cfg.paths.output_dir / "eval";
    fs::create_directories(dir);
    std::size_t n_edges = 0;
    auto sc = open_out(dir / "scores.csv");
    sc << "event_id,edge,inner_hit,outer_hit,y,score\n";
    for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
        const auto &g = graphs[gi];
        for (std::size_t k = 0; k < g.n_edges(); ++k) {
            sc << fmt::format("{},{},{},{},{},{}\n", g.event_id, k,
                              g.hit_ids[g.edge_in[k]], g.hit_ids[g.edge_out[k]],
                              int(g.y[k]), scores[gi][k]);
        }
        n_edges += g.n_edges();
    }
    auto mc = open_out(dir / "metrics.csv");
    mc << "split,n_graphs,n_edges,loss,accuracy,precision,recall,auc\n";
    mc << fmt::format("{},{},{},{},{},{},{},{}\n", which, graphs.size(), n_edges,
                      metrics.loss, metrics.accuracy, opt(metrics.precision),
                      opt(metrics.recall), opt(metrics.auc));
    stamp(dir, cfg, "evaluate",
          {{"checkpoint", cfg.paths.checkpoint.string()}, {"checkpoint_header", ckpt.header}});
    fmt::print("{} graphs: loss {:.6f} accuracy {:.4f} auc {}\n", graphs.size(),
               metrics.loss, metrics.accuracy, opt(metrics.auc));
    return kOk;
}

int cmd_gradcheck(const config::RunConfig &cfg) {
    const auto &gc = cfg.gradcheck;
    const auto results = gradcheck::check_presets(gc.presets, gc.n_edges, gc.seed,
                                                  gc.options, cfg.workers);
    json report = json::array();
    bool ok = true;
    for (const auto &r : results) {
        fmt::print("[{}] {} params={} worst_rel={:.3g} (analytic {:.6g}, numeric {:.6g})\n",
                   r.passed() ? "PASS" : "FAIL", r.label, r.n_checked, r.worst_error,
                   r.worst_analytic, r.worst_numeric);
        report.push_back(r.to_json());
        ok = ok && r.passed();
    }
    const fs::path dir = cfg.paths.output_dir / "gradcheck";
    fs::create_directories(dir);
    stamp(dir, cfg, "gradcheck", {{"results", report}});
    return ok ? kOk : kNumerical;
}

int cmd_inspect(const config::RunConfig &cfg, const std::string &family,
                std::size_t n_qubits, std::size_t n_layers) {
    json out;
    if (!family.empty()) {
        pqc::QnnSpec spec;
        spec.encoding.axis = cfg.model.axis;
        spec.pqc = {pqc::parse_family(family), n_qubits, n_layers};
        out = pqc::to_json(pqc::build_qnn(spec));
    } else if (cfg.model.mode == model::Mode::Classical) {
        throw std::invalid_argument("classical models contain no circuits");
    } else {
        const model::Model m(cfg.model);
        out = {{"edge", pqc::to_json(m.edge_circuit())},
               {"node", pqc::to_json(m.node_circuit())}};
    }
    std::cout << out.dump(2) << "\n";
    return kOk;
}

int fail(std::string_view command, std::string_view kind, const std::string &message,
         int code) {
    std::cerr << json{{"error",
                       {{"command", command},
                        {"kind", kind},
                        {"message", message},
                        {"exit_code", code}}}}
                     .dump()
              << "\n";
    return code;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hybrid quantum-classical graph neural network for track segments"};
    app.set_version_flag("--version", std::string(config::kToolVersion));
    std::string config_path;
    std::vector<std::string> overrides;
    std::size_t workers = 1;
    app.add_option("-c,--config", config_path, "INI configuration file");
    app.add_option("-s,--set", overrides, "Override one key: section.key=value")
        ->allow_extra_args(false);
    app.add_option("-w,--workers", workers, "Worker threads")
        ->check(CLI::PositiveNumber);
    app.require_subcommand(1);

    app.add_subcommand("generate", "Write synthetic TrackML-style events");
    app.add_subcommand("preprocess", "Build hit graphs, summary and histograms");
    app.add_subcommand("descriptors", "Expressibility and entanglement sweep");
    app.add_subcommand("train", "Train every seed, keep the best checkpoints");
    app.add_subcommand("sweep", "Train a grid of model configurations");
    auto *evaluate = app.add_subcommand("evaluate", "Score graphs with a checkpoint");
    std::string checkpoint;
    std::string split = "all";
    evaluate->add_option("--checkpoint", checkpoint, "Overrides paths.checkpoint");
    evaluate->add_option("--split", split, "Graphs to score")
        ->check(CLI::IsMember({"all", "train", "valid"}));
    app.add_subcommand("gradcheck", "Finite-difference check of all presets");
    auto *inspect = app.add_subcommand("inspect-circuit", "Print circuit templates as JSON");
    std::string family;
    std::size_t n_qubits = 4;
    std::size_t n_layers = 1;
    inspect->add_option("--family", family, "Single circuit instead of the model's");
    inspect->add_option("--qubits", n_qubits, "Qubits for --family");
    inspect->add_option("--layers", n_layers, "Layers for --family");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    if (!checkpoint.empty()) {
        overrides.push_back("paths.checkpoint=" + checkpoint);
    }

    try {
        auto cfg = config::load(config_path, overrides);
        cfg.workers = workers;
        if (command == "generate") {
            return cmd_generate(cfg);
        }
        if (command == "preprocess") {
            return cmd_preprocess(cfg);
        }
        if (command == "descriptors") {
            return cmd_descriptors(cfg);
        }
        if (command == "train") {
            return cmd_train(cfg);
        }
        if (command == "sweep") {
            return cmd_sweep(cfg);
        }
        if (command == "evaluate") {
            return cmd_evaluate(cfg, split);
        }
        if (command == "gradcheck") {
            return cmd_gradcheck(cfg);
        }
        return cmd_inspect(cfg, family, n_qubits, n_layers);
    } catch (const NumericalError &e) {
        return fail(command, "numerical", e.what(), kNumerical);
    } catch (const DataError &e) {
        return fail(command, "data", e.what(), kData);
    } catch (const std::invalid_argument &e) {
        return fail(command, "usage", e.what(), kUsage);
    } catch (const std::exception &e) {
        return fail(command, "data", e.what(), kData);
    }
}
