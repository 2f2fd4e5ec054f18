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
#include "qgnn/graph.hpp"
#include "qgnn/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numbers>
#include <unordered_map>

namespace qgnn::graph {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'Q', 'G', 'N', 'N', 'G', 'R', 'F', '1'};
constexpr std::uint32_t kVersion = 1;

template <typename T> void put(std::ostream &out, T value) {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(buf, buf + sizeof(T));
    }
    out.write(buf, sizeof(T));
}

template <typename T> T take(std::istream &in, const fs::path &path) {
    char buf[sizeof(T)];
    if (!in.read(buf, sizeof(T))) {
        throw DataError(path.string() + ": truncated graph file");
    }
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(buf, buf + sizeof(T));
    }
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

double json_threshold(const nlohmann::json &j) {
    if (j.is_null()) {
        return std::numeric_limits<double>::infinity();
    }
    return j.get<double>();
}

nlohmann::json threshold_json(double v) {
    if (std::isinf(v)) {
        return nullptr;
    }
    return v;
}

fs::path sidecar_path(const fs::path &path) {
    auto p = path;
    p.replace_extension(".json");
    return p;
}

} // namespace

// ---------------------------------------------------------------------------

void CutConfig::validate() const {
    QGNN_REQUIRE(pt_min >= 0.0, "pt_min must be non-negative");
    QGNN_REQUIRE(eta_max > 0.0, "eta_max must be positive");
    QGNN_REQUIRE(dphi_dr_max > 0.0, "dphi_dr_max must be positive");
    QGNN_REQUIRE(z0_max > 0.0, "z0_max must be positive");
    QGNN_REQUIRE(!barrel_volumes.empty(), "no barrel volumes configured");
}

CutConfig CutConfig::disabled() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    CutConfig c;
    c.pt_min = 0.0;
    c.eta_max = inf;
    c.dphi_dr_max = inf;
    c.z0_max = inf;
    return c;
}

nlohmann::json CutConfig::to_json() const {
    // JSON has no infinity; null stands for a disabled threshold
    return {{"pt_min", pt_min},
            {"eta_max", threshold_json(eta_max)},
            {"dphi_dr_max", threshold_json(dphi_dr_max)},
            {"z0_max", threshold_json(z0_max)},
            {"barrel_volumes", barrel_volumes}};
}

CutConfig CutConfig::from_json(const nlohmann::json &j) {
    CutConfig c;
    c.pt_min = j.at("pt_min").get<double>();
    c.eta_max = json_threshold(j.at("eta_max"));
    c.dphi_dr_max = json_threshold(j.at("dphi_dr_max"));
    c.z0_max = json_threshold(j.at("z0_max"));
    c.barrel_volumes = j.at("barrel_volumes").get<std::vector<int>>();
    return c;
}

std::size_t HitGraph::n_true() const {
    return static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
}

void HitGraph::validate() const {
    const std::size_t nv = n_nodes();
    if (X.cols != 3 && nv != 0) {
        throw DataError("node feature matrix must have 3 columns");
    }
    if (hit_ids.size() != nv || layer.size() != nv) {
        throw DataError("node arrays disagree in length");
    }
    if (edge_in.size() != y.size() || edge_out.size() != y.size()) {
        throw DataError("edge arrays disagree in length");
    }
    for (std::size_t k = 0; k < y.size(); ++k) {
        if (edge_in[k] >= nv || edge_out[k] >= nv) {
            throw DataError(fmt::format("edge {} references a missing node", k));
        }
        if (layer[edge_out[k]] != layer[edge_in[k]] + 1) {
            throw DataError(
                fmt::format("edge {} does not join consecutive layers", k));
        }
        if (y[k] > 1) {
            throw DataError(fmt::format("edge {} has label {}", k, int(y[k])));
        }
    }
}

double wrap_phi(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double w = std::remainder(phi, two_pi); // [-pi, pi]
    if (w <= -std::numbers::pi) {
        w += two_pi;
    }
    return w;
}

Candidates candidate_doublets(const event::Event &event, const CutConfig &cuts) {
    cuts.validate();
    const auto barrel_rank = [&](int volume) -> int {
        const auto it = std::find(cuts.barrel_volumes.begin(),
                                  cuts.barrel_volumes.end(), volume);
        return it == cuts.barrel_volumes.end()
                   ? -1
                   : static_cast<int>(it - cuts.barrel_volumes.begin());
    };

    // Layer ordinals come from every barrel hit of the event, so a layer
    // emptied by the pT cut still occupies its ordinal.
    std::map<std::pair<int, int>, int> ordinal;
    for (const auto &h : event.hits) {
        const int rank = barrel_rank(h.volume_id);
        if (rank >= 0) {
            ordinal.emplace(std::pair{rank, h.layer_id}, 0);
        }
    }
    int next = 0;
    for (auto &[key, value] : ordinal) {
        value = next++;
    }

    std::unordered_map<std::int64_t, double> particle_pt;
    for (const auto &p : event.particles) {
        particle_pt.emplace(p.particle_id, p.pt());
    }

    struct Node {
        int layer;
        std::int64_t hit_id;
        std::int64_t particle;
        double r, phi, z;
    };
    std::vector<Node> nodes;
    for (const auto &h : event.hits) {
        const int rank = barrel_rank(h.volume_id);
        if (rank < 0) {
            continue;
        }
        const auto particle = event.particle_of(h.hit_id);
        if (particle == 0) {
            continue;
        }
        const auto it = particle_pt.find(particle);
        if (it == particle_pt.end() || !(it->second > cuts.pt_min)) {
            continue;
        }
        nodes.push_back({ordinal.at({rank, h.layer_id}), h.hit_id, particle,
                         std::hypot(h.x, h.y), std::atan2(h.y, h.x), h.z});
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node &a, const Node &b) {
        return std::tie(a.layer, a.hit_id) < std::tie(b.layer, b.hit_id);
    });

    Candidates out;
    HitGraph &g = out.nodes;
    g.event_id = event.event_id;
    g.cuts = cuts;
    g.X = Matrix(nodes.size(), 3);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        g.X(i, 0) = nodes[i].r;
        g.X(i, 1) = wrap_phi(nodes[i].phi);
        g.X(i, 2) = nodes[i].z;
        g.hit_ids.push_back(nodes[i].hit_id);
        g.layer.push_back(nodes[i].layer);
    }

    // nodes are sorted by layer: [begin[l], begin[l + 1]) is layer l
    std::vector<std::size_t> begin(static_cast<std::size_t>(next) + 1,
                                   nodes.size());
    for (std::size_t i = nodes.size(); i-- > 0;) {
        begin[static_cast<std::size_t>(nodes[i].layer)] = i;
    }
    for (std::size_t l = static_cast<std::size_t>(next); l-- > 0;) {
        begin[l] = std::min(begin[l], begin[l + 1]);
    }

    for (std::size_t l = 0; l + 1 < static_cast<std::size_t>(next); ++l) {
        for (std::size_t a = begin[l]; a < begin[l + 1]; ++a) {
            for (std::size_t b = begin[l + 1]; b < begin[l + 2]; ++b) {
                Doublet d{};
                d.inner = static_cast<std::uint32_t>(a);
                d.outer = static_cast<std::uint32_t>(b);
                d.dphi = wrap_phi(nodes[b].phi - nodes[a].phi);
                d.dr = nodes[b].r - nodes[a].r;
                d.dz = nodes[b].z - nodes[a].z;
                const double theta = std::atan2(d.dr, d.dz);
                d.eta = -std::log(std::tan(theta / 2.0));
                if (d.dr > 0.0) {
                    d.dphi_dr = std::abs(d.dphi) / d.dr;
                    d.z0 = nodes[a].z - nodes[a].r * d.dz / d.dr;
                } else {
                    d.dphi_dr = std::numeric_limits<double>::quiet_NaN();
                    d.z0 = std::numeric_limits<double>::quiet_NaN();
                }
                d.is_true = nodes[a].particle == nodes[b].particle;
                d.passes = std::abs(d.eta) < cuts.eta_max &&
                           d.dphi_dr < cuts.dphi_dr_max &&
                           std::abs(d.z0) < cuts.z0_max;
                out.doublets.push_back(d);
            }
        }
    }
    return out;
}

HitGraph construct_graph(const event::Event &event, const CutConfig &cuts) {
    auto cand = candidate_doublets(event, cuts);
    HitGraph g = std::move(cand.nodes);
    for (const auto &d : cand.doublets) {
        if (!d.passes) {
            continue;
        }
        g.edge_in.push_back(d.inner);
        g.edge_out.push_back(d.outer);
        g.y.push_back(d.is_true ? 1 : 0);
    }
    return g;
}

std::optional<double> efficiency(const HitGraph &graph,
                                 const event::Event &event) {
    const auto cand = candidate_doublets(event, graph.cuts);
    const auto n_true = std::count_if(cand.doublets.begin(), cand.doublets.end(),
                                      [](const Doublet &d) { return d.is_true; });
    if (n_true == 0) {
        return std::nullopt;
    }
    return static_cast<double>(graph.n_true()) / static_cast<double>(n_true);
}

std::optional<double> purity(const HitGraph &graph) {
    if (graph.n_edges() == 0) {
        return std::nullopt;
    }
    return static_cast<double>(graph.n_true()) /
           static_cast<double>(graph.n_edges());
}

// ---------------------------------------------------------------------------
// Histograms

void Histogram1D::fill(double value, bool is_true) {
    std::size_t slot;
    if (std::isnan(value) || value < lo) {
        slot = 0;
    } else if (value >= hi) {
        slot = n_bins + 1;
    } else {
        slot = 1 + std::min(n_bins - 1,
                            static_cast<std::size_t>((value - lo) / (hi - lo) *
                                                     static_cast<double>(n_bins)));
    }
    (is_true ? true_counts : fake_counts)[slot] += 1;
}

std::size_t Histogram1D::total() const {
    std::size_t acc = 0;
    for (std::size_t i = 0; i < true_counts.size(); ++i) {
        acc += true_counts[i] + fake_counts[i];
    }
    return acc;
}

SelectionHistograms selection_histograms(const event::Event &event,
                                         const CutConfig &cuts) {
    auto make = [](std::string name, double lo, double hi, std::size_t n,
                   double threshold) {
        return Histogram1D{std::move(name), lo,  hi, n, threshold,
                           std::vector<std::size_t>(n + 2, 0),
                           std::vector<std::size_t>(n + 2, 0)};
    };
    SelectionHistograms h{make("dphi_dr", 0.0, 3e-3, 60, cuts.dphi_dr_max),
                          make("z0", -500.0, 500.0, 50, cuts.z0_max)};
    for (const auto &d : candidate_doublets(event, cuts).doublets) {
        h.dphi_dr.fill(d.dphi_dr, d.is_true);
        h.z0.fill(d.z0, d.is_true);
    }
    return h;
}

void write_histogram_csv(const Histogram1D &hist, const fs::path &path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot write " + path.string());
    }
    out << "# quantity=" << hist.quantity << '\n';
    out << "# threshold=" << fmt::format("{}", hist.threshold) << '\n';
    out << "bin,lo,hi,true,fake\n";
    const double width = (hist.hi - hist.lo) / static_cast<double>(hist.n_bins);
    for (std::size_t s = 0; s < hist.n_bins + 2; ++s) {
        std::string lo;
        std::string hi;
        if (s == 0) {
            lo = "-inf";
            hi = fmt::format("{}", hist.lo);
        } else if (s == hist.n_bins + 1) {
            lo = fmt::format("{}", hist.hi);
            hi = "inf";
        } else {
            lo = fmt::format("{}", hist.lo + width * static_cast<double>(s - 1));
            hi = fmt::format("{}", hist.lo + width * static_cast<double>(s));
        }
        out << fmt::format("{},{},{},{},{}\n", static_cast<long>(s) - 1, lo, hi,
                           hist.true_counts[s], hist.fake_counts[s]);
    }
}

// ---------------------------------------------------------------------------
// Graph files

void write_graph(const HitGraph &graph, const fs::path &path,
                 const nlohmann::json &provenance) {
    graph.validate();
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw DataError("cannot write " + path.string());
        }
        out.write(kMagic, sizeof kMagic);
        put<std::uint32_t>(out, kVersion);
        put<std::uint32_t>(out, 0);
        put<std::int64_t>(out, graph.event_id);
        put<std::uint64_t>(out, graph.n_nodes());
        put<std::uint64_t>(out, graph.n_edges());
        for (double v : graph.X.data) {
            put<double>(out, v);
        }
        for (auto v : graph.hit_ids) {
            put<std::int64_t>(out, v);
        }
        for (auto v : graph.layer) {
            put<std::int32_t>(out, v);
        }
        for (auto v : graph.edge_in) {
            put<std::uint32_t>(out, v);
        }
        for (auto v : graph.edge_out) {
            put<std::uint32_t>(out, v);
        }
        for (auto v : graph.y) {
            put<std::uint8_t>(out, v);
        }
    }
    nlohmann::json side = {
        {"format", "qgnn-graph"},
        {"version", kVersion},
        {"event_id", graph.event_id},
        {"n_nodes", graph.n_nodes()},
        {"n_edges", graph.n_edges()},
        {"n_true", graph.n_true()},
        {"cuts", graph.cuts.to_json()},
        {"layout",
         "little-endian: magic[8], u32 version, u32 reserved, i64 event_id, "
         "u64 n_nodes, u64 n_edges, f64 X[n_nodes*3] (r,phi,z), "
         "i64 hit_ids[n_nodes], i32 layer[n_nodes], u32 edge_in[n_edges], "
         "u32 edge_out[n_edges], u8 y[n_edges]"},
    };
    if (!provenance.is_null()) {
        side["provenance"] = provenance;
    }
    std::ofstream js(sidecar_path(path));
    js << side.dump(2) << '\n';
}

HitGraph read_graph(const fs::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    char magic[8];
    if (!in.read(magic, sizeof magic) ||
        !std::equal(magic, magic + 8, kMagic)) {
        throw DataError(path.string() + ": not a graph file");
    }
    const auto version = take<std::uint32_t>(in, path);
    if (version != kVersion) {
        throw DataError(fmt::format("{}: unsupported version {}", path.string(),
                                    version));
    }
    take<std::uint32_t>(in, path);
    HitGraph g;
    g.event_id = take<std::int64_t>(in, path);
    const auto nv = take<std::uint64_t>(in, path);
    const auto ne = take<std::uint64_t>(in, path);
    // guard against absurd sizes before allocating
    if (nv > (std::uint64_t{1} << 32) || ne > (std::uint64_t{1} << 32)) {
        throw DataError(path.string() + ": implausible graph size");
    }
    g.X = Matrix(nv, 3);
    for (auto &v : g.X.data) {
        v = take<double>(in, path);
    }
    g.hit_ids.resize(nv);
    for (auto &v : g.hit_ids) {
        v = take<std::int64_t>(in, path);
    }
    g.layer.resize(nv);
    for (auto &v : g.layer) {
        v = take<std::int32_t>(in, path);
    }
    g.edge_in.resize(ne);
    for (auto &v : g.edge_in) {
        v = take<std::uint32_t>(in, path);
    }
    g.edge_out.resize(ne);
    for (auto &v : g.edge_out) {
        v = take<std::uint32_t>(in, path);
    }
    g.y.resize(ne);
    for (auto &v : g.y) {
        v = take<std::uint8_t>(in, path);
    }
    const auto side = sidecar_path(path);
    if (fs::exists(side)) {
        std::ifstream js(side);
        const auto j = nlohmann::json::parse(js);
        g.cuts = CutConfig::from_json(j.at("cuts"));
    }
    g.validate();
    return g;
}

std::string graph_filename(std::int64_t event_id) {
    return fmt::format("event{:09d}.qgraph", event_id);
}

std::vector<fs::path> list_graphs(const fs::path &dir) {
    if (!fs::is_directory(dir)) {
        throw DataError("not a directory: " + dir.string());
    }
    std::vector<fs::path> out;
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".qgraph") {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace qgnn::graph
