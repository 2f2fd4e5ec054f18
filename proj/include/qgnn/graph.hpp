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
 * Hit-graph construction from barrel hits, doublet selection cuts,
 * efficiency/purity, selection histograms and the graph file format.
 */
#pragma once

#include "qgnn/event.hpp"
#include "qgnn/matrix.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace qgnn::graph {

struct CutConfig {
    double pt_min{1.0};         // GeV
    double eta_max{5.0};        // |eta| of the segment direction
    double dphi_dr_max{6e-4};   // rad / mm
    double z0_max{100.0};       // mm
    std::vector<int> barrel_volumes{8, 13, 17};

    void validate() const;
    /// Every threshold at +infinity; the pT cut is kept at 0.
    static CutConfig disabled();

    nlohmann::json to_json() const;
    static CutConfig from_json(const nlohmann::json &j);
};

/**
 * Sparse hit graph. Edge k connects edge_in[k] (inner layer) to edge_out[k]
 * (next layer outwards); these are the column supports of the incidence
 * matrices R_i and R_o.
 */
struct HitGraph {
    std::int64_t event_id{0};
    /// N_V x 3: r [mm], phi [rad, (-pi, pi]], z [mm]
    Matrix X;
    std::vector<std::int64_t> hit_ids;
    std::vector<std::int32_t> layer;
    std::vector<std::uint32_t> edge_in;
    std::vector<std::uint32_t> edge_out;
    std::vector<std::uint8_t> y;
    CutConfig cuts;

    [[nodiscard]] std::size_t n_nodes() const { return X.rows; }
    [[nodiscard]] std::size_t n_edges() const { return y.size(); }
    [[nodiscard]] std::size_t n_true() const;

    /// Throws DataError on inconsistent sizes, indices or layer ordering.
    void validate() const;
};

/// A pair of selected hits on consecutive layers, before any cut.
struct Doublet {
    std::uint32_t inner;
    std::uint32_t outer;
    double dphi;
    double dr;
    double dz;
    double eta;
    double dphi_dr; // |dphi| / dr
    double z0;
    bool is_true;
    bool passes;
};

/// Wraps into (-pi, pi].
double wrap_phi(double phi);

/// Selected nodes (barrel, pT-passing, non-noise) with no edges, plus every
/// consecutive-layer doublet among them with its cut outcome.
struct Candidates {
    HitGraph nodes;
    std::vector<Doublet> doublets;
};
Candidates candidate_doublets(const event::Event &event, const CutConfig &cuts);

HitGraph construct_graph(const event::Event &event, const CutConfig &cuts);

/// Selected true edges over true consecutive-layer doublets before cuts.
std::optional<double> efficiency(const HitGraph &graph,
                                 const event::Event &event);
/// Selected true edges over selected edges.
std::optional<double> purity(const HitGraph &graph);

struct Histogram1D {
    std::string quantity;
    double lo;
    double hi;
    std::size_t n_bins;
    double threshold;
    /// n_bins + 2 entries: underflow, bins, overflow
    std::vector<std::size_t> true_counts;
    std::vector<std::size_t> fake_counts;

    void fill(double value, bool is_true);
    [[nodiscard]] std::size_t total() const;
};

struct SelectionHistograms {
    Histogram1D dphi_dr;
    Histogram1D z0;
};

SelectionHistograms selection_histograms(const event::Event &event,
                                         const CutConfig &cuts);
void write_histogram_csv(const Histogram1D &hist,
                         const std::filesystem::path &path);

/**
 * Binary layout (all little-endian):
 *   char[8]  magic "QGNNGRF1"
 *   u32      version (1), u32 reserved (0)
 *   i64      event_id
 *   u64      n_nodes, u64 n_edges
 *   f64      X[n_nodes * 3] row-major (r, phi, z)
 *   i64      hit_ids[n_nodes]
 *   i32      layer[n_nodes]
 *   u32      edge_in[n_edges], u32 edge_out[n_edges]
 *   u8       y[n_edges]
 * A JSON sidecar next to it (`<name>.json`) carries the cut configuration,
 * counts and provenance.
 */
void write_graph(const HitGraph &graph, const std::filesystem::path &path,
                 const nlohmann::json &provenance = {});
HitGraph read_graph(const std::filesystem::path &path);

/// `event<id, 9 digits>.qgraph`
std::string graph_filename(std::int64_t event_id);
/// Graph files in `dir`, sorted by name.
std::vector<std::filesystem::path> list_graphs(const std::filesystem::path &dir);

} // namespace qgnn::graph
