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
#include "qgnn/error.hpp"
#include "qgnn/event.hpp"
#include "qgnn/graph.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

using namespace qgnn;
using namespace qgnn::graph;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

event::Event two_hit_event(double phi_outer) {
    event::Event ev;
    ev.event_id = 1;
    ev.particles = {{10, 0, 0, 0, 2.0, 0.0, 0.5, 1, 2}};
    const double r_in = 30.0, r_out = 70.0;
    ev.hits = {{1, r_in, 0.0, 10.0, 8, 2, 0},
               {2, r_out * std::cos(phi_outer), r_out * std::sin(phi_outer), 10.0 * r_out / r_in,
                8, 4, 0}};
    ev.truth = {{1, 10}, {2, 10}};
    return ev;
}

event::Event synthetic(std::uint64_t seed, std::size_t n_tracks = 20) {
    event::SyntheticConfig cfg;
    cfg.seed = seed;
    cfg.n_tracks = n_tracks;
    return event::generate_synthetic(cfg);
}

event::Event rotated(event::Event ev, double angle) {
    for (auto &h : ev.hits) {
        const double x = h.x, y = h.y;
        h.x = x * std::cos(angle) - y * std::sin(angle);
        h.y = x * std::sin(angle) + y * std::cos(angle);
    }
    return ev;
}

/// Edges as (inner hit, outer hit) -> label.
std::map<std::pair<std::int64_t, std::int64_t>, int> edge_set(const HitGraph &g) {
    std::map<std::pair<std::int64_t, std::int64_t>, int> out;
    for (std::size_t k = 0; k < g.n_edges(); ++k) {
        out[{g.hit_ids[g.edge_in[k]], g.hit_ids[g.edge_out[k]]}] = g.y[k];
    }
    return out;
}

} // namespace

TEST_CASE("two-hit graphs", "[graph]") {
    SECTION("collinear pair on consecutive layers is kept as a true edge") {
        const auto g = construct_graph(two_hit_event(0.0), CutConfig{});
        REQUIRE(g.n_nodes() == 2);
        REQUIRE(g.n_edges() == 1);
        CHECK(g.y[0] == 1);
        CHECK(g.hit_ids[g.edge_in[0]] == 1);
        CHECK(g.hit_ids[g.edge_out[0]] == 2);
        CHECK(g.X(0, 0) == Approx(30.0));
        CHECK(g.layer[g.edge_out[0]] == g.layer[g.edge_in[0]] + 1);
    }
    SECTION("dphi/dr = 1e-3 is rejected") {
        const auto c = candidate_doublets(two_hit_event(0.04), CutConfig{});
        REQUIRE(c.doublets.size() == 1);
        CHECK(c.doublets[0].dphi_dr == Approx(1e-3).epsilon(1e-9));
        CHECK_FALSE(c.doublets[0].passes);
        CHECK(construct_graph(two_hit_event(0.04), CutConfig{}).n_edges() == 0);
    }
    SECTION("segment geometry") {
        const auto c = candidate_doublets(two_hit_event(0.0), CutConfig{});
        const auto &d = c.doublets[0];
        CHECK(d.dr == Approx(40.0));
        CHECK(d.dz == Approx(10.0 * 70 / 30 - 10.0));
        CHECK(d.z0 == Approx(0.0).margin(1e-9));
        const double theta = std::atan2(d.dr, d.dz);
        CHECK(d.eta == Approx(-std::log(std::tan(theta / 2))));
    }
    SECTION("particles below the pT cut and noise hits are dropped") {
        auto ev = two_hit_event(0.0);
        ev.particles[0].px = 0.5;
        CHECK(construct_graph(ev, CutConfig{}).n_nodes() == 0);
        ev = two_hit_event(0.0);
        ev.truth.erase(2);
        CHECK(construct_graph(ev, CutConfig{}).n_nodes() == 1);
    }
    SECTION("hits outside the barrel volumes are dropped") {
        auto ev = two_hit_event(0.0);
        ev.hits[1].volume_id = 9;
        CHECK(construct_graph(ev, CutConfig{}).n_nodes() == 1);
    }
}

TEST_CASE("phi wrapping", "[graph]") {
    CHECK(wrap_phi(kPi) == Approx(kPi));
    CHECK(wrap_phi(-kPi) == Approx(kPi));
    CHECK(wrap_phi(3 * kPi / 2) == Approx(-kPi / 2));
    CHECK(wrap_phi(-7.0) == Approx(-7.0 + 2 * kPi));
    for (double x = -20.0; x < 20.0; x += 0.37) {
        const double w = wrap_phi(x);
        CHECK(w > -kPi);
        CHECK(w <= kPi);
        CHECK(std::remainder(w - x, 2 * kPi) == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("efficiency and purity", "[graph]") {
    SECTION("disabled cuts keep every true doublet") {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto ev = synthetic(seed);
            const auto g = construct_graph(ev, CutConfig::disabled());
            CHECK(efficiency(g, ev) == 1.0);
        }
    }
    SECTION("all-true graph has purity one") {
        const auto g = construct_graph(synthetic(1, 1), CutConfig{});
        REQUIRE(g.n_edges() > 0);
        CHECK(purity(g) == 1.0);
    }
    SECTION("undefined on empty denominators") {
        HitGraph empty;
        CHECK_FALSE(purity(empty).has_value());
        event::Event ev;
        CHECK_FALSE(efficiency(construct_graph(ev, CutConfig{}), ev).has_value());
    }
    SECTION("by hand") {
        const auto ev = synthetic(5);
        const auto c = candidate_doublets(ev, CutConfig{});
        std::size_t true_all = 0, true_kept = 0, kept = 0;
        for (const auto &d : c.doublets) {
            true_all += d.is_true;
            true_kept += d.is_true && d.passes;
            kept += d.passes;
        }
        const auto g = construct_graph(ev, CutConfig{});
        CHECK(g.n_edges() == kept);
        CHECK(*efficiency(g, ev) == Approx(double(true_kept) / true_all));
        CHECK(*purity(g) == Approx(double(true_kept) / kept));
    }
}

TEST_CASE("label soundness and layer consistency", "[graph]") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto ev = synthetic(seed);
        const auto g = construct_graph(ev, CutConfig{});
        REQUIRE_NOTHROW(g.validate());
        for (std::size_t k = 0; k < g.n_edges(); ++k) {
            const auto a = ev.particle_of(g.hit_ids[g.edge_in[k]]);
            const auto b = ev.particle_of(g.hit_ids[g.edge_out[k]]);
            REQUIRE(g.y[k] == (a == b && a != 0));
            REQUIRE(g.layer[g.edge_out[k]] == g.layer[g.edge_in[k]] + 1);
        }
    }
}

TEST_CASE("tightening a cut", "[graph]") {
    const CutConfig base;
    std::vector<CutConfig> tighter(4, base);
    tighter[0].pt_min = 2.0;
    tighter[1].eta_max = 0.5;
    tighter[2].dphi_dr_max = 3e-4;
    tighter[3].z0_max = 50.0;
    std::vector<double> purity_base, purity_tight(4, 0.0);
    double mean_base = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto ev = synthetic(seed);
        const auto g = construct_graph(ev, base);
        REQUIRE(g.n_edges() > g.n_true()); // at least one fake
        mean_base += *purity(g);
        const auto edges = edge_set(g);
        for (std::size_t i = 0; i < 4; ++i) {
            const auto t = construct_graph(ev, tighter[i]);
            CHECK(t.n_edges() <= g.n_edges());
            for (const auto &[e, y] : edge_set(t)) {
                CHECK(edges.count(e) == 1);
            }
            purity_tight[i] += purity(t).value_or(1.0);
        }
    }
    for (std::size_t i = 0; i < 4; ++i) {
        INFO("cut " << i);
        CHECK(purity_tight[i] >= mean_base);
    }
}

TEST_CASE("rotation invariance across the phi seam", "[graph]") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        // centre the sector on the seam, then turn it by 0.3 rad
        const auto at_seam = rotated(synthetic(seed), kPi);
        const auto turned = rotated(at_seam, 0.3);
        const auto a = construct_graph(at_seam, CutConfig{});
        const auto b = construct_graph(turned, CutConfig{});
        CHECK(edge_set(a) == edge_set(b));
        CHECK(a.n_nodes() == b.n_nodes());
    }
}

TEST_CASE("selection histograms", "[graph]") {
    SECTION("totals equal the candidate count") {
        const auto ev = synthetic(3);
        const CutConfig cuts;
        const auto h = selection_histograms(ev, cuts);
        const auto c = candidate_doublets(ev, cuts);
        CHECK(h.dphi_dr.total() == c.doublets.size());
        CHECK(h.z0.total() == c.doublets.size());
        CHECK(h.dphi_dr.threshold == cuts.dphi_dr_max);
        CHECK(h.z0.threshold == cuts.z0_max);
        CHECK(h.dphi_dr.true_counts.size() == h.dphi_dr.n_bins + 2);
    }
    SECTION("an all-true event fills no fake bins") {
        const auto h = selection_histograms(synthetic(2, 1), CutConfig{});
        for (auto n : h.dphi_dr.fake_counts) {
            CHECK(n == 0);
        }
        for (auto n : h.z0.fake_counts) {
            CHECK(n == 0);
        }
    }
}

TEST_CASE("graph files", "[graph]") {
    const auto dir = fs::temp_directory_path() / "qgnn_test_graph";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto g = construct_graph(synthetic(8), CutConfig{});
    const auto path = dir / graph_filename(g.event_id);
    write_graph(g, path, {{"note", "test"}});
    const auto r = read_graph(path);
    CHECK(r.event_id == g.event_id);
    CHECK(r.X.data == g.X.data);
    CHECK(r.hit_ids == g.hit_ids);
    CHECK(r.layer == g.layer);
    CHECK(r.edge_in == g.edge_in);
    CHECK(r.edge_out == g.edge_out);
    CHECK(r.y == g.y);
    CHECK(r.cuts.to_json() == g.cuts.to_json());
    CHECK(list_graphs(dir) == std::vector<fs::path>{path});

    SECTION("disabled cuts survive the sidecar") {
        auto d = construct_graph(synthetic(8), CutConfig::disabled());
        write_graph(d, path);
        CHECK(std::isinf(read_graph(path).cuts.z0_max));
    }
    SECTION("corrupt files") {
        std::ofstream(path, std::ios::binary | std::ios::trunc) << "NOTAGRAPH";
        CHECK_THROWS_AS(read_graph(path), DataError);
    }
    SECTION("missing files") { CHECK_THROWS_AS(read_graph(dir / "nope.qgraph"), DataError); }
    fs::remove_all(dir);
}

TEST_CASE("cut configuration", "[graph]") {
    CutConfig c;
    CHECK_NOTHROW(c.validate());
    c.dphi_dr_max = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = CutConfig::disabled();
    CHECK(CutConfig::from_json(c.to_json()).to_json() == c.to_json());
    CHECK(std::isinf(CutConfig::from_json(c.to_json()).eta_max));
}
