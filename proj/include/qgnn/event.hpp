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
 * Detector events: TrackML-format CSV ingestion and a synthetic helical-track
 * generator for a barrel-only detector.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <numbers>
#include <string>
#include <vector>

namespace qgnn::event {

struct Hit {
    std::int64_t hit_id{0};
    double x{0.0}; // mm
    double y{0.0};
    double z{0.0};
    int volume_id{0};
    int layer_id{0};
    int module_id{0};

    bool operator==(const Hit &) const = default;
};

struct Particle {
    std::int64_t particle_id{0};
    double vx{0.0}; // mm
    double vy{0.0};
    double vz{0.0};
    double px{0.0}; // GeV
    double py{0.0};
    double pz{0.0};
    int q{0};
    int nhits{0};

    [[nodiscard]] double pt() const;
    bool operator==(const Particle &) const = default;
};

struct Event {
    std::int64_t event_id{0};
    std::vector<Hit> hits;
    std::vector<Particle> particles;
    /// hit_id -> particle_id; 0 or absent means noise
    std::map<std::int64_t, std::int64_t> truth;

    /// Throws DataError on duplicate ids or dangling truth references.
    void validate() const;
    [[nodiscard]] std::int64_t particle_of(std::int64_t hit_id) const;

    bool operator==(const Event &) const = default;
};

/// The three TrackML files of one event.
struct EventFiles {
    std::filesystem::path hits;
    std::filesystem::path particles;
    std::filesystem::path truth;

    /// `<dir>/event<9-digit id>-{hits,particles,truth}.csv`
    static EventFiles in_directory(const std::filesystem::path &dir,
                                   std::int64_t event_id);
};

Event load_event(const EventFiles &files, std::int64_t event_id = 0);
void write_event(const Event &event, const EventFiles &files);

/// Event ids of every `event*-hits.csv` in `dir`, ascending.
std::vector<std::int64_t> list_events(const std::filesystem::path &dir);

struct DetectorLayer {
    double radius;      // mm
    double half_length; // mm
    int volume_id;
    int layer_id;
};

/// Ten barrel layers from 32 mm to 1020 mm (TrackML pixel and strip barrels).
std::vector<DetectorLayer> default_barrel();

struct SyntheticConfig {
    std::size_t n_tracks{20};
    std::uint64_t seed{0};
    std::int64_t event_id{0};
    std::vector<DetectorLayer> layers{default_barrel()};
    double pt_min{1.0}; // GeV
    double pt_max{5.0};
    double eta_max{1.0};
    /// Initial azimuths are drawn from [-phi_sector/2, phi_sector/2). The
    /// default packs 20 tracks densely enough that the default cuts keep
    /// roughly as many fake doublets as true ones.
    double phi_sector{std::numbers::pi / 16.0};
    double vertex_sigma_z{50.0}; // mm
    double field_tesla{2.0};
    double smear_sigma{0.1}; // mm, per coordinate

    void validate() const;
};

/// Transverse radius of curvature in mm.
double helix_radius_mm(double pt_gev, double field_tesla);

Event generate_synthetic(const SyntheticConfig &cfg);

} // namespace qgnn::event
