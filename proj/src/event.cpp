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
#include "qgnn/event.hpp"
#include "qgnn/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace qgnn::event {

namespace fs = std::filesystem;

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        auto field = line.substr(start, pos == std::string_view::npos
                                            ? std::string_view::npos
                                            : pos - start);
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
            field.remove_suffix(1);
        }
        while (!field.empty() && field.front() == ' ') {
            field.remove_prefix(1);
        }
        out.push_back(field);
        if (pos == std::string_view::npos) {
            break;
        }
        start = pos + 1;
    }
    return out;
}

/// Column-addressed CSV table with a fixed set of admissible columns.
class CsvTable {
  public:
    CsvTable(const fs::path &path, const std::vector<std::string> &known,
             const std::vector<std::string> &required)
        : path_{path} {
        std::ifstream in(path);
        if (!in) {
            throw DataError("cannot open " + path.string());
        }
        std::string line;
        if (!std::getline(in, line)) {
            throw DataError(path.string() + ": missing header");
        }
        const auto header = split(line);
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string name(header[i]);
            if (std::find(known.begin(), known.end(), name) == known.end()) {
                throw DataError(path.string() + ": unknown column '" + name + "'");
            }
            if (!columns_.emplace(name, i).second) {
                throw DataError(path.string() + ": duplicate column '" + name + "'");
            }
        }
        for (const auto &r : required) {
            if (!columns_.count(r)) {
                throw DataError(path.string() + ": missing column '" + r + "'");
            }
        }
        std::size_t line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty() || line == "\r") {
                continue;
            }
            auto fields = split(line);
            if (fields.size() != header.size()) {
                throw DataError(fmt::format("{}:{}: expected {} fields, got {}",
                                            path.string(), line_no,
                                            header.size(), fields.size()));
            }
            rows_.emplace_back(fields.begin(), fields.end());
            line_numbers_.push_back(line_no);
        }
    }

    [[nodiscard]] std::size_t size() const { return rows_.size(); }
    [[nodiscard]] bool has(const std::string &col) const {
        return columns_.count(col) > 0;
    }

    template <typename T> T get(std::size_t row, const std::string &col) const {
        const auto &text = rows_[row][columns_.at(col)];
        T value{};
        const auto *first = text.data();
        const auto *last = text.data() + text.size();
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc{} || ptr != last) {
            throw DataError(fmt::format("{}:{}: malformed value '{}' in column {}",
                                        path_.string(), line_numbers_[row],
                                        text, col));
        }
        return value;
    }

    template <typename T>
    T get_or(std::size_t row, const std::string &col, T fallback) const {
        return has(col) ? get<T>(row, col) : fallback;
    }

  private:
    fs::path path_;
    std::unordered_map<std::string, std::size_t> columns_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> line_numbers_;
};

const std::vector<std::string> kHitColumns{"hit_id",    "x",        "y",
                                           "z",         "volume_id", "layer_id",
                                           "module_id"};
const std::vector<std::string> kParticleColumns{
    "particle_id", "vx", "vy", "vz", "px", "py", "pz", "q", "nhits"};
const std::vector<std::string> kTruthColumns{
    "hit_id", "particle_id", "tx", "ty", "tz", "tpx", "tpy", "tpz", "weight"};

std::optional<std::int64_t> parse_event_id(const std::string &name) {
    constexpr std::string_view prefix = "event";
    constexpr std::string_view suffix = "-hits.csv";
    if (name.size() <= prefix.size() + suffix.size() ||
        name.compare(0, prefix.size(), prefix) != 0 ||
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) != 0) {
        return std::nullopt;
    }
    const auto digits = std::string_view(name).substr(
        prefix.size(), name.size() - prefix.size() - suffix.size());
    std::int64_t id = 0;
    const auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        return std::nullopt;
    }
    return id;
}

} // namespace

double Particle::pt() const { return std::hypot(px, py); }

void Event::validate() const {
    std::unordered_set<std::int64_t> hit_ids;
    for (const auto &h : hits) {
        if (!hit_ids.insert(h.hit_id).second) {
            throw DataError(fmt::format("duplicate hit_id {}", h.hit_id));
        }
    }
    std::unordered_set<std::int64_t> particle_ids;
    for (const auto &p : particles) {
        if (!particle_ids.insert(p.particle_id).second) {
            throw DataError(fmt::format("duplicate particle_id {}", p.particle_id));
        }
    }
    for (const auto &[hit, particle] : truth) {
        if (!hit_ids.count(hit)) {
            throw DataError(
                fmt::format("truth references hit_id {} absent from hits", hit));
        }
        if (particle != 0 && !particle_ids.count(particle)) {
            throw DataError(fmt::format(
                "truth references particle_id {} absent from particles", particle));
        }
    }
}

std::int64_t Event::particle_of(std::int64_t hit_id) const {
    const auto it = truth.find(hit_id);
    return it == truth.end() ? 0 : it->second;
}

EventFiles EventFiles::in_directory(const fs::path &dir, std::int64_t event_id) {
    const auto stem = fmt::format("event{:09d}", event_id);
    return {dir / (stem + "-hits.csv"), dir / (stem + "-particles.csv"),
            dir / (stem + "-truth.csv")};
}

Event load_event(const EventFiles &files, std::int64_t event_id) {
    Event ev;
    ev.event_id = event_id;

    const CsvTable hits(files.hits, kHitColumns,
                        {"hit_id", "x", "y", "z", "volume_id", "layer_id"});
    ev.hits.reserve(hits.size());
    for (std::size_t r = 0; r < hits.size(); ++r) {
        Hit h;
        h.hit_id = hits.get<std::int64_t>(r, "hit_id");
        h.x = hits.get<double>(r, "x");
        h.y = hits.get<double>(r, "y");
        h.z = hits.get<double>(r, "z");
        h.volume_id = hits.get<int>(r, "volume_id");
        h.layer_id = hits.get<int>(r, "layer_id");
        h.module_id = hits.get_or<int>(r, "module_id", 0);
        ev.hits.push_back(h);
    }

    const CsvTable particles(files.particles, kParticleColumns,
                             {"particle_id", "px", "py", "pz"});
    ev.particles.reserve(particles.size());
    for (std::size_t r = 0; r < particles.size(); ++r) {
        Particle p;
        p.particle_id = particles.get<std::int64_t>(r, "particle_id");
        p.vx = particles.get_or<double>(r, "vx", 0.0);
        p.vy = particles.get_or<double>(r, "vy", 0.0);
        p.vz = particles.get_or<double>(r, "vz", 0.0);
        p.px = particles.get<double>(r, "px");
        p.py = particles.get<double>(r, "py");
        p.pz = particles.get<double>(r, "pz");
        p.q = particles.get_or<int>(r, "q", 0);
        p.nhits = particles.get_or<int>(r, "nhits", 0);
        ev.particles.push_back(p);
    }

    const CsvTable truth(files.truth, kTruthColumns, {"hit_id", "particle_id"});
    for (std::size_t r = 0; r < truth.size(); ++r) {
        const auto hit = truth.get<std::int64_t>(r, "hit_id");
        const auto particle = truth.get<std::int64_t>(r, "particle_id");
        if (!ev.truth.emplace(hit, particle).second) {
            throw DataError(fmt::format("{}: duplicate truth row for hit_id {}",
                                        files.truth.string(), hit));
        }
    }
    ev.validate();
    return ev;
}

void write_event(const Event &event, const EventFiles &files) {
    auto open = [](const fs::path &p) {
        if (p.has_parent_path()) {
            fs::create_directories(p.parent_path());
        }
        std::ofstream out(p);
        if (!out) {
            throw DataError("cannot write " + p.string());
        }
        return out;
    };
    {
        auto out = open(files.hits);
        out << "hit_id,x,y,z,volume_id,layer_id,module_id\n";
        for (const auto &h : event.hits) {
            out << fmt::format("{},{},{},{},{},{},{}\n", h.hit_id, h.x, h.y, h.z,
                               h.volume_id, h.layer_id, h.module_id);
        }
    }
    {
        auto out = open(files.particles);
        out << "particle_id,vx,vy,vz,px,py,pz,q,nhits\n";
        for (const auto &p : event.particles) {
            out << fmt::format("{},{},{},{},{},{},{},{},{}\n", p.particle_id,
                               p.vx, p.vy, p.vz, p.px, p.py, p.pz, p.q, p.nhits);
        }
    }
    {
        auto out = open(files.truth);
        out << "hit_id,particle_id\n";
        for (const auto &[hit, particle] : event.truth) {
            out << hit << ',' << particle << '\n';
        }
    }
}

std::vector<std::int64_t> list_events(const fs::path &dir) {
    std::vector<std::int64_t> ids;
    if (!fs::is_directory(dir)) {
        throw DataError("not a directory: " + dir.string());
    }
    for (const auto &entry : fs::directory_iterator(dir)) {
        if (auto id = parse_event_id(entry.path().filename().string())) {
            ids.push_back(*id);
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<DetectorLayer> default_barrel() {
    return {
        {32.0, 455.0, 8, 2},    {72.0, 455.0, 8, 4},    {116.0, 455.0, 8, 6},
        {172.0, 455.0, 8, 8},   {260.0, 1030.0, 13, 2}, {360.0, 1030.0, 13, 4},
        {500.0, 1030.0, 13, 6}, {660.0, 1030.0, 13, 8}, {820.0, 1030.0, 17, 2},
        {1020.0, 1030.0, 17, 4},
    };
}

double helix_radius_mm(double pt_gev, double field_tesla) {
    return pt_gev / (0.3 * field_tesla) * 1000.0;
}

void SyntheticConfig::validate() const {
    QGNN_REQUIRE(n_tracks >= 1, "need at least one track");
    QGNN_REQUIRE(!layers.empty(), "need at least one detector layer");
    QGNN_REQUIRE(pt_min > 0.0 && pt_max >= pt_min,
                 "invalid transverse momentum range");
    QGNN_REQUIRE(eta_max >= 0.0 && std::isfinite(eta_max), "eta_max must be finite and >= 0");
    QGNN_REQUIRE(field_tesla > 0.0, "field must be positive");
    QGNN_REQUIRE(phi_sector > 0.0 && phi_sector <= 2.0 * std::numbers::pi,
                 "phi sector must lie in (0, 2pi]");
    QGNN_REQUIRE(vertex_sigma_z >= 0.0 && smear_sigma >= 0.0,
                 "vertex and smearing widths must be >= 0");
}

Event generate_synthetic(const SyntheticConfig &cfg) {
    cfg.validate();

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> phi_dist(-cfg.phi_sector / 2.0,
                                                    cfg.phi_sector / 2.0);
    std::uniform_real_distribution<double> pt_dist(cfg.pt_min, cfg.pt_max);
    std::uniform_real_distribution<double> eta_dist(-cfg.eta_max, cfg.eta_max);
    std::bernoulli_distribution charge_dist(0.5);
    std::normal_distribution<double> vertex_dist(0.0, 1.0);
    std::normal_distribution<double> unit(0.0, 1.0);
    auto smear = [&](std::mt19937_64 &g) { return cfg.smear_sigma * unit(g); };

    auto layers = cfg.layers;
    std::sort(layers.begin(), layers.end(),
              [](const auto &a, const auto &b) { return a.radius < b.radius; });

    Event ev;
    ev.event_id = cfg.event_id;
    std::int64_t next_hit = 1;
    for (std::size_t t = 0; t < cfg.n_tracks; ++t) {
        const double phi0 = phi_dist(rng);
        const double pt = pt_dist(rng);
        const double eta = eta_dist(rng);
        const int q = charge_dist(rng) ? 1 : -1;
        const double vz = cfg.vertex_sigma_z * vertex_dist(rng);

        Particle p;
        p.particle_id = static_cast<std::int64_t>(t) + 1;
        p.vz = vz;
        p.px = pt * std::cos(phi0);
        p.py = pt * std::sin(phi0);
        p.pz = pt * std::sinh(eta);
        p.q = q;

        const double radius = helix_radius_mm(pt, cfg.field_tesla);
        for (const auto &layer : layers) {
            if (layer.radius >= 2.0 * radius) {
                break;
            }
            // turning angle from the vertex to the cylinder
            const double alpha = 2.0 * std::asin(layer.radius / (2.0 * radius));
            const double phi = phi0 - q * alpha / 2.0;
            const double z = vz + radius * alpha * std::sinh(eta);
            if (std::abs(z) > layer.half_length) {
                continue;
            }
            Hit h;
            h.hit_id = next_hit++;
            h.x = layer.radius * std::cos(phi) + smear(rng);
            h.y = layer.radius * std::sin(phi) + smear(rng);
            h.z = z + smear(rng);
            h.volume_id = layer.volume_id;
            h.layer_id = layer.layer_id;
            ev.hits.push_back(h);
            ev.truth.emplace(h.hit_id, p.particle_id);
            ++p.nhits;
        }
        ev.particles.push_back(p);
    }
    return ev;
}

} // namespace qgnn::event
