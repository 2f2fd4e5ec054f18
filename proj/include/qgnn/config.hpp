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
 * Run configuration: an INI file with one section per subsystem, overridable
 * key by key from the command line (`section.key=value`).
 *
 * Unknown sections and keys are errors. The resolved configuration is
 * rendered back to INI with every key present, and that text is what the
 * configuration hash covers.
 */
#pragma once

#include "qgnn/descriptors.hpp"
#include "qgnn/event.hpp"
#include "qgnn/gradcheck.hpp"
#include "qgnn/graph.hpp"
#include "qgnn/model.hpp"
#include "qgnn/pqc.hpp"
#include "qgnn/training.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qgnn::config {

inline constexpr std::string_view kToolName = "qgnn";
inline constexpr std::string_view kToolVersion = "0.1.0";

class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Paths {
    std::filesystem::path events_dir{"data/events"};
    std::filesystem::path graphs_dir{"data/graphs"};
    std::filesystem::path output_dir{"out"};
    /// evaluate reads this checkpoint
    std::filesystem::path checkpoint{"out/train/best_seed1.qckpt"};
};

struct Generate {
    std::size_t n_events{20};
    std::int64_t first_event_id{0};
    /// `seed` is the dataset seed; event i is generated from event_seed().
    event::SyntheticConfig synthetic{};
};

/// Seed of one generated event, derived from the dataset seed.
std::uint64_t event_seed(std::uint64_t dataset_seed, std::int64_t event_id);

struct DescriptorSweep {
    std::vector<pqc::Family> families{pqc::Family::Circuit10,
                                      pqc::Family::Circuit19};
    std::vector<std::size_t> n_qubits{4};
    std::vector<std::size_t> n_layers{1, 2, 3};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    descriptors::DescriptorConfig sampling{};
};

struct Sweep {
    training::SweepAxis axis{training::SweepAxis::EmbeddingAxis};
    std::vector<std::string> values{"x", "y", "z"};
};

struct Gradcheck {
    std::vector<std::string> presets{"circuit10", "circuit19", "MPS-10",
                                     "TTN-10"};
    std::size_t n_edges{12};
    std::uint64_t seed{1};
    gradcheck::Options options{};
};

struct RunConfig {
    Paths paths;
    Generate generate;
    graph::CutConfig cuts;
    model::ModelConfig model;
    training::TrainConfig train;
    DescriptorSweep descriptors;
    Sweep sweep;
    Gradcheck gradcheck;
    /// Set from the command line only; results never depend on it, so it
    /// is not part of the INI text or the hash.
    std::size_t workers{1};

    /// Throws ConfigError (or the subsystem's std::invalid_argument).
    void validate() const;
};

/// Parses INI text, then applies `overrides` of the form section.key=value.
RunConfig parse(std::string_view ini_text,
                std::span<const std::string> overrides = {});
/// An empty path means "defaults only".
RunConfig load(const std::filesystem::path &path,
               std::span<const std::string> overrides = {});

/// Every key, in a fixed order.
std::string to_ini(const RunConfig &cfg);
/// 64-bit FNV-1a of to_ini(cfg), as 16 hex digits.
std::string config_hash(const RunConfig &cfg);
std::uint64_t fnv1a64(std::string_view bytes);

/// tool, version, command and configuration hash.
nlohmann::json provenance(const RunConfig &cfg, std::string_view command);

/// Writes `config.ini` (resolved) into `dir`.
void write_resolved(const RunConfig &cfg, const std::filesystem::path &dir);

} // namespace qgnn::config
