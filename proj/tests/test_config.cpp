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
#include "qgnn/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace qgnn;
using namespace qgnn::config;
namespace fs = std::filesystem;

namespace {

RunConfig with(std::vector<std::string> overrides) {
    return parse("", overrides);
}

} // namespace

TEST_CASE("FNV-1a reference vectors", "[config]") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
    CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("defaults", "[config]") {
    const auto cfg = parse("");
    CHECK(cfg.model.hidden_dim == 4);
    CHECK(cfg.model.n_qubits == 4);
    CHECK(cfg.model.n_iterations == 3);
    CHECK(cfg.model.n_layers == 1);
    CHECK(cfg.model.edge_pqc == pqc::Family::Circuit10);
    CHECK(cfg.model.axis == pqc::Axis::Y);
    CHECK(cfg.train.learning_rate == 0.01);
    CHECK(cfg.train.seeds.size() == 5);
    CHECK(cfg.cuts.dphi_dr_max == 6e-4);
    CHECK(cfg.cuts.z0_max == 100.0);
    CHECK(cfg.gradcheck.presets.size() == 4);
    CHECK(cfg.paths.checkpoint == fs::path("out/train/best_seed1.qckpt"));
    CHECK(load("").model.to_json() == cfg.model.to_json());
}

TEST_CASE("the resolved INI parses back to the same configuration", "[config]") {
    auto cfg = with({"model.preset=MPS-10", "model.axis=x", "train.seeds=4,9",
                     "cuts.dphi_dr_max=inf", "generate.phi_sector=0.5",
                     "descriptors.families=circuit19,mps", "sweep.axis=n_layers",
                     "sweep.values=1,2", "gradcheck.step=1e-6"});
    const auto text = to_ini(cfg);
    const auto back = parse(text);
    CHECK(to_ini(back) == text);
    CHECK(config_hash(back) == config_hash(cfg));
    CHECK(back.model.edge_pqc == pqc::Family::MPS);
    CHECK(back.model.node_pqc == pqc::Family::Circuit10);
    CHECK(back.model.axis == pqc::Axis::X);
    CHECK(back.train.seeds == std::vector<std::uint64_t>{4, 9});
    CHECK(std::isinf(back.cuts.dphi_dr_max));
    CHECK(back.generate.synthetic.phi_sector == 0.5);
    CHECK(back.gradcheck.options.step == 1e-6);
    CHECK(parse(to_ini(parse(""))).model.to_json() == parse("").model.to_json());
}

TEST_CASE("doubles survive the text round trip exactly", "[config]") {
    const auto cfg = with({"train.learning_rate=0.0123456789012345678",
                           "generate.smear_sigma=1e-300"});
    const auto back = parse(to_ini(cfg));
    CHECK(back.train.learning_rate == cfg.train.learning_rate);
    CHECK(back.generate.synthetic.smear_sigma == 1e-300);
}

TEST_CASE("INI files and overrides", "[config]") {
    const auto path = fs::temp_directory_path() / "qgnn_test_config.ini";
    {
        std::ofstream f(path);
        f << "; comment\n[model]\nhidden_dim = 6\nn_qubits = 6\n\n[train]\nepochs = 2\n";
    }
    const std::vector<std::string> over{"train.epochs=7"};
    const auto cfg = load(path, over);
    CHECK(cfg.model.hidden_dim == 6);
    CHECK(cfg.train.epochs == 7);
    CHECK(load(path).train.epochs == 2);
    fs::remove(path);
    CHECK_THROWS_AS(load(path), ConfigError);
}

TEST_CASE("the hash follows every setting except workers", "[config]") {
    auto a = parse("");
    auto b = parse("");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    b.workers = 8;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(to_ini(a).find("workers") == std::string::npos);
    CHECK(config_hash(with({"train.epochs=11"})) != config_hash(a));
    CHECK(config_hash(with({"paths.output_dir=elsewhere"})) != config_hash(a));
    const auto prov = provenance(a, "train");
    CHECK(prov.at("tool") == "qgnn");
    CHECK(prov.at("command") == "train");
    CHECK(prov.at("config_hash") == config_hash(a));
}

TEST_CASE("invalid configurations are rejected", "[config]") {
    CHECK_THROWS_AS(parse("[model]\ncolour = red\n"), ConfigError);
    CHECK_THROWS_AS(parse("[modle]\nhidden_dim = 3\n"), ConfigError);
    CHECK_THROWS_AS(parse("hidden_dim = 3\n"), ConfigError);
    CHECK_THROWS_AS(with({"model.hidden_dim=three"}), ConfigError);
    CHECK_THROWS_AS(with({"model.hidden_dim=3.5"}), ConfigError);
    CHECK_THROWS_AS(with({"model.hidden_dim=0"}), ConfigError);
    CHECK_THROWS_AS(with({"model.hidden_dim"}), ConfigError);
    CHECK_THROWS_AS(with({"hidden_dim=3"}), ConfigError);
    CHECK_THROWS_AS(with({"model.axis=w"}), ConfigError);
    CHECK_THROWS_AS(with({"model.preset=circuit7"}), ConfigError);
    CHECK_THROWS_AS(with({"model.node_pqc=ttn"}), ConfigError);
    CHECK_THROWS_AS(with({"train.seeds=1,,2"}), ConfigError);
    CHECK_THROWS_AS(with({"train.learning_rate=-1"}), ConfigError);
    CHECK_THROWS_AS(with({"train.split_ratio=1"}), ConfigError);
    CHECK_THROWS_AS(with({"generate.n_events=0"}), ConfigError);
    CHECK_THROWS_AS(with({"generate.phi_sector=7"}), ConfigError);
    CHECK_THROWS_AS(with({"cuts.z0_max=-5"}), ConfigError);
    CHECK_THROWS_AS(with({"sweep.axis=colour"}), ConfigError);
    CHECK_THROWS_AS(with({"gradcheck.tolerance=0"}), ConfigError);
    CHECK_THROWS_AS(parse("[model\nhidden_dim = 3\n"), ConfigError);
}

TEST_CASE("event seeds are distinct and stable", "[config]") {
    CHECK(event_seed(1, 0) == event_seed(1, 0));
    CHECK(event_seed(1, 0) != event_seed(1, 1));
    CHECK(event_seed(1, 0) != event_seed(2, 0));
}

TEST_CASE("resolved configuration file", "[config]") {
    const auto dir = fs::temp_directory_path() / "qgnn_test_resolved";
    const auto cfg = with({"train.epochs=3"});
    write_resolved(cfg, dir);
    const auto back = load(dir / "config.ini");
    CHECK(config_hash(back) == config_hash(cfg));
    fs::remove_all(dir);
}
