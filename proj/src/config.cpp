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

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace qgnn::config {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T> T parse_number(const std::string &raw) {
    const std::string s = trim(raw);
    T value{};
    const auto *end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (s.empty() || ec != std::errc{} || ptr != end) {
        throw ConfigError("invalid number '" + raw + "'");
    }
    return value;
}

std::vector<std::string> split_list(const std::string &raw) {
    std::vector<std::string> out;
    std::stringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw ConfigError("empty element in list '" + raw + "'");
        }
        out.push_back(item);
    }
    if (out.empty()) {
        throw ConfigError("empty list");
    }
    return out;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string &raw, F &&parse_one) {
    std::vector<T> out;
    for (const auto &item : split_list(raw)) {
        out.push_back(parse_one(item));
    }
    return out;
}

template <typename T, typename F>
std::string join(const std::vector<T> &values, F &&format_one) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        out += (i ? ", " : "") + std::string(format_one(values[i]));
    }
    return out;
}

std::string num(double v) { return fmt::format("{}", v); }
std::string num(std::uint64_t v) { return std::to_string(v); }
std::string num(std::int64_t v) { return std::to_string(v); }
std::string num(int v) { return std::to_string(v); }

struct Field {
    std::string section;
    std::string key;
    std::function<void(RunConfig &, const std::string &)> set;
    /// empty for write-only keys such as model.preset
    std::function<std::string(const RunConfig &)> get;
};

#define QGNN_NUMBER(SECTION, KEY, TYPE, MEMBER)                                \
    Field {                                                                    \
        SECTION, KEY,                                                          \
            [](RunConfig &c, const std::string &v) {                           \
                c.MEMBER = parse_number<TYPE>(v);                              \
            },                                                                 \
            [](const RunConfig &c) { return num(static_cast<TYPE>(c.MEMBER)); } \
    }

#define QGNN_PATH(KEY, MEMBER)                                                 \
    Field {                                                                    \
        "paths", KEY,                                                          \
            [](RunConfig &c, const std::string &v) { c.paths.MEMBER = trim(v); }, \
            [](const RunConfig &c) { return c.paths.MEMBER.string(); }         \
    }

const std::vector<Field> &fields() {
    using U = std::uint64_t;
    using I = std::int64_t;
    static const std::vector<Field> table = {
        QGNN_PATH("events_dir", events_dir),
        QGNN_PATH("graphs_dir", graphs_dir),
        QGNN_PATH("output_dir", output_dir),
        QGNN_PATH("checkpoint", checkpoint),

        QGNN_NUMBER("generate", "n_events", U, generate.n_events),
        QGNN_NUMBER("generate", "first_event_id", I, generate.first_event_id),
        QGNN_NUMBER("generate", "n_tracks", U, generate.synthetic.n_tracks),
        QGNN_NUMBER("generate", "seed", U, generate.synthetic.seed),
        QGNN_NUMBER("generate", "pt_min", double, generate.synthetic.pt_min),
        QGNN_NUMBER("generate", "pt_max", double, generate.synthetic.pt_max),
        QGNN_NUMBER("generate", "eta_max", double, generate.synthetic.eta_max),
        QGNN_NUMBER("generate", "phi_sector", double, generate.synthetic.phi_sector),
        QGNN_NUMBER("generate", "vertex_sigma_z", double,
                    generate.synthetic.vertex_sigma_z),
        QGNN_NUMBER("generate", "field_tesla", double, generate.synthetic.field_tesla),
        QGNN_NUMBER("generate", "smear_sigma", double, generate.synthetic.smear_sigma),

        QGNN_NUMBER("cuts", "pt_min", double, cuts.pt_min),
        QGNN_NUMBER("cuts", "eta_max", double, cuts.eta_max),
        QGNN_NUMBER("cuts", "dphi_dr_max", double, cuts.dphi_dr_max),
        QGNN_NUMBER("cuts", "z0_max", double, cuts.z0_max),
        {"cuts", "barrel_volumes",
         [](RunConfig &c, const std::string &v) {
             c.cuts.barrel_volumes = parse_list<int>(v, parse_number<int>);
         },
         [](const RunConfig &c) {
             return join(c.cuts.barrel_volumes, [](int v) { return num(v); });
         }},

        {"model", "preset",
         [](RunConfig &c, const std::string &v) { c.model.apply_preset(trim(v)); },
         {}},
        QGNN_NUMBER("model", "hidden_dim", U, model.hidden_dim),
        QGNN_NUMBER("model", "n_qubits", U, model.n_qubits),
        QGNN_NUMBER("model", "n_iterations", U, model.n_iterations),
        QGNN_NUMBER("model", "n_layers", U, model.n_layers),
        {"model", "edge_pqc",
         [](RunConfig &c, const std::string &v) {
             c.model.edge_pqc = pqc::parse_family(trim(v));
         },
         [](const RunConfig &c) { return std::string(pqc::to_string(c.model.edge_pqc)); }},
        {"model", "node_pqc",
         [](RunConfig &c, const std::string &v) {
             c.model.node_pqc = pqc::parse_family(trim(v));
         },
         [](const RunConfig &c) { return std::string(pqc::to_string(c.model.node_pqc)); }},
        {"model", "axis",
         [](RunConfig &c, const std::string &v) { c.model.axis = pqc::parse_axis(trim(v)); },
         [](const RunConfig &c) { return std::string(pqc::to_string(c.model.axis)); }},
        {"model", "mode",
         [](RunConfig &c, const std::string &v) { c.model.mode = model::parse_mode(trim(v)); },
         [](const RunConfig &c) { return std::string(model::to_string(c.model.mode)); }},
        QGNN_NUMBER("model", "scale_r", double, model.scaling.r),
        QGNN_NUMBER("model", "scale_phi", double, model.scaling.phi),
        QGNN_NUMBER("model", "scale_z", double, model.scaling.z),

        QGNN_NUMBER("train", "learning_rate", double, train.learning_rate),
        QGNN_NUMBER("train", "epochs", U, train.epochs),
        {"train", "seeds",
         [](RunConfig &c, const std::string &v) {
             c.train.seeds = parse_list<U>(v, parse_number<U>);
         },
         [](const RunConfig &c) {
             return join(c.train.seeds, [](U v) { return num(v); });
         }},
        QGNN_NUMBER("train", "split_ratio", double, train.split_ratio),
        QGNN_NUMBER("train", "split_seed", U, train.split_seed),
        QGNN_NUMBER("train", "threshold", double, train.threshold),
        QGNN_NUMBER("train", "beta1", double, train.beta1),
        QGNN_NUMBER("train", "beta2", double, train.beta2),
        QGNN_NUMBER("train", "epsilon", double, train.epsilon),

        {"descriptors", "families",
         [](RunConfig &c, const std::string &v) {
             c.descriptors.families = parse_list<pqc::Family>(
                 v, [](const std::string &s) { return pqc::parse_family(s); });
         },
         [](const RunConfig &c) {
             return join(c.descriptors.families,
                         [](pqc::Family f) { return pqc::to_string(f); });
         }},
        {"descriptors", "n_qubits",
         [](RunConfig &c, const std::string &v) {
             c.descriptors.n_qubits = parse_list<std::size_t>(v, parse_number<std::size_t>);
         },
         [](const RunConfig &c) {
             return join(c.descriptors.n_qubits, [](std::size_t v) { return num(U{v}); });
         }},
        {"descriptors", "n_layers",
         [](RunConfig &c, const std::string &v) {
             c.descriptors.n_layers = parse_list<std::size_t>(v, parse_number<std::size_t>);
         },
         [](const RunConfig &c) {
             return join(c.descriptors.n_layers, [](std::size_t v) { return num(U{v}); });
         }},
        {"descriptors", "seeds",
         [](RunConfig &c, const std::string &v) {
             c.descriptors.seeds = parse_list<U>(v, parse_number<U>);
         },
         [](const RunConfig &c) {
             return join(c.descriptors.seeds, [](U v) { return num(v); });
         }},
        QGNN_NUMBER("descriptors", "n_samples", U, descriptors.sampling.n_samples),
        QGNN_NUMBER("descriptors", "n_bins", U, descriptors.sampling.n_bins),
        QGNN_NUMBER("descriptors", "input_value", double, descriptors.sampling.input_value),

        {"sweep", "axis",
         [](RunConfig &c, const std::string &v) {
             c.sweep.axis = training::parse_sweep_axis(trim(v));
         },
         [](const RunConfig &c) { return std::string(training::to_string(c.sweep.axis)); }},
        {"sweep", "values",
         [](RunConfig &c, const std::string &v) { c.sweep.values = split_list(v); },
         [](const RunConfig &c) {
             return join(c.sweep.values, [](const std::string &s) { return s; });
         }},

        {"gradcheck", "presets",
         [](RunConfig &c, const std::string &v) { c.gradcheck.presets = split_list(v); },
         [](const RunConfig &c) {
             return join(c.gradcheck.presets, [](const std::string &s) { return s; });
         }},
        QGNN_NUMBER("gradcheck", "n_edges", U, gradcheck.n_edges),
        QGNN_NUMBER("gradcheck", "seed", U, gradcheck.seed),
        QGNN_NUMBER("gradcheck", "step", double, gradcheck.options.step),
        QGNN_NUMBER("gradcheck", "tolerance", double, gradcheck.options.tolerance),
        QGNN_NUMBER("gradcheck", "floor", double, gradcheck.options.floor),

    };
    return table;
}

#undef QGNN_NUMBER
#undef QGNN_PATH

void apply_override(pt::ptree &tree, const std::string &item) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
        throw ConfigError("override must look like section.key=value: '" + item + "'");
    }
    const std::string path = trim(std::string_view(item).substr(0, eq));
    const auto dot = path.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == path.size() ||
        path.find('.', dot + 1) != std::string::npos) {
        throw ConfigError("override key must look like section.key: '" + path + "'");
    }
    tree.put(pt::ptree::path_type(path, '.'), trim(item.substr(eq + 1)));
}

} // namespace

std::uint64_t event_seed(std::uint64_t dataset_seed, std::int64_t event_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(dataset_seed),
                      static_cast<std::uint32_t>(dataset_seed >> 32),
                      static_cast<std::uint32_t>(event_id),
                      static_cast<std::uint32_t>(static_cast<std::uint64_t>(event_id) >> 32)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void RunConfig::validate() const {
    if (generate.n_events == 0) {
        throw ConfigError("generate.n_events must be positive");
    }
    if (generate.synthetic.n_tracks == 0) {
        throw ConfigError("generate.n_tracks must be positive");
    }
    if (workers == 0) {
        throw ConfigError("workers must be positive");
    }
    if (descriptors.families.empty() || descriptors.n_qubits.empty() ||
        descriptors.n_layers.empty() || descriptors.seeds.empty()) {
        throw ConfigError("descriptor sweep lists must be non-empty");
    }
    if (sweep.values.empty()) {
        throw ConfigError("sweep.values must be non-empty");
    }
    if (gradcheck.n_edges == 0 || !(gradcheck.options.step > 0.0) ||
        !(gradcheck.options.tolerance > 0.0) || !(gradcheck.options.floor >= 0.0)) {
        throw ConfigError("gradcheck settings must be positive");
    }
    generate.synthetic.validate();
    cuts.validate();
    model.validate();
    train.validate();
    descriptors.sampling.validate();
}

RunConfig parse(std::string_view ini_text, std::span<const std::string> overrides) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(ini_text)};
        pt::read_ini(in, tree);
        for (const auto &o : overrides) {
            apply_override(tree, o);
        }
    } catch (const pt::ptree_error &e) {
        throw ConfigError(std::string("malformed configuration: ") + e.what());
    }

    std::set<std::pair<std::string, std::string>> known;
    std::set<std::string> sections;
    for (const auto &f : fields()) {
        known.emplace(f.section, f.key);
        sections.insert(f.section);
    }
    for (const auto &[section, node] : tree) {
        if (node.empty()) {
            throw ConfigError("key outside any section: '" + section + "'");
        }
        if (!sections.count(section)) {
            throw ConfigError("unknown section [" + section + "]");
        }
        for (const auto &[key, value] : node) {
            if (!value.empty() || !known.count({section, key})) {
                throw ConfigError("unknown key '" + section + "." + key + "'");
            }
        }
    }

    RunConfig cfg;
    for (const auto &f : fields()) {
        const auto section = tree.get_child_optional(pt::ptree::path_type(f.section, '\0'));
        if (!section) {
            continue;
        }
        const auto value = section->get_optional<std::string>(pt::ptree::path_type(f.key, '\0'));
        if (!value) {
            continue;
        }
        try {
            f.set(cfg, *value);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(f.section + "." + f.key + ": " + e.what());
        }
    }
    try {
        cfg.validate();
    } catch (const ConfigError &) {
        throw;
    } catch (const std::invalid_argument &e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

RunConfig load(const fs::path &path, std::span<const std::string> overrides) {
    if (path.empty()) {
        return parse("", overrides);
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration file " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), overrides);
}

std::string to_ini(const RunConfig &cfg) {
    std::string out;
    std::string current;
    for (const auto &f : fields()) {
        if (!f.get) {
            continue;
        }
        if (f.section != current) {
            out += (current.empty() ? "" : "\n") + fmt::format("[{}]\n", f.section);
            current = f.section;
        }
        out += fmt::format("{} = {}\n", f.key, f.get(cfg));
    }
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const RunConfig &cfg) {
    return fmt::format("{:016x}", fnv1a64(to_ini(cfg)));
}

nlohmann::json provenance(const RunConfig &cfg, std::string_view command) {
    return {{"tool", kToolName},
            {"version", kToolVersion},
            {"command", command},
            {"config_hash", config_hash(cfg)}};
}

void write_resolved(const RunConfig &cfg, const fs::path &dir) {
    fs::create_directories(dir);
    std::ofstream out(dir / "config.ini");
    if (!out) {
        throw std::runtime_error("cannot write " + (dir / "config.ini").string());
    }
    out << "; " << kToolName << " " << kToolVersion << " resolved configuration, hash "
        << config_hash(cfg) << "\n"
        << to_ini(cfg);
}

} // namespace qgnn::config
