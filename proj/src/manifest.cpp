#include "abtrust/manifest.hpp"

#include "abtrust/io.hpp"

#include "json.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace abtrust {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

long long to_ll(const std::string& field, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("field " + field + ": invalid integer '" + value + "'");
    }
}

std::uint64_t to_u64(const std::string& field, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("field " + field + ": invalid unsigned integer '" + value + "'");
    }
}

double to_d(const std::string& field, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("field " + field + ": invalid number '" + value + "'");
    }
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
std::string join_list(const std::vector<T>& values, const std::function<std::string(T)>& fmt) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += fmt(values[i]);
    }
    return out;
}

struct Field {
    std::string key;
    std::function<void(ResolvedConfig&, const std::string&)> set;
    std::function<std::string(const ResolvedConfig&)> get;
};

const std::vector<Field>& field_registry() {
    auto int_field = [](std::string key, int SimConfig::* member) {
        return Field{key,
                     [key, member](ResolvedConfig& c, const std::string& v) {
                         c.sim.*member = static_cast<int>(to_ll(key, v));
                     },
                     [member](const ResolvedConfig& c) { return std::to_string(c.sim.*member); }};
    };
    auto double_field = [](std::string key, double SimConfig::* member) {
        return Field{key,
                     [key, member](ResolvedConfig& c, const std::string& v) {
                         c.sim.*member = to_d(key, v);
                     },
                     [member](const ResolvedConfig& c) { return format_double(c.sim.*member); }};
    };

    static const std::vector<Field> fields = {
        int_field("sim.peers", &SimConfig::peers),
        int_field("sim.files", &SimConfig::num_files),
        {"sim.transactions",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.num_transactions = to_ll("sim.transactions", v);
         },
         [](const ResolvedConfig& c) { return std::to_string(c.sim.num_transactions); }},
        double_field("sim.zipf_gamma", &SimConfig::zipf_gamma),
        double_field("sim.replica_scale", &SimConfig::replica_scale),
        int_field("sim.ttl_initial", &SimConfig::ttl_initial),
        int_field("sim.ttl_upper", &SimConfig::ttl_upper),
        int_field("sim.ttl_step", &SimConfig::ttl_step),
        double_field("sim.global_ref", &SimConfig::global_ref),
        int_field("sim.update_period", &SimConfig::update_period),
        double_field("sim.behavior_fidelity", &SimConfig::behavior_fidelity),
        {"sim.w_g",
         [](ResolvedConfig& c, const std::string& v) { c.sim.weights.w_g = to_d("sim.w_g", v); },
         [](const ResolvedConfig& c) { return format_double(c.sim.weights.w_g); }},
        {"sim.w_b",
         [](ResolvedConfig& c, const std::string& v) { c.sim.weights.w_b = to_d("sim.w_b", v); },
         [](const ResolvedConfig& c) { return format_double(c.sim.weights.w_b); }},
        {"sim.selection",
         [](ResolvedConfig& c, const std::string& v) {
             try {
                 c.sim.selection_mode = selection_mode_from_string(v);
             } catch (const std::exception& e) {
                 throw std::runtime_error(std::string("field sim.selection: ") + e.what());
             }
         },
         [](const ResolvedConfig& c) { return to_string(c.sim.selection_mode); }},
        double_field("sim.beta", &SimConfig::beta),
        int_field("sim.holder_replication", &SimConfig::holder_replication),
        int_field("sim.degree", &SimConfig::topology_degree),
        double_field("sim.collective_group_fraction", &SimConfig::collective_group_fraction),
        {"sim.scenario",
         [](ResolvedConfig& c, const std::string& v) {
             try {
                 c.sim.scenario = scenario_from_string(v);
             } catch (const std::exception& e) {
                 throw std::runtime_error(std::string("field sim.scenario: ") + e.what());
             }
         },
         [](const ResolvedConfig& c) { return to_string(c.sim.scenario); }},
        double_field("sim.scenario_value", &SimConfig::scenario_value),
        {"solver.p",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.solver.p = static_cast<int>(to_ll("solver.p", v));
         },
         [](const ResolvedConfig& c) { return std::to_string(c.sim.solver.p); }},
        {"solver.q",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.solver.q = static_cast<int>(to_ll("solver.q", v));
         },
         [](const ResolvedConfig& c) { return std::to_string(c.sim.solver.q); }},
        {"solver.threshold",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.solver.threshold = to_d("solver.threshold", v);
         },
         [](const ResolvedConfig& c) { return format_double(c.sim.solver.threshold); }},
        {"solver.max_iterations",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.solver.max_iterations = static_cast<int>(to_ll("solver.max_iterations", v));
         },
         [](const ResolvedConfig& c) { return std::to_string(c.sim.solver.max_iterations); }},
        {"solver.initial_value",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.solver.initial_value = to_d("solver.initial_value", v);
         },
         [](const ResolvedConfig& c) { return format_double(c.sim.solver.initial_value); }},
        {"baseline.damping",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.baseline.damping = to_d("baseline.damping", v);
         },
         [](const ResolvedConfig& c) { return format_double(c.sim.baseline.damping); }},
        {"baseline.epsilon",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.baseline.epsilon = to_d("baseline.epsilon", v);
         },
         [](const ResolvedConfig& c) { return format_double(c.sim.baseline.epsilon); }},
        {"baseline.max_iterations",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.baseline.max_iterations = static_cast<int>(to_ll("baseline.max_iterations", v));
         },
         [](const ResolvedConfig& c) { return std::to_string(c.sim.baseline.max_iterations); }},
        {"baseline.power_nodes",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.baseline.power_nodes = static_cast<Index>(to_ll("baseline.power_nodes", v));
         },
         [](const ResolvedConfig& c) { return std::to_string(c.sim.baseline.power_nodes); }},
        {"baseline.pretrusted",
         [](ResolvedConfig& c, const std::string& v) {
             c.sim.baseline.pretrusted.clear();
             for (const std::string& item : split_list(v))
                 c.sim.baseline.pretrusted.push_back(
                     static_cast<Index>(to_ll("baseline.pretrusted", item)));
         },
         [](const ResolvedConfig& c) {
             return join_list<Index>(c.sim.baseline.pretrusted,
                                     [](Index v) { return std::to_string(v); });
         }},
        {"run.seed",
         [](ResolvedConfig& c, const std::string& v) { c.sim.seed = to_u64("run.seed", v); },
         [](const ResolvedConfig& c) { return std::to_string(c.sim.seed); }},
        {"run.trials",
         [](ResolvedConfig& c, const std::string& v) {
             c.run.trials = static_cast<int>(to_ll("run.trials", v));
         },
         [](const ResolvedConfig& c) { return std::to_string(c.run.trials); }},
        {"run.jobs",
         [](ResolvedConfig& c, const std::string& v) {
             c.run.jobs = static_cast<int>(to_ll("run.jobs", v));
         },
         [](const ResolvedConfig& c) { return std::to_string(c.run.jobs); }},
        {"run.out",
         [](ResolvedConfig& c, const std::string& v) { c.run.out_dir = v; },
         [](const ResolvedConfig& c) { return c.run.out_dir; }},
        {"run.algorithms",
         [](ResolvedConfig& c, const std::string& v) {
             c.run.algorithms.clear();
             for (const std::string& item : split_list(v)) {
                 try {
                     c.run.algorithms.push_back(algorithm_from_string(item));
                 } catch (const std::exception& e) {
                     throw std::runtime_error(std::string("field run.algorithms: ") + e.what());
                 }
             }
             if (c.run.algorithms.empty())
                 throw std::runtime_error("field run.algorithms: empty list");
         },
         [](const ResolvedConfig& c) {
             return join_list<Algorithm>(c.run.algorithms,
                                         [](Algorithm a) { return to_string(a); });
         }},
        {"run.values",
         [](ResolvedConfig& c, const std::string& v) {
             c.run.values.clear();
             for (const std::string& item : split_list(v))
                 c.run.values.push_back(to_d("run.values", item));
         },
         [](const ResolvedConfig& c) {
             return join_list<double>(c.run.values, [](double v) { return format_double(v); });
         }},
    };
    return fields;
}

const Field& find_field(const std::string& key) {
    for (const Field& f : field_registry())
        if (f.key == key) return f;
    throw std::runtime_error("unknown config field '" + key + "'");
}

}  // namespace

std::vector<std::string> config_field_names() {
    std::vector<std::string> names;
    for (const Field& f : field_registry()) names.push_back(f.key);
    return names;
}

std::map<std::string, std::string> parse_ini_text(const std::string& text,
                                                  const std::string& origin) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                         ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                                     ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": empty key");
        out[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

std::map<std::string, std::string> parse_ini_file(const std::string& path) {
    return parse_ini_text(read_text_file(path), path);
}

ResolvedConfig resolve_config(const std::map<std::string, std::string>& cli_overrides,
                              const std::optional<std::string>& config_path) {
    ResolvedConfig resolved;
    for (const Field& f : field_registry()) resolved.sources[f.key] = "default";

    if (config_path) {
        for (const auto& [key, value] : parse_ini_file(*config_path)) {
            const Field& f = find_field(key);  // rejects unknown keys
            f.set(resolved, value);
            resolved.sources[key] = "config_file";
        }
    }
    for (const auto& [key, value] : cli_overrides) {
        const Field& f = find_field(key);
        f.set(resolved, value);
        resolved.sources[key] = "command_line";
    }

    // Defaults tied to the weight scale.
    if (resolved.sources["solver.initial_value"] == "default")
        resolved.sim.solver.initial_value = resolved.sim.weights.w_n();
    if (resolved.sources["sim.global_ref"] == "default")
        resolved.sim.global_ref = resolved.sim.weights.w_n();
    return resolved;
}

std::string manifest_to_json_text(const RunManifest& manifest) {
    nlohmann::json j;
    j["tool"] = {{"name", manifest.tool_name}, {"version", manifest.tool_version}};
    j["rng"] = manifest.rng;
    j["subcommand"] = manifest.subcommand;
    nlohmann::json config = nlohmann::json::object();
    for (const Field& f : field_registry()) config[f.key] = f.get(manifest.config);
    j["config"] = config;
    j["sources"] = manifest.config.sources;
    j["artifacts"] = manifest.artifacts;
    j["duration_seconds"] = manifest.duration_seconds;
    return j.dump(2) + "\n";
}

RunManifest manifest_from_json_text(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RunManifest m;
    m.tool_name = j.at("tool").at("name").get<std::string>();
    m.tool_version = j.at("tool").at("version").get<std::string>();
    m.rng = j.at("rng").get<std::string>();
    m.subcommand = j.at("subcommand").get<std::string>();
    for (const auto& [key, value] : j.at("config").items()) {
        const std::string v = value.get<std::string>();
        if (v.empty()) continue;  // unset list fields
        find_field(key).set(m.config, v);
    }
    m.config.sources = j.at("sources").get<std::map<std::string, std::string>>();
    m.artifacts = j.at("artifacts").get<std::vector<std::string>>();
    m.duration_seconds = j.at("duration_seconds").get<double>();
    return m;
}

void save_manifest(const RunManifest& manifest, const std::string& path) {
    write_text_file(path, manifest_to_json_text(manifest));
}

RunManifest load_manifest(const std::string& path) {
    return manifest_from_json_text(read_text_file(path));
}

}  // namespace abtrust
