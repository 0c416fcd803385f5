#pragma once

#include "abtrust/simnet.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace abtrust {

inline constexpr const char* kToolName = "abtrust";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kRngName = "splitmix64+xoshiro256**";

/// Run-level options layered on top of SimConfig.
struct RunSettings {
    int trials = 10;
    int jobs = 0;  // 0 = hardware concurrency
    std::string out_dir = "results";
    std::vector<Algorithm> algorithms = {Algorithm::Absolute};
    std::vector<double> values;  // empty = scenario defaults
};

/// Flat INI with section headers; keys come back as "section.key".
std::map<std::string, std::string> parse_ini_file(const std::string& path);
std::map<std::string, std::string> parse_ini_text(const std::string& text,
                                                  const std::string& origin);

struct ResolvedConfig {
    SimConfig sim;
    RunSettings run;
    std::map<std::string, std::string> sources;  // key -> default|config_file|command_line
};

/// Layers built-in defaults, then the config file, then command-line
/// overrides, recording the winning source per field. Unset initial_value and
/// global_ref derive from the resolved weights as (w_g + w_b) / 2.
ResolvedConfig resolve_config(const std::map<std::string, std::string>& cli_overrides,
                              const std::optional<std::string>& config_path);

/// All recognized "section.key" field names.
std::vector<std::string> config_field_names();

struct RunManifest {
    std::string tool_name = kToolName;
    std::string tool_version = kToolVersion;
    std::string rng = kRngName;
    std::string subcommand;
    ResolvedConfig config;
    std::vector<std::string> artifacts;
    double duration_seconds = 0.0;
};

std::string manifest_to_json_text(const RunManifest& manifest);
RunManifest manifest_from_json_text(const std::string& text);

void save_manifest(const RunManifest& manifest, const std::string& path);
RunManifest load_manifest(const std::string& path);

}  // namespace abtrust
