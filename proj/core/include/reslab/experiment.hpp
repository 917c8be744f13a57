#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace reslab {

// Experiment kinds accepted in the "kind" field.
const std::vector<std::string>& experiment_kinds();

struct ExperimentConfig {
    std::string kind;
    nlohmann::json raw;                   // full config document
    std::filesystem::path base_dir;       // directory of the config file; relative paths resolve here
    std::filesystem::path output_dir;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    std::string text;                     // canonical serialization, hashed into the manifest
};

struct ConfigOverrides {
    std::optional<std::string> kind;      // subcommand; must match "kind" when both are given
    std::optional<std::filesystem::path> output_dir;
    std::optional<unsigned> threads;
    std::optional<std::uint64_t> seed;
};

// Parse and validate; throws ConfigError on any schema violation or missing referenced file.
ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides = {});
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                              const ConfigOverrides& overrides = {});

// Compute all artifacts in memory (no files touched).
std::map<std::string, std::string> compute_artifacts(const ExperimentConfig& cfg);

struct RunResult {
    int exit_code = 0;  // 0 success, 2 configuration error, 3 numerical failure
    std::filesystem::path manifest;
    std::string message;
};

// Run the pipeline and write artifacts plus manifest.json; on numerical failure write diagnostics.json.
RunResult run(const ExperimentConfig& cfg);
// Load, validate and run; configuration errors never create output files.
RunResult run_config_file(const std::filesystem::path& path, const ConfigOverrides& overrides = {});

struct VerifyReport {
    bool pass = false;
    std::vector<std::string> mismatched;  // files whose hash changed or that are missing
    std::vector<std::string> messages;
    nlohmann::json to_json() const;
};

VerifyReport verify(const std::filesystem::path& manifest_path);

}  // namespace reslab
