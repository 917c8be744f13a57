#pragma once

#include <json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace reslab {

inline constexpr int kSchemaVersion = 1;

// Shortest text that reads back to the same double ("%.17g").
std::string format_double(double x);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string str() const;
};

// Parse a numeric CSV produced by CsvTable::str.
CsvTable parse_csv(const std::string& text);

// Pretty JSON with sorted keys and a trailing newline.
std::string dump_json(const nlohmann::json& j);

std::string sha256_hex(const std::string& bytes);
std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& bytes);

struct ManifestEntry {
    std::string path;  // relative to the manifest directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct Manifest {
    int schema_version = kSchemaVersion;
    std::string kind;
    std::string config_sha256;
    std::vector<ManifestEntry> files;
    nlohmann::json to_json() const;
    static Manifest from_json(const nlohmann::json& j);
};

// Write every artifact, then manifest.json listing them with content hashes.
Manifest write_artifacts(const std::filesystem::path& dir, const std::string& kind, const std::string& config_text,
                         const std::map<std::string, std::string>& artifacts);

}  // namespace reslab
