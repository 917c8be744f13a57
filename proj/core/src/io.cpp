#include "reslab/io.hpp"

#include "reslab/errors.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace reslab {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& r : rows) {
        if (r.size() != header.size()) throw ConfigError("CSV row width does not match the header");
        for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_double(r[i]);
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty CSV");
    {
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) t.header.push_back(cell);
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ConfigError("non-numeric CSV cell '" + cell + "'");
            }
        }
        if (row.size() != t.header.size()) throw ConfigError("CSV row width does not match the header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 || EVP_DigestFinal_ex(ctx.get(), md, &len) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& bytes) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << bytes;
    if (!out) throw std::runtime_error("write failed for " + p.string());
}

json Manifest::to_json() const {
    json fs = json::array();
    for (const auto& f : files) fs.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    return {{"schema_version", schema_version}, {"kind", kind}, {"config_sha256", config_sha256}, {"files", fs}};
}

Manifest Manifest::from_json(const json& j) {
    try {
        Manifest m;
        m.schema_version = j.at("schema_version").get<int>();
        m.kind = j.at("kind").get<std::string>();
        m.config_sha256 = j.value("config_sha256", "");
        for (const auto& f : j.at("files"))
            m.files.push_back({f.at("path").get<std::string>(), f.at("sha256").get<std::string>(),
                               f.at("bytes").get<std::size_t>()});
        return m;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed manifest: ") + e.what());
    }
}

Manifest write_artifacts(const std::filesystem::path& dir, const std::string& kind, const std::string& config_text,
                         const std::map<std::string, std::string>& artifacts) {
    Manifest m;
    m.kind = kind;
    m.config_sha256 = sha256_hex(config_text);
    for (const auto& [name, bytes] : artifacts) {
        if (name == "manifest.json") throw ConfigError("artifact name collides with the manifest");
        write_file(dir / name, bytes);
        m.files.push_back({name, sha256_hex(bytes), bytes.size()});
    }
    write_file(dir / "manifest.json", dump_json(m.to_json()));
    return m;
}

}  // namespace reslab
