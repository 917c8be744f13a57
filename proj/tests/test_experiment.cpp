#include "reslab/errors.hpp"
#include "reslab/experiment.hpp"
#include "reslab/io.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace reslab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("reslab_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json equal_pair_config() {
    return {{"schema_version", 1},
            {"kind", "phasespace"},
            {"seed", 3},
            {"potentials", {{"v1", {{"kind", "gaussian"}, {"amplitude", 0.5}}}, {"v2", {{"kind", "gaussian"}, {"amplitude", 0.5}}}}},
            {"mu_grid", {{"lo", 0.05}, {"hi", 0.6}, {"step", 0.05}}},
            {"omega_grid", {{"lo", 1.05}, {"hi", 1.6}, {"step", 0.05}}}};
}

ConfigOverrides out_to(const fs::path& p) {
    ConfigOverrides o;
    o.output_dir = p;
    return o;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("io helpers") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_double(x)) == x);
    CsvTable t{{"a", "b"}, {{1.0, 0.1}, {-3.0, 1e-20}}};
    auto back = parse_csv(t.str());
    CHECK(back.header == t.header);
    CHECK(back.rows == t.rows);
    Manifest m;
    m.kind = "symbol";
    m.files.push_back({"x.csv", "00", 2});
    auto r = Manifest::from_json(m.to_json());
    CHECK(r.files.size() == 1);
    CHECK(r.files[0].path == "x.csv");
    CHECK_THROWS_AS(Manifest::from_json(json::object()), ConfigError);
}

TEST_CASE("config validation") {
    const auto dir = scratch("cfg");
    auto doc = equal_pair_config();
    CHECK_NOTHROW(parse_config(doc, dir, out_to(dir / "o")));
    auto no_seed = doc;
    no_seed.erase("seed");
    CHECK_THROWS_AS(parse_config(no_seed, dir, out_to(dir / "o")), ConfigError);
    auto stale = doc;
    stale["schema_version"] = 0;
    CHECK_THROWS_AS(parse_config(stale, dir, out_to(dir / "o")), ConfigError);
    ConfigOverrides wrong = out_to(dir / "o");
    wrong.kind = "symbol";
    CHECK_THROWS_AS(parse_config(doc, dir, wrong), ConfigError);
    auto bad_kind = doc;
    bad_kind["kind"] = "everything";
    CHECK_THROWS_AS(parse_config(bad_kind, dir, out_to(dir / "o")), ConfigError);
    CHECK_THROWS_AS(parse_config(doc, dir, {}), ConfigError);  // no output directory
}

TEST_CASE("hash ignores thread count and output directory") {
    const auto dir = scratch("hash");
    auto a = parse_config(equal_pair_config(), dir, out_to(dir / "a"));
    auto doc = equal_pair_config();
    doc["threads"] = 4;
    auto b = parse_config(doc, dir, out_to(dir / "b"));
    CHECK(a.text == b.text);
    doc["seed"] = 4;
    CHECK(parse_config(doc, dir, out_to(dir / "b")).text != a.text);
}

TEST_CASE("identical potentials give all-zero distributions") {
    const auto dir = scratch("equal");
    auto res = run(parse_config(equal_pair_config(), dir, out_to(dir / "out")));
    REQUIRE(res.exit_code == 0);
    CHECK(fs::exists(res.manifest));
    auto t = parse_csv(read_file(dir / "out" / "distributions.csv"));
    const auto mu = std::find(t.header.begin(), t.header.end(), "mu") - t.header.begin();
    const auto nu = std::find(t.header.begin(), t.header.end(), "nu") - t.header.begin();
    for (const auto& row : t.rows) {
        CHECK(row[mu] == 0.0);
        CHECK(row[nu] == 0.0);
    }
}

TEST_CASE("missing potential file exits 2 without outputs") {
    const auto dir = scratch("missing");
    auto doc = equal_pair_config();
    doc["potentials"]["v2"] = {{"kind", "table"}, {"file", "absent.csv"}};
    doc["output_dir"] = "out";
    std::ofstream(dir / "config.json") << doc.dump();
    auto res = run_config_file(dir / "config.json");
    CHECK(res.exit_code == 2);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("numerical failure exits 3 with diagnostics") {
    const auto dir = scratch("numerical");
    json doc = {{"schema_version", 1},
                {"kind", "fbi"},
                {"seed", 1},
                {"signal", {{"kind", "heaviside"}, {"step", 0.05}}},
                {"scan", {{"lo", -0.5}, {"hi", 0.5}, {"step", 0.1}}}};
    auto res = run(parse_config(doc, dir, out_to(dir / "out")));
    CHECK(res.exit_code == 3);
    CHECK(fs::exists(dir / "out" / "diagnostics.json"));
    CHECK_FALSE(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("verify: untouched, edited and stale manifests") {
    const auto dir = scratch("verify");
    auto res = run(parse_config(equal_pair_config(), dir, out_to(dir / "out")));
    REQUIRE(res.exit_code == 0);
    CHECK(verify(res.manifest).pass);

    {
        std::ofstream f(dir / "out" / "omega.csv", std::ios::app);
        f << "9,9,9,9\n";
    }
    auto rep = verify(res.manifest);
    CHECK_FALSE(rep.pass);
    CHECK(rep.mismatched == std::vector<std::string>{"omega.csv"});

    auto m = json::parse(read_file(res.manifest));
    m["schema_version"] = 0;
    write_file(res.manifest, m.dump());
    rep = verify(res.manifest);
    CHECK_FALSE(rep.pass);
    REQUIRE_FALSE(rep.messages.empty());
    CHECK(rep.messages.front().find("stale") != std::string::npos);
    CHECK(rep.messages.front().find("re-run") != std::string::npos);
}

TEST_CASE("repeated runs are byte identical") {
    const auto dir = scratch("determinism");
    auto cfg = equal_pair_config();
    cfg["kind"] = "symbol";
    cfg["xi"] = {{"lo", 20}, {"hi", 2000}, {"n", 12}};
    auto a = run(parse_config(cfg, dir, out_to(dir / "a")));
    auto b = run(parse_config(cfg, dir, out_to(dir / "b")));
    INFO(a.message);
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    for (const auto& e : fs::directory_iterator(dir / "a"))
        CHECK(read_file(e.path()) == read_file(dir / "b" / e.path().filename()));
}

TEST_CASE("shipped configs parse") {
    for (const auto& e : fs::directory_iterator(RESLAB_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        CHECK_NOTHROW(load_config(e.path()));
    }
}

}
