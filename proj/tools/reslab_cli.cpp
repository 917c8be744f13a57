#include "reslab/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

namespace {

struct RunFlags {
    std::string config;
    std::string out;
    unsigned threads = 0;
    std::uint64_t seed = 0;
};

void add_run_command(CLI::App& app, const std::string& kind, RunFlags& flags, std::string& selected) {
    auto* sub = app.add_subcommand(kind, "Run a " + kind + " experiment");
    sub->add_option("--config", flags.config, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output directory (overrides output_dir)");
    sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "Seed (overrides the config)");
    sub->callback([&selected, kind] { selected = kind; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Resonance experiments for Dirac operators with decaying potentials"};
    app.require_subcommand(1);
    RunFlags flags;
    std::string selected;
    for (const auto& kind : reslab::experiment_kinds()) add_run_command(app, kind, flags, selected);

    std::string manifest;
    auto* ver = app.add_subcommand("verify", "Check a manifest's hashes and stored invariants");
    ver->add_option("manifest", manifest, "Path to manifest.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (ver->parsed()) {
        const auto rep = reslab::verify(manifest);
        std::cout << rep.to_json().dump(2) << "\n";
        return rep.pass ? 0 : 1;
    }

    reslab::ConfigOverrides ov;
    ov.kind = selected;
    if (!flags.out.empty()) ov.output_dir = flags.out;
    if (flags.threads > 0) ov.threads = flags.threads;
    auto* sub = app.get_subcommand(selected);
    if (sub->count("--seed") > 0) ov.seed = flags.seed;

    const auto res = reslab::run_config_file(flags.config, ov);
    if (res.exit_code == 0) {
        std::cout << res.manifest.string() << "\n";
    } else {
        std::cerr << "error: " << res.message << "\n";
    }
    return res.exit_code;
}
