#include <iostream>
#include <optional>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "fhe/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fhe: fractional Hardy eigenvalue toolkit"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<long long> seed;
    bool quiet = false;
    app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "RNG seed (overrides the config)")->check(CLI::NonNegativeNumber);
    app.add_flag("--quiet", quiet, "suppress summaries and warnings");
    const std::pair<const char*, const char*> commands[] = {
        {"hardy-constant", "sharp Hardy constant over the [hardy] lattice (CSV)"},
        {"solve", "lambda_1 by descent, higher p = 2 eigenpairs from the pencil"},
        {"verify", "run every numerical check and write verify_report.txt"},
        {"check-weight", "admissibility proxies for the configured weight"},
        {"scaling-test", "Rayleigh quotient along dilations of a fixed bump"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? fhe::kExitOk : fhe::kExitValidation;
    }

    fhe::RunConfig cfg;
    try {
        if (!config_path.empty()) cfg = fhe::load_config(config_path);
    } catch (const fhe::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return fhe::kExitValidation;
    }
    if (seed) cfg.seed = static_cast<std::uint64_t>(*seed);

    fhe::CommandContext ctx;
    ctx.out_dir = out_dir;
    ctx.quiet = quiet;
    const std::string cmd = app.get_subcommands().front()->get_name();
    return fhe::run_command(cmd, cfg, ctx);
}
