#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"
#include "commands.hpp"
#include "rydmagic/parallel.hpp"

int main(int argc, char** argv)
{
    using namespace rydmagic::cli;

    CLI::App app{"rydmagic: non-stabilizerness of PXP and Rydberg chain states"};
    app.set_version_flag("--version", std::string(RYDMAGIC_VERSION));
    std::string command, config_path, out = "rydmagic_out";
    uint64_t seed = 1;
    int threads = rydmagic::default_threads();
    bool resume = false;
    std::vector<std::string> overrides;

    std::string names;
    for (const auto& n : command_names())
        names += (names.empty() ? "" : ", ") + n;
    app.add_option("--command", command, "One of: " + names)->required()->check(CLI::IsMember(command_names()));
    app.add_option("--config", config_path, "Flat 'key = value' configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Seed recorded in every output")->capture_default_str();
    app.add_option("--threads", threads, "Worker threads (default: available cores)")->check(CLI::PositiveNumber);
    app.add_flag("--resume", resume, "Continue from the checkpoint in --out");
    app.add_option("--set", overrides, "Override a config key, key=value (repeatable)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunContext ctx;
        ctx.command = command;
        ctx.seed = seed;
        ctx.threads = threads;
        ctx.resume = resume;
        ctx.out = out;
        if (!config_path.empty())
            ctx.config = Config::load(config_path);
        for (const auto& kv : overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos || eq == 0)
                throw InvalidConfig("--set expects key=value, got " + kv);
            ctx.config.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        return run_command(ctx);
    } catch (const InvalidConfig& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
