// mmgeo: run one experiment and write its JSON/CSV reports.
//
//   mmgeo <command> [--config FILE] [--seed N] [--out DIR] [--format json|csv|both] [--long-running]
//   mmgeo run --config FILE        (command taken from the config or report)
//   mmgeo defaults <command>       (print the default config)
//   mmgeo list

#include "mmgeo/experiments.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometry of multi-modal contrastive spaces: experiments and reports"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "reports", format = "both";
    std::uint64_t seed = 0;
    bool long_running = false;

    auto add_run_flags = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Flat JSON config, or a previous report to replay");
        sub->add_option("--seed", seed, "Override the config's seed");
        sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
        sub->add_option("--format", format, "json, csv or both")
            ->check(CLI::IsMember({"json", "csv", "both"}))
            ->capture_default_str();
        sub->add_flag("--long-running", long_running, "Full-size reproductions (may take hours)");
    };

    std::string command;
    for (const std::string& name : mmgeo::command_names()) {
        auto* sub = app.add_subcommand(name, "Run the " + name + " experiment");
        add_run_flags(sub);
        sub->callback([&command, name] { command = name; });
    }
    auto* run = app.add_subcommand("run", "Run the command named inside --config");
    add_run_flags(run);
    run->callback([&command] { command = "run"; });

    std::string defaults_for;
    auto* defaults = app.add_subcommand("defaults", "Print a command's default config");
    defaults->add_option("command", defaults_for)->required();
    auto* list = app.add_subcommand("list", "List commands");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const auto& name : mmgeo::command_names()) std::cout << name << '\n';
            return 0;
        }
        if (defaults->parsed()) {
            std::cout << mmgeo::default_config(defaults_for) << '\n';
            return 0;
        }

        const std::string config_text = config_path.empty() ? std::string{} : slurp(config_path);
        if (command == "run") {
            const auto named = mmgeo::command_in_config(config_text);
            if (!named) throw std::runtime_error("config does not name a command");
            command = *named;
        }

        mmgeo::RunOptions options;
        if (app.get_subcommands().front()->count("--seed")) options.seed = seed;
        options.long_running = long_running;

        const auto start = std::chrono::steady_clock::now();
        const mmgeo::Report report = mmgeo::run_experiment(command, config_text, options);
        const auto files = mmgeo::write_report(report, out_dir, mmgeo::parse_output_format(format));
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        for (const auto& c : report.checks)
            std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  (" + c.detail + ")")
                      << '\n';
        for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
        std::cerr << command << " finished in " << secs << " s\n";
        return report.passed ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
