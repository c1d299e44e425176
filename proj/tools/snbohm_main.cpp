#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "snbohm/cli_runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"snbohm: Schrodinger-Newton evolution, Bohmian trajectory congruences, "
                 "and gravitational critical-width analysis"};
    app.require_subcommand(1);

    std::string run_config;
    auto* run_cmd = app.add_subcommand("run", "run a scenario from a config file");
    run_cmd->add_option("config", run_config, "path to key = value config file")->required();

    std::string validate_config;
    auto* val_cmd = app.add_subcommand("validate", "check a config without computing");
    val_cmd->add_option("config", validate_config, "path to config file")->required();

    auto* list_cmd = app.add_subcommand("list-scenarios", "print the known scenarios");

    CLI11_PARSE(app, argc, argv);

    if (run_cmd->parsed()) return snbohm::cli::run(run_config);

    if (val_cmd->parsed()) {
        const auto report = snbohm::cli::validate_file(validate_config);
        for (const auto& issue : report.issues) {
            const char* tag =
                issue.kind == snbohm::cli::Issue::Kind::error ? "error" : "warning";
            std::cout << tag << " " << issue.code << ": " << issue.message << "\n";
        }
        return report.ok() ? 0 : 2;
    }

    if (list_cmd->parsed()) {
        for (const auto& name : snbohm::cli::list_scenarios()) std::cout << name << "\n";
        return 0;
    }
    return 0;
}
