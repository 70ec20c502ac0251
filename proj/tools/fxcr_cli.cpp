// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

// fxcr: scenario runner. Exit codes: 0 all checks pass, 1 a check failed,
// 2 invalid config or runtime error.

#include <cstdint>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fxcr/io.hpp"
#include "fxcr/scenario.hpp"

namespace {

int list_scenarios() {
    for (const auto& s : fxcr::scenario_catalog())
        std::cout << std::left << std::setw(15) << s.name << (s.stochastic ? "[seeded] " : "         ") << s.summary
                  << '\n';
    return 0;
}

int validate(const std::string& path) {
    const auto cfg = fxcr::validate_config(path);
    std::cout << "valid: scenario " << cfg.scenario << ", config hash " << fxcr::config_hash(cfg) << '\n';
    return 0;
}

int run(const std::string& path, const std::optional<std::string>& out, const std::optional<std::uint64_t>& seed,
        const std::optional<int>& jobs) {
    auto cfg = fxcr::validate_config(path);
    if (seed) cfg.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    const std::string dir = out.value_or(cfg.output_dir);
    const auto report = fxcr::run_scenario(cfg, dir);
    for (const auto& c : report.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << fxcr::fmt_num(c.value) << "  ["
                  << fxcr::fmt_num(c.lo) << ", " << fxcr::fmt_num(c.hi) << "]\n";
    std::cout << "outputs in " << dir << " (" << report.files.size() << " files), config hash "
              << fxcr::config_hash(cfg) << '\n';
    return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fxcr: fluxonium cross-resonance gate simulation and metrology"};
    app.require_subcommand(1);

    auto* list_cmd = app.add_subcommand("list-scenarios", "List available scenarios");

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Validate a scenario config");
    validate_cmd->add_option("--config", validate_path, "Config file (JSON)")->required();

    std::string run_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario");
    run_cmd->add_option("--config", run_path, "Config file (JSON)")->required();
    run_cmd->add_option("--out", out, "Output directory (overrides output_dir)");
    run_cmd->add_option("--seed", seed, "Master seed (overrides seed)");
    run_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (list_cmd->parsed()) return list_scenarios();
        if (validate_cmd->parsed()) return validate(validate_path);
        if (run_cmd->parsed()) return run(run_path, out, seed, jobs);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
