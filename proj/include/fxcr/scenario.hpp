// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fxcr/dynamics.hpp"
#include "fxcr/pulse.hpp"
#include "fxcr/spectrum.hpp"

namespace fxcr {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

struct DriveSettings {
    double gate_time = 70.0;  // ns
    double ramp = 6.0;        // ns
    double dt = 1.0;          // ns
    double strength = 0.09;   // GHz, |eps_A| |<0|n_B|1>|
    Crosstalk crosstalk = default_crosstalk();
    ReflectionModel reflection;  // empty: ideal line
};

struct SweepSettings {
    std::vector<double> gate_times{50, 60, 70, 80, 100};  // ns
    std::vector<double> detunings;                         // GHz
    std::vector<double> times;                             // ns
    std::vector<double> lengths{1, 2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100};
    int sequences = 40;
    int shots = 0;
    double epc = 0.0215;
    double cx_depolarizing = 0.0068;
    double idle_depolarizing = 0.002;
    double readout_noise = 0.0;  // per-shot voltage sigma
    double excited_population = 0.01;
    double cx_fidelity = 0.99;
    double level2_lifetime = 1.0;  // us; <= 0 skips the |2> run
    Echo hidden_echo{15.0, {0.2, 0.0}};
};

struct ScenarioConfig {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string output_dir = "fxcr_out";
    int jobs = 1;
    CoupledParams system = table1_params();
    DriveSettings drive;
    bool coherence_enabled = true;
    CoherenceSpec coherence = table1_coherence();
    SweepSettings sweep;
};

struct ScenarioInfo {
    std::string name;
    std::string summary;
    bool stochastic = false;
};
const std::vector<ScenarioInfo>& scenario_catalog();

// Parses and validates; throws ConfigError listing every violation, one per line.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig validate_config(const std::string& path);
// Fully resolved config (defaults filled in) as stable JSON text.
// The hash leaves out jobs and output_dir, which do not affect outputs.
std::string config_to_json(const ScenarioConfig& config);
std::string config_hash(const ScenarioConfig& config);

struct Check {
    std::string name;
    double value = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool pass = false;
};

struct ScenarioReport {
    std::vector<Check> checks;
    std::vector<std::string> files;  // relative to the output directory
    bool passed() const;
};

// Writes outputs and manifest.json into out_dir (created if missing).
ScenarioReport run_scenario(const ScenarioConfig& config, const std::string& out_dir);

}  // namespace fxcr
