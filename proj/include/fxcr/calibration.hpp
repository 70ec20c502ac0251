// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fxcr/dynamics.hpp"
#include "fxcr/readout.hpp"

namespace fxcr {

// The seven tuned quantities of the CX_pi gate plus bookkeeping.
struct CXCalibration {
    cplx eta = 0.0;           // C' / C
    cplx common_amp = 0.0;    // C
    double cr_detuning = 0.0;  // GHz, offset from E11 - E10
    double cr_angle = 0.0;     // rad, extra phase on C
    double theta_a = 0.0;      // rad
    double theta_b = 0.0;      // rad
    double gate_time = 70.0;   // ns
    double stark_shift = 0.0;  // GHz
    double ramp = 6.0;         // ns
    double dt = 1.0;           // ns
    Crosstalk crosstalk = default_crosstalk();
    std::optional<ReflectionModel> reflection;

    void validate() const;
    GateFrame frame() const { return {theta_a, theta_b}; }
};

// Drive realized by a calibration: rounded square with two ramps, carrier
// at E11 - E10 + cr_detuning, ports (C e^{i angle}, eta C e^{i angle}).
DriveConfig cx_drive(const DressedSystem& system, const CXCalibration& calib);
// Propagation window: gate_time, or longer if echoes outlast the pulse.
double cx_window(const DressedSystem& system, const CXCalibration& calib);
GateResult evaluate_cx(const DressedSystem& system, const CXCalibration& calib, const IntegratorOptions& options = {});

std::string calibration_to_json(const CXCalibration& calib);
CXCalibration calibration_from_json(const std::string& text);

// First-order ratio C'/C that cancels <01|H_drive|00>.
cplx first_order_darkening(const DressedSystem& system, const Crosstalk& crosstalk);

struct DarkeningOptions {
    Crosstalk crosstalk = default_crosstalk();
    double flat = 58.0;  // ns
    double ramp = 6.0;   // ns
    double scan_span = 0.2;  // relative |eta| and absolute arg eta (rad) half-width
    int scan_points = 11;
    double target = 1e-7;  // final |<01|psi(T)>| from |00>
    int max_newton = 12;
    IntegratorOptions integrator;
};

struct DarkeningResult {
    cplx eta;
    cplx first_order;
    double off_amplitude = 0.0;  // |<01|psi(T)>| at eta
    std::vector<std::array<double, 2>> magnitude_scan;  // (|eta|, |<01|psi(T)>|)
    std::vector<std::array<double, 2>> phase_scan;      // (arg eta, |<01|psi(T)>|)
};

// OFF-state darkening ratio from driven dynamics: 1D scans in |eta| and
// arg eta followed by a complex Newton refinement of <01|psi(T)>.
DarkeningResult find_darkening_ratio_detailed(const DressedSystem& system, double drive_freq, cplx amplitude,
                                              const DarkeningOptions& options = {});
cplx find_darkening_ratio(const DressedSystem& system, double drive_freq, cplx amplitude,
                          const DarkeningOptions& options = {});

// Dressed drive operator K-mapped from ports (1, ratio): eps_A N_A + eps_B N_B.
CMat port_drive_operator(const DressedSystem& system, const Crosstalk& crosstalk, cplx ratio);

// Effective Hamiltonian of a computational 2x2 block of the propagator
// (its closest unitary, so the result is Hermitian),
// i log(U) / (2 pi T), in GHz.
Mat2 effective_block_hamiltonian(const Mat4& u, int block, double duration);

// Common amplitude C (for ratio eta) that gives effective strength
// |eps_A| |<0|n_B|1>| = strength.
cplx amplitude_for_strength(const DressedSystem& system, const Crosstalk& crosstalk, cplx eta, double strength);

// Single-qubit B drive ratio equalizing <00|H|01> and <10|H|11>.
cplx find_single_qubit_ratio(const DressedSystem& system, const Crosstalk& crosstalk = default_crosstalk());

// Seven tuned parameters, in loop order.
enum class CalParam { EtaMag, EtaArg, AmpMag, Detuning, Angle, ThetaB, ThetaA };
inline constexpr std::array<CalParam, 7> kCalParams{CalParam::EtaMag,   CalParam::EtaArg, CalParam::AmpMag,
                                                    CalParam::Detuning, CalParam::Angle,  CalParam::ThetaB,
                                                    CalParam::ThetaA};
const char* cal_param_name(CalParam p);
double get_param(const CXCalibration& c, CalParam p);
void set_param(CXCalibration& c, CalParam p, double value);

struct SyndromeEntry {
    CalParam param{};
    char sequence = 'a';  // Fig. 9 label
    double current = 0.0;
    double crossing = 0.0;
    double slope = 0.0;  // d(P+ - P-)/d(param) at the crossing
    int repetitions = 1;
    double window = 0.0;
};

struct SyndromeReport {
    std::vector<SyndromeEntry> entries;
    const SyndromeEntry& at(CalParam p) const;
};

struct SyndromeOptions {
    // Half-widths of the parameter sweeps.
    double amp_window = 0.05;       // relative
    double detuning_window = 1e-3;  // GHz
    double angle_window = 0.1;      // rad
    int points = 3;
    int widen_retries = 3;
    // Optional joint-readout measurement with shot noise.
    std::optional<ReadoutModel> readout;
    std::uint64_t seed = 1;
    IntegratorOptions integrator;
};

// Default repetitions per parameter: odd for pulse parameters, even for theta_A.
std::array<int, 7> default_repetitions(int n);

// Sweeps each parameter independently around `calib` and locates the crossing
// of its sequence pair. The theta_A repetition count must be even.
SyndromeReport syndrome_experiments(const DressedSystem& system, const CXCalibration& calib, int repetitions,
                                    const SyndromeOptions& options = {});
SyndromeReport syndrome_experiments(const DressedSystem& system, const CXCalibration& calib,
                                    const std::array<int, 7>& repetitions, const SyndromeOptions& options = {});

// D = P(+) - P(-) of one parameter's sequence pair for a framed gate.
double syndrome_signal(const Mat4& gate, CalParam param, int repetitions);
char syndrome_label(CalParam param);

struct CalibrationOptions {
    Crosstalk crosstalk = default_crosstalk();
    double ramp = 6.0;
    std::optional<ReflectionModel> reflection;
    std::optional<CXCalibration> start;  // skip the coarse stage
    int repetitions = 3;
    int max_iterations = 12;
    int min_iterations = 4;
    // Convergence: every crossing moves less than these.
    double amp_tol = 2e-5;       // relative
    double detuning_tol = 2e-6;  // GHz
    double angle_tol = 2e-5;     // rad
    SyndromeOptions syndrome;
    IntegratorOptions integrator;
};

struct CalibrationOutcome {
    CXCalibration calibration;
    std::vector<std::array<double, 7>> history;  // parameters after each iteration
    SyndromeReport last_report;
    int iterations = 0;
    bool converged = false;
    double coherent_error = 0.0;  // 1 - F_avg vs CX_pi, noiseless
    double leakage = 0.0;
    std::optional<double> total_error;  // with coherence
};

CalibrationOutcome calibrate_cx(const DressedSystem& system, double gate_time,
                                const std::optional<CoherenceSpec>& coherence = std::nullopt,
                                const CalibrationOptions& options = {});

// Differential second-order Stark shift of A's frequency (A = 0 minus A = 1
// averaged over B) from the off-resonant parts of a CR drive, GHz.
double stark_shift_estimate(const DressedSystem& system, const DriveConfig& drive);

}  // namespace fxcr
