// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fxcr/gates.hpp"
#include "fxcr/pulse.hpp"
#include "fxcr/spectrum.hpp"

namespace fxcr {

// Maps port amplitudes (C, C') to local amplitudes (eps_A, eps_B), GHz per unit.
using Crosstalk = Eigen::Matrix2cd;

// Asymmetric, diagonal-dominant placeholder. The device matrix is unknown.
Crosstalk default_crosstalk();

struct DriveConfig {
    double frequency = 0.0;  // GHz
    cplx port_c = 0.0;       // C
    cplx port_c2 = 0.0;      // C'
    Crosstalk crosstalk = Crosstalk::Identity();
    PulseEnvelope envelope;
    std::optional<ReflectionModel> reflection;
    double start = 0.0;  // ns, envelope offset; the carrier phase is referenced to t = 0

    void validate() const;
    // (eps_A, eps_B)
    std::pair<cplx, cplx> local_amplitudes() const;
    // Envelope as seen by the qubits (after the optional reflection channel).
    PulseEnvelope delivered_envelope() const;
};

struct CoherenceSpec {
    std::optional<double> t1_a, t1_b;          // us
    std::optional<double> t2e_a, t2e_b;        // us
    std::optional<double> t2star_a, t2star_b;  // us, informational
    std::optional<double> level2_t1, level2_t2;  // us, both qubits

    void validate() const;
    bool any() const;
};

// Table I midpoints.
CoherenceSpec table1_coherence();

struct IntegratorOptions {
    std::optional<double> step;  // ns; defaults to the largest allowed step
    bool record_states = true;
};

struct PropagationResult {
    std::vector<double> times;
    std::vector<CVec> states;      // pure runs, Schroedinger picture, dressed basis
    std::vector<CMat> densities;   // open runs
    RMat populations;              // times x 4 (00, 01, 10, 11)
    RVec leakage;                  // times
    double step = 0.0;
};

// Largest RK4 step allowed: min(0.05 / f_max, dt / 4), f_max the fastest
// frequency in the interaction-picture generator.
double max_step(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                const CoherenceSpec* coherence = nullptr);

PropagationResult propagate_schrodinger(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                                        const CVec& initial, const std::vector<double>& t_grid,
                                        const IntegratorOptions& options = {});

PropagationResult propagate_lindblad(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                                     const CMat& initial, const CoherenceSpec& coherence,
                                     const std::vector<double>& t_grid, const IntegratorOptions& options = {});

// Propagates several states from t0 to t1 in the rotating frame of the
// dressed eigenfrequencies (interaction picture); columns are states.
CMat propagate_frame_columns(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                             const CMat& initial, double t0, double t1, const IntegratorOptions& options = {});

struct GateResult {
    Mat4 u;           // computational block, framed
    Mat4 raw;         // computational block before virtual-Z framing
    double leakage = 0.0;
    CMat columns;     // full propagated columns in the rotating frame
};

GateResult extract_gate(const DressedSystem& system, const std::vector<DriveConfig>& drives, double gate_time,
                        const GateFrame& frame = {}, const IntegratorOptions& options = {});

// Open-system process on the computational block, as a 16 x 16 superoperator
// (row-major vectorization) in the rotating frame, before virtual-Z framing.
struct ProcessResult {
    CMat superop;
    double leakage = 0.0;
};
ProcessResult lindblad_process(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                               double gate_time, const CoherenceSpec& coherence,
                               const IntegratorOptions& options = {});
// Superoperator with the virtual-Z frame applied on both sides.
CMat frame_superop(const CMat& superop, const GateFrame& frame);

// Excited-state population of B versus (detuning, time) with A prepared in
// control_state. Each row is one detuning. The template envelope is replaced
// by a constant drive long enough for the time grid.
RMat chevron_scan(const DressedSystem& system, const DriveConfig& drive_template, const std::vector<double>& detunings,
                  const std::vector<double>& times, int control_state, const IntegratorOptions& options = {});

// Reduced Bloch vector of B in the rotating frame.
std::vector<std::array<double, 3>> bloch_trajectory(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                                                    const std::vector<double>& t_grid, int control_state,
                                                    const IntegratorOptions& options = {});

struct RabiFit {
    double frequency = 0.0;  // GHz
    double contrast = 0.0;
    double offset = 0.0;
    double phase = 0.0;
};
// Fit p(t) = offset - contrast/2 cos(2 pi f t + phase).
RabiFit fit_rabi(const std::vector<double>& times, const std::vector<double>& excited);

// Fidelity change of the four computational columns when the step is halved.
double step_doubling_check(const DressedSystem& system, const std::vector<DriveConfig>& drives, double gate_time,
                           const IntegratorOptions& options = {});

// Dressed basis vector for label (a, b).
CVec basis_state(const DressedSystem& system, int a, int b);

}  // namespace fxcr
