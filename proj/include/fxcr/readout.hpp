// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "fxcr/rng.hpp"
#include "fxcr/types.hpp"

namespace fxcr {

// Pre-readout pi pulses: none, on B, on A, on both.
enum class PreRotation { II = 0, IX = 1, XI = 2, XX = 3 };
PreRotation parse_prerotation(const std::string& label);

using Voltages = std::array<cplx, 4>;  // II, IX, XI, XX

// Populations p00, p01, p10, p11.
struct PopulationVector {
    std::array<double, 4> p{1.0, 0.0, 0.0, 0.0};

    // Checks nonnegativity and unit sum (1e-9).
    static PopulationVector make(const std::array<double, 4>& p);
    // Uncorrelated product of excited populations e (A) and eps (B).
    static PopulationVector product(double e_a, double e_b);
    static PopulationVector basis(int index);
};

struct ReadoutModel {
    std::array<cplx, 4> m;     // M00, M01, M10, M11
    double noise_sigma = 0.0;  // per-shot std of each quadrature
    int shots = 1;

    void validate() const;
    // Row r = pre-rotation, column c = population index: M[r xor c].
    Mat4 mapping() const;
};

// Synthetic unit-magnitude voltages with well separated phases.
ReadoutModel default_readout_model();

// Permutation-structured matrix built from a 4-vector: entry (r, c) = v[r xor c].
Mat4 permutation_matrix(const std::array<cplx, 4>& v);

// Averaged voltage; noise is added only when rng is given and sigma > 0.
cplx simulate_voltage(const PopulationVector& p, const ReadoutModel& model, PreRotation prerot, Rng* rng = nullptr);
Voltages simulate_voltages(const PopulationVector& p, const ReadoutModel& model, Rng* rng = nullptr);

struct InvertedPopulation {
    std::array<double, 4> p{};
    double imag_residual = 0.0;  // max |Im| of M^-1 V
    bool negative = false;       // flagged, not clamped
};

InvertedPopulation invert_population(const Voltages& v, const ReadoutModel& model);
// Euclidean projection onto the probability simplex.
std::array<double, 4> project_to_simplex(const std::array<double, 4>& p);

// M = P^-1 V for a known (imperfect) initial population.
std::array<cplx, 4> calibrate_m(const PopulationVector& p_init, const Voltages& v);

// Measured populations of a state through the joint-readout pipeline.
std::array<double, 4> measure_populations(const std::array<double, 4>& p, const ReadoutModel& model, Rng& rng);

struct ControlPopulation {
    cplx from_cd;  // ((c) - (d)) / ((a) + (b) + (c) - (d))
    cplx from_ab;  // ((a) - (b)) / ((a) - (b) + (c) + (d))
    double mean = 0.0;  // mean of the real parts
};

ControlPopulation control_population(cplx a, cplx b, cplx c, cplx d);

// Ramsey-type sequences on B that reveal the excited population of A:
// (a) Ramsey, (b) CX in the middle, (c) Ramsey then X_pi on A,
// (d) CX in the middle then X_pi on A. The second pi/2 pulse has phase phi.
enum class PopulationSequence { A, B, C, D };

// Ideal gate list of one sequence; `cx` marks the entangling slot.
struct SequenceStep {
    bool is_cx = false;
    Mat4 gate = Mat4::Identity();
};
std::vector<SequenceStep> population_sequence(PopulationSequence which, double phi);

// Contrast (twice the first Fourier cosine component of V(phi)) for each of
// the four sequences, simulated on density matrices. The CX slot applies
// `cx_superop` (16 x 16, row-major vectorization); readout is II.
std::array<cplx, 4> population_contrasts(const PopulationVector& initial, const CMat& cx_superop,
                                         const ReadoutModel& model, int phase_points = 16, Rng* rng = nullptr);

// CNOT with B as control, built as H_A H_B CNOT H_A H_B.
Mat4 reversed_cnot();

}  // namespace fxcr
