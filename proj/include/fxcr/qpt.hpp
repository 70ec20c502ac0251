// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fxcr/clifford.hpp"
#include "fxcr/gates.hpp"
#include "fxcr/readout.hpp"

namespace fxcr {

// Two-qubit Pauli basis, index 4 a + b for P_a (A) x P_b (B), order I X Y Z.
const std::array<Mat4, 16>& pauli_basis();
std::string pauli_label(int index);

// rho_out = sum_mn chi(m, n) P_m rho P_n^dag
struct ProcessMatrix {
    CMat chi;              // 16 x 16, Hermitian-symmetrized, unit trace
    double fidelity = 0.0;  // process fidelity vs target
    double min_eigenvalue = 0.0;
    double raw_trace = 0.0;  // trace before normalization
};

// Gate pairs (A, B) for input preparation and pre-readout rotation; nullopt is identity.
using TomoPair = std::pair<std::optional<Pulse>, std::optional<Pulse>>;
const std::vector<TomoPair>& preparation_pairs();  // 36
const std::vector<TomoPair>& prerotation_pairs();   // 29

struct QptOptions {
    Mat4 target = cx_pi();
    // Joint-readout mode: one averaged voltage per (input, pre-rotation).
    std::optional<ReadoutModel> readout;
    std::uint64_t seed = 1;
    bool psd_projection = false;
};

// Reconstructs the process of a 16 x 16 row-major superoperator.
// Throws ProtocolError when either design matrix is rank deficient.
ProcessMatrix qpt(const CMat& superop, const QptOptions& options = {});

// Least-squares density matrix from measured data, trace fixed to one.
Mat4 state_tomography_populations(const std::vector<std::array<double, 4>>& pops);
Mat4 state_tomography_voltages(const std::vector<cplx>& voltages, const ReadoutModel& model);

CMat chi_from_unitary(const Mat4& u);
CMat superop_from_chi(const CMat& chi);
double process_fidelity(const CMat& chi, const Mat4& target);
// Eigenvalue clipping at zero followed by renormalization to unit trace.
CMat project_psd(const CMat& chi);

}  // namespace fxcr
