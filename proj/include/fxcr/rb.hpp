// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fxcr/clifford.hpp"
#include "fxcr/readout.hpp"

namespace fxcr {

// Gate-level noise for RB. Without cx_superop, each Clifford is its ideal
// unitary followed by two-qubit depolarizing with `clifford_depolarizing`.
// With cx_superop, Cliffords are played op by op from their decomposition,
// with the given channel at every CX slot and ideal single-qubit pulses.
struct RbChannel {
    double clifford_depolarizing = 0.0;
    std::optional<CMat> cx_superop;
    // Channel applied for each interleaved gate; defaults to its ideal unitary.
    std::optional<CMat> interleaved_superop;
};

struct RbOptions {
    std::vector<std::size_t> lengths;
    int sequences = 40;
    std::uint64_t seed = 1;
    std::optional<Mat4> interleave;
    // 0: exact populations; otherwise P(00) is sampled with this many shots.
    int shots = 0;
    // Realistic mode: populations read through the joint-readout pipeline.
    std::optional<ReadoutModel> readout;
    int jobs = 1;
};

struct RbResult {
    std::vector<std::size_t> lengths;
    std::vector<double> mean;
    std::vector<double> stderr_;
    std::vector<std::vector<double>> raw;  // per length, per sequence
    double a = 0.0, p = 1.0, b = 0.0;
    RMat covariance;  // (A, p, B)
    double epc = 0.0;
    double epc_sigma = 0.0;
    bool fit_ok = false;
};

// Carries the raw decays of a failed fit.
struct RbFitError : FitError {
    RbFitError(const std::string& what, RbResult partial);
    RbResult result;
};

// Fits the per-length means to F = A p^m + B without constraints. A flat
// decay returns p = 1, A = 0. Throws RbFitError on divergence or p outside [0, 1].
RbResult fit_rb(const std::vector<std::size_t>& lengths, const std::vector<std::vector<double>>& raw);

RbResult run_rb(const RbChannel& channel, const RbOptions& options);

// (1 - EPC_int) / (1 - EPC_ref). With an idle-interleaved run as the second
// argument this is the idle fidelity.
double irb_fidelity(const RbResult& reference, const RbResult& interleaved);
double irb_fidelity(double epc_reference, double epc_interleaved);

// Two-qubit depolarizing strength giving the requested error per Clifford.
inline double depolarizing_for_epc(double epc) { return 4.0 * epc / 3.0; }

}  // namespace fxcr
