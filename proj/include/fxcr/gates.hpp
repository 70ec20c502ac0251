// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "fxcr/types.hpp"

namespace fxcr {

// Basis order for two-qubit matrices: |00>, |01>, |10>, |11> with A first.
Mat2 rx(double angle);
Mat2 ry(double angle);
Mat2 rz(double angle);
// Rotation by `angle` about the equatorial axis at azimuth `axis`.
Mat2 r_axis(double axis, double angle);
Mat2 hadamard();
Mat4 kron(const Mat2& a, const Mat2& b);
Mat4 on_a(const Mat2& g);
Mat4 on_b(const Mat2& g);

Mat4 cx_pi();
Mat4 cnot();
// Phase on qubit A in |1>: diag(1, 1, e^{i t}, e^{i t}).
Mat4 z_on_a(double theta);
// Phase on qubit B in |1>: diag(1, e^{i t}, 1, e^{i t}).
Mat4 z_on_b(double theta);

// Block-diagonal CR gate with the phases it picks up on A and B.
Mat4 cr_experimental(double theta_a, double theta_b);

struct GateFrame {
    double theta_a = 0.0;
    double theta_b = 0.0;

    GateFrame reduced() const;
};

// Z^B(-tb/2) u Z^B(-tb/2) Z^A(tb/2 - ta)
Mat4 virtual_z_compose(const Mat4& u_exp, double theta_a, double theta_b);
inline Mat4 virtual_z_compose(const Mat4& u_exp, const GateFrame& f) {
    return virtual_z_compose(u_exp, f.theta_a, f.theta_b);
}

// Phases of a block-diagonal gate read in the CR form.
GateFrame frame_phases(const Mat4& u);

// Norm of the blocks coupling the A = 0 and A = 1 subspaces.
double off_block_norm(const Mat4& u);

// Average gate fidelity over the computational space,
//   F = (Tr(M M^dag) + |Tr M|^2) / (d (d + 1)),  M = target^dag * actual.
// Leaked amplitude lowers Tr(M M^dag) = d (1 - leakage), so the formula
// penalizes leakage without a separate term.
double average_gate_fidelity(const Mat4& actual, const Mat4& target);

// Same quantity for a channel given as a 16 x 16 superoperator S acting on
// row-major vectorized 4x4 operators, vec(rho)[4 i + j] = rho(i, j).
double average_gate_fidelity_channel(const CMat& superop, const Mat4& target);
CMat unitary_superop(const Mat4& u);
// Two-qubit depolarizing channel rho -> (1 - lambda) rho + lambda I / 4.
CMat depolarizing_superop(double lambda);
Mat4 apply_superop(const CMat& superop, const Mat4& rho);

// t_g / T_err with 1/T_err = (1/T1A + 1/T1B + 2/T2EA + 2/T2EB) / 5.
// Times in microseconds (infinity allowed), gate time in ns.
double coherence_limit(double t1_a, double t1_b, double t2e_a, double t2e_b, double gate_time_ns);

// Equality up to a global phase.
double phase_insensitive_distance(const CMat& a, const CMat& b);

}  // namespace fxcr
