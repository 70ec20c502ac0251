// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/qpt.hpp"

#include <algorithm>

#include "fxcr/rng.hpp"

namespace fxcr {

namespace {

const std::array<Mat2, 4>& single_paulis() {
    static const std::array<Mat2, 4> p = [] {
        std::array<Mat2, 4> s;
        s[0] = Mat2::Identity();
        s[1] << 0, 1, 1, 0;
        s[2] << 0, -kI, kI, 0;
        s[3] << 1, 0, 0, -1;
        return s;
    }();
    return p;
}

const std::array<std::optional<Pulse>, 6>& tomo_gates() {
    static const std::array<std::optional<Pulse>, 6> g{std::nullopt, Pulse::X90, Pulse::Xm90,
                                                       Pulse::X180, Pulse::Y90, Pulse::Ym90};
    return g;
}

Mat2 gate_of(const std::optional<Pulse>& p) { return p ? pulse_unitary(*p) : Mat2::Identity(); }
Mat4 pair_unitary(const TomoPair& pr) { return kron(gate_of(pr.first), gate_of(pr.second)); }

// c(k, j) = Tr(Pi_k R P_j R^dag) / 4 for j = 1..15, rows per pre-rotation.
RMat population_design() {
    const auto& pre = prerotation_pairs();
    const auto& paulis = pauli_basis();
    RMat d(static_cast<int>(4 * pre.size()), 15);
    for (std::size_t r = 0; r < pre.size(); ++r) {
        const Mat4 u = pair_unitary(pre[r]);
        for (int j = 1; j < 16; ++j) {
            const Mat4 rotated = u * paulis[j] * u.adjoint();
            for (int k = 0; k < 4; ++k) d(static_cast<int>(4 * r) + k, j - 1) = rotated(k, k).real() / 4.0;
        }
    }
    return d;
}

Mat4 rho_from_coefficients(const RVec& r) {
    const auto& paulis = pauli_basis();
    Mat4 rho = paulis[0];
    for (int j = 1; j < 16; ++j) rho += r(j - 1) * paulis[j];
    return rho / 4.0;
}

RVec solve_full_rank(const RMat& a, const RVec& b, const char* what) {
    Eigen::CompleteOrthogonalDecomposition<RMat> cod(a);
    cod.setThreshold(1e-10);
    if (cod.rank() < a.cols()) throw ProtocolError(std::string("rank-deficient ") + what + " design matrix");
    return cod.solve(b);
}

Mat4 ideal_input(const TomoPair& prep) {
    const Mat4 u = pair_unitary(prep);
    return u.col(0) * u.col(0).adjoint();
}

std::array<double, 4> diag_populations(const Mat4& rho) {
    std::array<double, 4> p{};
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += (p[k] = std::max(0.0, rho(k, k).real()));
    for (double& x : p) x /= s;
    return p;
}

}  // namespace

const std::array<Mat4, 16>& pauli_basis() {
    static const std::array<Mat4, 16> basis = [] {
        std::array<Mat4, 16> b;
        for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 4; ++c) b[4 * a + c] = kron(single_paulis()[a], single_paulis()[c]);
        return b;
    }();
    return basis;
}

std::string pauli_label(int index) {
    static const char names[] = "IXYZ";
    if (index < 0 || index >= 16) throw ParameterError("Pauli index out of range");
    return {names[index / 4], names[index % 4]};
}

const std::vector<TomoPair>& preparation_pairs() {
    static const std::vector<TomoPair> pairs = [] {
        std::vector<TomoPair> v;
        for (const auto& a : tomo_gates())
            for (const auto& b : tomo_gates()) v.emplace_back(a, b);
        return v;
    }();
    return pairs;
}

const std::vector<TomoPair>& prerotation_pairs() {
    static const std::vector<TomoPair> pairs = [] {
        using P = Pulse;
        const std::array<std::pair<P, P>, 7> dropped{{{P::X180, P::X180},
                                                      {P::X180, P::Xm90},
                                                      {P::X180, P::Ym90},
                                                      {P::Xm90, P::X180},
                                                      {P::Ym90, P::X180},
                                                      {P::Xm90, P::Xm90},
                                                      {P::Ym90, P::Ym90}}};
        std::vector<TomoPair> v;
        for (const auto& pr : preparation_pairs()) {
            const bool drop = pr.first && pr.second &&
                              std::any_of(dropped.begin(), dropped.end(), [&](const auto& d) {
                                  return d.first == *pr.first && d.second == *pr.second;
                              });
            if (!drop) v.push_back(pr);
        }
        return v;
    }();
    return pairs;
}

Mat4 state_tomography_populations(const std::vector<std::array<double, 4>>& pops) {
    const auto& pre = prerotation_pairs();
    if (pops.size() != pre.size()) throw ParameterError("one population vector per pre-rotation required");
    static const RMat design = population_design();
    RVec b(design.rows());
    for (std::size_t r = 0; r < pre.size(); ++r)
        for (int k = 0; k < 4; ++k) b(static_cast<int>(4 * r) + k) = pops[r][k] - 0.25;
    return rho_from_coefficients(solve_full_rank(design, b, "state tomography"));
}

Mat4 state_tomography_voltages(const std::vector<cplx>& voltages, const ReadoutModel& model) {
    const auto& pre = prerotation_pairs();
    if (voltages.size() != pre.size()) throw ParameterError("one voltage per pre-rotation required");
    static const RMat pop_design = population_design();
    cplx offset = 0.0;
    for (const cplx& m : model.m) offset += m / 4.0;
    RMat design(static_cast<int>(2 * pre.size()), 15);
    RVec b(design.rows());
    for (std::size_t r = 0; r < pre.size(); ++r) {
        const int row = static_cast<int>(2 * r);
        for (int j = 0; j < 15; ++j) {
            cplx c = 0.0;
            for (int k = 0; k < 4; ++k) c += model.m[k] * pop_design(static_cast<int>(4 * r) + k, j);
            design(row, j) = c.real();
            design(row + 1, j) = c.imag();
        }
        b(row) = (voltages[r] - offset).real();
        b(row + 1) = (voltages[r] - offset).imag();
    }
    return rho_from_coefficients(solve_full_rank(design, b, "joint-readout tomography"));
}

CMat chi_from_unitary(const Mat4& u) {
    CVec c(16);
    for (int m = 0; m < 16; ++m) c(m) = (pauli_basis()[m].adjoint() * u).trace() / 4.0;
    return c * c.adjoint();
}

CMat superop_from_chi(const CMat& chi) {
    const auto& p = pauli_basis();
    CMat s = CMat::Zero(16, 16);
    for (int col = 0; col < 16; ++col) {
        Mat4 e = Mat4::Zero();
        e(col / 4, col % 4) = 1.0;
        Mat4 out = Mat4::Zero();
        for (int m = 0; m < 16; ++m)
            for (int n = 0; n < 16; ++n)
                if (chi(m, n) != cplx(0.0)) out += chi(m, n) * p[m] * e * p[n].adjoint();
        for (int k = 0; k < 16; ++k) s(k, col) = out(k / 4, k % 4);
    }
    return s;
}

double process_fidelity(const CMat& chi, const Mat4& target) {
    CVec u(16);
    for (int m = 0; m < 16; ++m) u(m) = (pauli_basis()[m].adjoint() * target).trace() / 4.0;
    return (u.adjoint() * chi * u)(0, 0).real();
}

CMat project_psd(const CMat& chi) {
    Eigen::SelfAdjointEigenSolver<CMat> es(chi);
    RVec ev = es.eigenvalues().cwiseMax(0.0);
    const double tr = ev.sum();
    if (tr <= 0.0) throw ProtocolError("process matrix has no positive part");
    ev /= tr;
    return es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
}

ProcessMatrix qpt(const CMat& superop, const QptOptions& options) {
    if (superop.rows() != 16 || superop.cols() != 16) throw ParameterError("QPT expects a 16 x 16 superoperator");
    if (options.readout) options.readout->validate();
    const auto& preps = preparation_pairs();
    const auto& pre = prerotation_pairs();
    const auto& p = pauli_basis();
    Rng rng(options.seed);

    std::vector<Mat4> inputs, outputs;
    for (const auto& prep : preps) {
        const Mat4 rho_in = ideal_input(prep);
        const Mat4 rho_out = apply_superop(superop, rho_in);
        std::vector<std::array<double, 4>> pops;
        std::vector<cplx> volts;
        for (const auto& r : pre) {
            const Mat4 u = pair_unitary(r);
            const auto pr = diag_populations(u * rho_out * u.adjoint());
            if (options.readout)
                volts.push_back(simulate_voltage(PopulationVector{pr}, *options.readout, PreRotation::II, &rng));
            else
                pops.push_back(pr);
        }
        inputs.push_back(rho_in);
        outputs.push_back(options.readout ? state_tomography_voltages(volts, *options.readout)
                                          : state_tomography_populations(pops));
    }

    // vec(rho_out_i) = sum_mn chi_mn vec(P_m rho_in_i P_n^dag)
    const int rows = static_cast<int>(16 * inputs.size());
    CMat a(rows, 256);
    CVec b(rows);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        const int r0 = static_cast<int>(16 * i);
        for (int m = 0; m < 16; ++m) {
            const Mat4 left = p[m] * inputs[i];
            for (int n = 0; n < 16; ++n) {
                const Mat4 term = left * p[n].adjoint();
                for (int k = 0; k < 16; ++k) a(r0 + k, 16 * m + n) = term(k / 4, k % 4);
            }
        }
        for (int k = 0; k < 16; ++k) b(r0 + k) = outputs[i](k / 4, k % 4);
    }
    Eigen::CompleteOrthogonalDecomposition<CMat> cod(a);
    cod.setThreshold(1e-10);
    if (cod.rank() < 256) throw ProtocolError("rank-deficient process tomography design matrix");
    const CVec x = cod.solve(b);

    CMat chi(16, 16);
    for (int m = 0; m < 16; ++m)
        for (int n = 0; n < 16; ++n) chi(m, n) = x(16 * m + n);
    chi = 0.5 * (chi + chi.adjoint()).eval();

    ProcessMatrix out;
    out.raw_trace = chi.trace().real();
    if (std::abs(out.raw_trace) < 1e-12) throw ProtocolError("process matrix with zero trace");
    chi /= out.raw_trace;
    if (options.psd_projection) chi = project_psd(chi);
    out.chi = chi;
    out.fidelity = process_fidelity(chi, options.target);
    out.min_eigenvalue = Eigen::SelfAdjointEigenSolver<CMat>(chi, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    return out;
}

}  // namespace fxcr
