// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace fxcr {

void FluxoniumParams::validate() const {
    if (!(e_c > 0.0)) throw ParameterError("fluxonium e_c must be > 0");
    if (!(e_l > 0.0)) throw ParameterError("fluxonium e_l must be > 0");
    if (!(e_j >= 0.0)) throw ParameterError("fluxonium e_j must be >= 0");
    if (!std::isfinite(phi_ext)) throw ParameterError("fluxonium phi_ext must be finite");
}

void CoupledParams::validate() const {
    qubit_a.validate();
    qubit_b.validate();
    if (!(j_c >= 0.0)) throw ParameterError("j_c must be >= 0");
    if (levels_per_qubit < 3) throw ParameterError("levels_per_qubit must be >= 3");
    if (basis_size < 20) throw ParameterError("basis_size must be >= 20");
}

CoupledParams table1_params() {
    CoupledParams p;
    p.qubit_a = {1.18, 0.78, 4.03, kTwoPi * 0.5005};
    p.qubit_b = {1.13, 1.42, 4.34, kTwoPi * 0.4993};
    p.j_c = 0.28;
    return p;
}

namespace {

// Oscillator-basis Hamiltonian plus the phase and charge operators.
struct OscillatorModel {
    RMat h;
    RMat phi;
    RMat n_imag;  // n = i * n_imag
};

OscillatorModel build_model(const FluxoniumParams& p, int n) {
    const double omega = std::sqrt(8.0 * p.e_c * p.e_l);
    const double phi_zpf = std::pow(2.0 * p.e_c / p.e_l, 0.25);
    const double n_zpf = std::pow(p.e_l / (32.0 * p.e_c), 0.25);

    OscillatorModel m;
    m.phi = RMat::Zero(n, n);
    m.n_imag = RMat::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        const double s = std::sqrt(static_cast<double>(k + 1));
        m.phi(k, k + 1) = m.phi(k + 1, k) = phi_zpf * s;
        // n = i n_zpf (a^dag - a)
        m.n_imag(k, k + 1) = -n_zpf * s;
        m.n_imag(k + 1, k) = n_zpf * s;
    }

    m.h = RMat::Zero(n, n);
    for (int k = 0; k < n; ++k) m.h(k, k) = omega * (k + 0.5);

    if (p.e_j != 0.0) {
        // cos(phi - phi_ext) evaluated on the eigenbasis of the truncated phi.
        Eigen::SelfAdjointEigenSolver<RMat> es(m.phi);
        RVec c = (es.eigenvalues().array() - p.phi_ext).cos();
        m.h -= p.e_j * es.eigenvectors() * c.asDiagonal() * es.eigenvectors().transpose();
    }
    return m;
}

SpectrumResult solve(const FluxoniumParams& p, int n, int kept) {
    kept = std::min(kept, n);
    OscillatorModel m = build_model(p, n);
    Eigen::SelfAdjointEigenSolver<RMat> es(m.h);
    if (es.info() != Eigen::Success) throw ConstructionError("fluxonium eigensolver failed");

    RMat v = es.eigenvectors().leftCols(kept);
    for (int k = 0; k < kept; ++k) {
        Eigen::Index idx = 0;
        v.col(k).cwiseAbs().maxCoeff(&idx);
        if (v(idx, k) < 0.0) v.col(k) = -v.col(k);
    }

    SpectrumResult r;
    r.energies = es.eigenvalues().head(kept);
    r.vectors = v;
    r.basis_size = n;
    r.phi_elements = v.transpose() * m.phi * v;
    r.n_elements = kI * (v.transpose() * m.n_imag * v).cast<cplx>();

    const double hnorm = es.eigenvalues().cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (int k = 0; k < kept; ++k) {
        const double res = (m.h * v.col(k) - r.energies(k) * v.col(k)).norm();
        worst = std::max(worst, res / hnorm);
    }
    r.max_residual = worst;
    return r;
}

}  // namespace

SpectrumResult diagonalize_fluxonium(const FluxoniumParams& params, int basis_size, int kept_levels) {
    params.validate();
    if (basis_size < 20) throw ParameterError("basis_size must be >= 20");
    SpectrumResult r = solve(params, basis_size, kept_levels);
    SpectrumResult doubled = solve(params, 2 * basis_size, 6);
    const int cmp = std::min<int>(6, static_cast<int>(r.energies.size()));
    const double shift = (r.energies.head(cmp) - doubled.energies.head(cmp)).cwiseAbs().maxCoeff();
    r.convergence_flag = shift < 1e-6;
    return r;
}

RMat charge_matrix_elements(const SpectrumResult& spectrum, int levels) {
    levels = std::min<int>(levels, static_cast<int>(spectrum.n_elements.rows()));
    return spectrum.n_elements.topLeftCorner(levels, levels).cwiseAbs();
}

DressedSystem build_coupled_system(const CoupledParams& params) {
    params.validate();
    const int L = params.levels_per_qubit;
    const int kept = std::max(L, kKeptLevels);

    DressedSystem s;
    s.spectrum_a = diagonalize_fluxonium(params.qubit_a, params.basis_size, kept);
    s.spectrum_b = diagonalize_fluxonium(params.qubit_b, params.basis_size, kept);
    if (!s.spectrum_a.convergence_flag || !s.spectrum_b.convergence_flag)
        throw ConstructionError("single-fluxonium spectrum not converged at basis size " +
                                std::to_string(params.basis_size));
    s.levels = L;
    s.dim = L * L;
    s.j_c = params.j_c;

    const RVec ea = s.spectrum_a.energies.head(L);
    const RVec eb = s.spectrum_b.energies.head(L);
    // n_A and n_B are i times a real antisymmetric matrix, so the product is real.
    const RMat na = s.spectrum_a.n_elements.topLeftCorner(L, L).imag();
    const RMat nb = s.spectrum_b.n_elements.topLeftCorner(L, L).imag();
    const RMat eye = RMat::Identity(L, L);

    RMat h = RMat::Zero(s.dim, s.dim);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) h(i * L + j, i * L + j) = ea(i) + eb(j);
    RMat coupling(s.dim, s.dim);
    for (int i = 0; i < L; ++i)
        for (int k = 0; k < L; ++k) coupling.block(i * L, k * L, L, L) = na(i, k) * nb;
    // (i na) x (i nb) = - na x nb
    h -= params.j_c * coupling;

    Eigen::SelfAdjointEigenSolver<RMat> es(h);
    const RMat& vecs = es.eigenvectors();

    // Label every dressed state by its dominant bare component.
    std::vector<int> dressed_of_label(s.dim, -1);
    s.label_overlap = RVec::Zero(s.dim);
    for (int k = 0; k < s.dim; ++k) {
        Eigen::Index best = 0;
        const double ov = vecs.col(k).cwiseAbs2().maxCoeff(&best);
        const int a = static_cast<int>(best) / L, b = static_cast<int>(best) % L;
        if (ov <= 0.5) {
            std::ostringstream os;
            os << "ambiguous dressed label for eigenstate " << k << " (best bare |" << a << b
               << ">, overlap " << ov << ")";
            throw ConstructionError(os.str());
        }
        if (dressed_of_label[best] >= 0) {
            std::ostringstream os;
            os << "bare label |" << a << b << "> claimed by two dressed states";
            throw ConstructionError(os.str());
        }
        dressed_of_label[best] = k;
        s.label_overlap(best) = ov;
    }

    RMat v(s.dim, s.dim);
    s.raw_energies.resize(s.dim);
    s.labels.resize(s.dim);
    for (int idx = 0; idx < s.dim; ++idx) {
        const int k = dressed_of_label[idx];
        RVec col = vecs.col(k);
        if (col(idx) < 0.0) col = -col;
        v.col(idx) = col;
        s.raw_energies(idx) = es.eigenvalues()(k);
        s.labels[idx] = {idx / L, idx % L};
    }
    s.raw_energies.array() -= s.raw_energies(0);

    RMat na_full(s.dim, s.dim), nb_full(s.dim, s.dim);
    for (int i = 0; i < L; ++i)
        for (int k = 0; k < L; ++k) {
            na_full.block(i * L, k * L, L, L) = na(i, k) * eye;
            nb_full.block(i * L, k * L, L, L) = (i == k ? 1.0 : 0.0) * nb;
        }
    s.n_a_op = kI * (v.transpose() * na_full * v).cast<cplx>();
    s.n_b_op = kI * (v.transpose() * nb_full * v).cast<cplx>();

    s.static_zz = s.raw_energies(s.index(1, 1)) - s.raw_energies(s.index(1, 0)) -
                  s.raw_energies(s.index(0, 1)) + s.raw_energies(s.index(0, 0));
    s.energies = s.raw_energies;
    if (params.residual_zz_override) {
        s.zz_override = params.residual_zz_override;
        s.energies(s.index(1, 1)) += *params.residual_zz_override - s.static_zz;
    }
    return s;
}

std::pair<double, double> static_zz_scaling(const CoupledParams& params, double scale) {
    if (!(scale > 0.0 && scale <= 1.0)) throw ParameterError("scale must lie in (0, 1]");
    CoupledParams scaled = params;
    scaled.j_c *= scale;
    scaled.residual_zz_override.reset();
    CoupledParams full = params;
    full.residual_zz_override.reset();
    return {build_coupled_system(full).static_zz, build_coupled_system(scaled).static_zz};
}

namespace {

CRRates cr_rates(const SpectrumResult& a, const SpectrumResult& b, double j_c, double eps_a,
                 double target_element) {
    const double fa = a.transition(0, 1);
    const double fb = b.transition(0, 1);
    const double fa12 = a.transition(1, 2);
    if (std::abs(fb - fa) < 1e-12 || std::abs(fa12 - fb) < 1e-12)
        throw SingularityError("degenerate denominator in perturbative CR rates");
    const double n01 = std::abs(a.n_elements(0, 1));
    const double n12 = std::abs(a.n_elements(1, 2));
    const double off = n01 * n01 / (fb - fa);
    const double on = off + n12 * n12 / (fa12 - fb);
    return {eps_a * kI * j_c * off * target_element, eps_a * (-kI) * j_c * on * target_element};
}

}  // namespace

CRRates perturbative_cr_rates(const DressedSystem& system, double eps_a, double target_element) {
    return cr_rates(system.spectrum_a, system.spectrum_b, system.j_c, eps_a, target_element);
}

CRRates perturbative_cr_rates(const CoupledParams& params, double eps_a, double target_element) {
    params.validate();
    const auto a = diagonalize_fluxonium(params.qubit_a, params.basis_size, 4);
    const auto b = diagonalize_fluxonium(params.qubit_b, params.basis_size, 4);
    return cr_rates(a, b, params.j_c, eps_a, target_element);
}

double conditional_transition(const DressedSystem& system, int qubit, int lo, int hi, int other) {
    if (qubit == 0) return system.energy(hi, other) - system.energy(lo, other);
    return system.energy(other, hi) - system.energy(other, lo);
}

}  // namespace fxcr
