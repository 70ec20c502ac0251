// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fxcr/types.hpp"

namespace fxcr {

// Circuit energies in GHz, external flux in radians.
struct FluxoniumParams {
    double e_c = 1.0;
    double e_l = 1.0;
    double e_j = 0.0;
    double phi_ext = kPi;

    void validate() const;
};

struct SpectrumResult {
    RVec energies;      // ascending, GHz
    CMat n_elements;    // <i|n|j> for the kept levels
    RMat phi_elements;  // <i|phi|j> for the kept levels
    RMat vectors;       // kept eigenvectors in the oscillator basis
    int basis_size = 0;
    bool convergence_flag = false;
    double max_residual = 0.0;  // max ||Hv - Ev|| / ||H||

    double transition(int i, int j) const { return energies(j) - energies(i); }
};

// Default oscillator basis size and the number of eigenstates returned.
inline constexpr int kDefaultBasis = 120;
inline constexpr int kKeptLevels = 12;

SpectrumResult diagonalize_fluxonium(const FluxoniumParams& params, int basis_size = kDefaultBasis,
                                     int kept_levels = kKeptLevels);

// |<i|n|j>| for the lowest `levels` states.
RMat charge_matrix_elements(const SpectrumResult& spectrum, int levels = 6);

struct CoupledParams {
    FluxoniumParams qubit_a;
    FluxoniumParams qubit_b;
    double j_c = 0.0;
    int levels_per_qubit = 5;
    std::optional<double> residual_zz_override;
    int basis_size = kDefaultBasis;

    void validate() const;
};

// Table I device.
CoupledParams table1_params();

// Coupled system in its dressed eigenbasis, states ordered by bare label
// index = i * levels + j with qubit A first.
struct DressedSystem {
    int levels = 0;
    int dim = 0;
    RVec energies;      // dynamics energies relative to E00, override applied
    RVec raw_energies;  // diagonalization energies relative to E00
    std::vector<std::pair<int, int>> labels;
    RVec label_overlap;  // squared overlap with the bare label
    CMat n_a_op;
    CMat n_b_op;
    double static_zz = 0.0;  // from diagonalization
    std::optional<double> zz_override;
    SpectrumResult spectrum_a;
    SpectrumResult spectrum_b;
    double j_c = 0.0;

    int index(int a, int b) const { return a * levels + b; }
    double energy(int a, int b) const { return energies(index(a, b)); }
    double effective_zz() const { return zz_override ? *zz_override : static_zz; }
    // Computational states 00, 01, 10, 11 as dressed indices.
    std::vector<int> computational() const {
        return {index(0, 0), index(0, 1), index(1, 0), index(1, 1)};
    }
};

DressedSystem build_coupled_system(const CoupledParams& params);

// Static ZZ at J_C and at scale * J_C.
std::pair<double, double> static_zz_scaling(const CoupledParams& params, double scale);

struct CRRates {
    cplx omega_0;
    cplx omega_1;
};

// Perturbative CR rates from bare frequencies and charge matrix elements.
CRRates perturbative_cr_rates(const DressedSystem& system, double eps_a, double target_element);
CRRates perturbative_cr_rates(const CoupledParams& params, double eps_a, double target_element);

// Transition frequencies of qubit `qubit` (0 = A, 1 = B) from level lo to hi,
// conditioned on the other qubit in `other`.
double conditional_transition(const DressedSystem& system, int qubit, int lo, int hi, int other);

}  // namespace fxcr
