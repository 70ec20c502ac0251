// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "fxcr/spectrum.hpp"

using namespace fxcr;

namespace {

// Finite-difference phase-grid fluxonium, an oracle independent of the
// oscillator basis: H = -4 E_C d^2/dphi^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext).
RVec grid_levels(const FluxoniumParams& p, int points = 6000, double half_width = 6.0 * kPi) {
    const double h = 2.0 * half_width / (points - 1);
    RVec diag(points), off(points - 1);
    for (int i = 0; i < points; ++i) {
        const double phi = -half_width + i * h;
        diag(i) = 8.0 * p.e_c / (h * h) + 0.5 * p.e_l * phi * phi - p.e_j * std::cos(phi - p.phi_ext);
    }
    off.setConstant(-4.0 * p.e_c / (h * h));
    Eigen::SelfAdjointEigenSolver<RMat> es;
    es.computeFromTridiagonal(diag, off, Eigen::EigenvaluesOnly);
    return es.eigenvalues().head(4);
}

}  // namespace

TEST_SUITE("spectrum") {
    TEST_CASE("harmonic limit gives equally spaced levels at sqrt(8 E_C E_L)") {
        const FluxoniumParams p{1.0, 0.5, 0.0, kPi};
        const auto s = diagonalize_fluxonium(p);
        const double w = std::sqrt(8.0 * p.e_c * p.e_l);
        for (int k = 1; k < 5; ++k) CHECK(s.transition(k - 1, k) == doctest::Approx(w).epsilon(1e-10));
        CHECK(s.convergence_flag);
    }

    TEST_CASE("oscillator basis agrees with a phase-grid oracle") {
        for (const auto& p : {table1_params().qubit_a, table1_params().qubit_b}) {
            const auto s = diagonalize_fluxonium(p);
            const RVec g = grid_levels(p);
            for (int k = 1; k < 4; ++k) CHECK(std::abs(s.transition(0, k) - (g(k) - g(0))) < 2e-3);
        }
    }

    TEST_CASE("basis size convergence") {
        const auto p = table1_params().qubit_a;
        const auto a = diagonalize_fluxonium(p, 120);
        const auto b = diagonalize_fluxonium(p, 160);
        for (int k = 1; k < 6; ++k) CHECK(std::abs(a.transition(0, k) - b.transition(0, k)) < 1e-8);
    }

    TEST_CASE("parity selection at half flux") {
        FluxoniumParams p = table1_params().qubit_a;
        p.phi_ext = kPi;
        const auto s = diagonalize_fluxonium(p);
        CHECK(std::abs(s.n_elements(0, 2)) < 1e-9);
        CHECK(std::abs(s.n_elements(1, 3)) < 1e-9);
        CHECK(std::abs(s.n_elements(0, 1)) > 1e-3);
    }

    TEST_CASE("largest eigenvector component is positive") {
        const auto s = diagonalize_fluxonium(table1_params().qubit_b);
        for (int k = 0; k < s.vectors.cols(); ++k) {
            Eigen::Index i;
            s.vectors.col(k).cwiseAbs().maxCoeff(&i);
            CHECK(s.vectors(i, k) > 0.0);
        }
    }

    TEST_CASE("invalid circuit parameters are rejected") {
        FluxoniumParams p = table1_params().qubit_a;
        p.e_c = -1.0;
        CHECK_THROWS_AS(diagonalize_fluxonium(p), ParameterError);
        CoupledParams c = table1_params();
        c.j_c = -0.1;
        CHECK_THROWS_AS(build_coupled_system(c), ParameterError);
    }

    TEST_CASE("coupled system: labels, ZZ scaling and override") {
        const auto params = table1_params();
        const auto sys = build_coupled_system(params);
        for (int i : sys.computational()) CHECK(sys.label_overlap(i) > 0.9);
        CHECK(sys.energy(0, 0) == 0.0);

        // ZZ is a fourth-order-in-ratio effect at leading order J_C^2.
        const auto [zz, zz_half] = static_zz_scaling(params, 0.5);
        CHECK(zz_half / zz == doctest::Approx(0.25).epsilon(0.05));

        auto with_override = params;
        with_override.residual_zz_override = 0.0;
        const auto s2 = build_coupled_system(with_override);
        const double zz_dyn = s2.energy(1, 1) - s2.energy(1, 0) - s2.energy(0, 1) + s2.energy(0, 0);
        CHECK(std::abs(zz_dyn) < 1e-12);
        CHECK(s2.static_zz == doctest::Approx(sys.static_zz));
    }

    TEST_CASE("uncoupled ZZ is exactly zero") {
        auto p = table1_params();
        p.j_c = 0.0;
        CHECK(build_coupled_system(p).static_zz == 0.0);
    }
}
