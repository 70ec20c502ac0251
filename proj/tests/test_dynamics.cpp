// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "fxcr/dynamics.hpp"

using namespace fxcr;

namespace {

const DressedSystem& table_system() {
    static const DressedSystem sys = build_coupled_system(table1_params());
    return sys;
}

// Drive on port C' with identity crosstalk, so only qubit B sees it.
DriveConfig b_drive(double amplitude, double length) {
    DriveConfig d;
    d.frequency = table_system().energy(0, 1);
    d.port_c2 = amplitude;
    d.envelope = rounded_square(length, 0.0);
    return d;
}

}  // namespace

TEST_SUITE("dynamics") {
    TEST_CASE("idle evolution is the identity in the rotating frame") {
        const auto g = extract_gate(table_system(), {}, 70.0);
        CHECK(average_gate_fidelity(g.u, Mat4::Identity()) > 1.0 - 1e-9);
        CHECK(g.leakage < 1e-12);
    }

    TEST_CASE("pure evolution conserves the norm") {
        const auto& sys = table_system();
        const std::vector<double> grid{0.0, 10.0, 20.0, 30.0, 40.0};
        const auto r = propagate_schrodinger(sys, {b_drive(0.2, 40.0)}, basis_state(sys, 0, 0), grid);
        REQUIRE(r.states.size() == grid.size());
        for (const auto& s : r.states) CHECK(std::abs(s.norm() - 1.0) < 1e-8);
        for (Eigen::Index k = 0; k < r.populations.rows(); ++k)
            CHECK(r.populations.row(k).sum() + r.leakage(k) == doctest::Approx(1.0).epsilon(1e-8));
    }

    TEST_CASE("resonant B drive produces Rabi oscillations at the expected rate") {
        const auto& sys = table_system();
        std::vector<double> grid;
        for (int k = 0; k <= 60; ++k) grid.push_back(2.0 * k);
        const double amp = 0.05;
        const auto r = propagate_schrodinger(sys, {b_drive(amp, 120.0)}, basis_state(sys, 0, 0), grid);
        std::vector<double> p01;
        for (Eigen::Index k = 0; k < r.populations.rows(); ++k) p01.push_back(r.populations(k, 1));
        const auto fit = fit_rabi(grid, p01);
        // Rabi rate |eps_B <00|n_B|01>| with a = Re[s e^{-i w t}] coupling to n_B.
        const double expected = amp * std::abs(sys.n_b_op(sys.index(0, 0), sys.index(0, 1)));
        CHECK(fit.frequency == doctest::Approx(expected).epsilon(0.02));
        CHECK(fit.contrast > 0.95);
    }

    TEST_CASE("fit_rabi recovers synthetic parameters") {
        std::vector<double> t, y;
        for (int k = 0; k < 80; ++k) {
            t.push_back(1.5 * k);
            y.push_back(0.48 - 0.5 * 0.9 * std::cos(kTwoPi * 0.0123 * t.back() + 0.3));
        }
        const auto fit = fit_rabi(t, y);
        CHECK(fit.frequency == doctest::Approx(0.0123).epsilon(1e-6));
        CHECK(fit.contrast == doctest::Approx(0.9).epsilon(1e-6));
        CHECK(fit.offset == doctest::Approx(0.48).epsilon(1e-6));
        CHECK(fit.phase == doctest::Approx(0.3).epsilon(1e-6));
        CHECK_THROWS_AS(fit_rabi({0, 1, 2}, {0, 1, 0}), ParameterError);
    }

    TEST_CASE("energy relaxation follows exp(-t / T1)") {
        const auto& sys = table_system();
        CoherenceSpec c;
        c.t1_b = 1.0;  // us
        const CVec psi = basis_state(sys, 0, 1);
        const CMat rho = psi * psi.adjoint();
        const auto r = propagate_lindblad(sys, {}, rho, c, {0.0, 250.0, 500.0});
        CHECK(r.populations(2, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-3));
        CHECK(r.populations(1, 1) == doctest::Approx(std::exp(-0.25)).epsilon(1e-3));
        CHECK(r.populations(2, 0) == doctest::Approx(1.0 - std::exp(-0.5)).epsilon(1e-3));
        for (const auto& d : r.densities) CHECK(std::abs(d.trace() - 1.0) < 1e-9);
    }

    TEST_CASE("step halving leaves the gate unchanged") {
        const auto& sys = table_system();
        CHECK(step_doubling_check(sys, {b_drive(0.1, 40.0)}, 40.0) < 1e-9);
    }

    TEST_CASE("coherence validation") {
        CoherenceSpec c;
        c.t1_a = 10.0;
        c.t2e_a = 25.0;
        CHECK_THROWS_AS(c.validate(), ParameterError);
        c.t2e_a = 20.0;
        CHECK_NOTHROW(c.validate());
        c.t1_b = -1.0;
        CHECK_THROWS_AS(c.validate(), ParameterError);
        CHECK(table1_coherence().any());
        CHECK_FALSE(CoherenceSpec{}.any());
    }

    TEST_CASE("pure and open evolution agree without dissipation") {
        const auto& sys = table_system();
        const std::vector<double> grid{0.0, 30.0};
        const CVec psi = basis_state(sys, 0, 0);
        const auto pure = propagate_schrodinger(sys, {b_drive(0.1, 30.0)}, psi, grid);
        const auto open = propagate_lindblad(sys, {b_drive(0.1, 30.0)}, psi * psi.adjoint(), {}, grid);
        for (int k = 0; k < 4; ++k) CHECK(std::abs(pure.populations(1, k) - open.populations(1, k)) < 1e-8);
    }
}
