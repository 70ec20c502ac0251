// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include <doctest.h>

#include "fxcr/gates.hpp"
#include "fxcr/rng.hpp"

using namespace fxcr;

TEST_SUITE("gates") {
    TEST_CASE("virtual-Z framing undoes the CR phases exactly") {
        Rng rng(5);
        for (int i = 0; i < 20; ++i) {
            const double ta = kPi * (2.0 * rng.uniform() - 1.0), tb = kPi * (2.0 * rng.uniform() - 1.0);
            const Mat4 u = virtual_z_compose(cr_experimental(ta, tb), ta, tb);
            CHECK((u - cx_pi()).norm() < 1e-13);
            const auto f = frame_phases(cr_experimental(ta, tb));
            CHECK(std::abs(std::remainder(f.theta_a - ta, kTwoPi)) < 1e-12);
            CHECK(std::abs(std::remainder(f.theta_b - tb, kTwoPi)) < 1e-12);
        }
    }

    TEST_CASE("CX_pi and CNOT differ by an S gate on A") {
        CHECK((z_on_a(kPi / 2) * cx_pi() - cnot()).norm() < 1e-14);
        CHECK((cx_pi() * z_on_a(kPi / 2) - cnot()).norm() < 1e-14);
        // The same shift expressed through the frame.
        CHECK(phase_insensitive_distance(virtual_z_compose(cx_pi(), -kPi / 2, 0.0), cnot()) < 1e-13);
    }

    TEST_CASE("single-qubit rotations") {
        Mat2 flip;
        flip << 0.0, -kI, -kI, 0.0;
        CHECK((rx(kPi) - flip).norm() < 1e-14);
        CHECK((r_axis(0.0, 0.7) - rx(0.7)).norm() < 1e-14);
        CHECK((r_axis(kPi / 2, 0.7) - ry(0.7)).norm() < 1e-14);
        CHECK((hadamard() * hadamard() - Mat2::Identity()).norm() < 1e-14);
        CHECK((kron(rx(0.3), ry(0.2)) - on_a(rx(0.3)) * on_b(ry(0.2))).norm() < 1e-14);
    }

    TEST_CASE("average gate fidelity: reference values") {
        CHECK(average_gate_fidelity(cx_pi(), cx_pi()) == doctest::Approx(1.0));
        CHECK(average_gate_fidelity(Mat4::Identity(), cx_pi()) == doctest::Approx(0.4));
        // Global phase is irrelevant.
        CHECK(average_gate_fidelity(std::polar(1.0, 0.8) * cx_pi(), cx_pi()) == doctest::Approx(1.0));
        // Small B phase error: F = (12 + 8 cos t) / 20 ~ 1 - t^2 / 5.
        for (double t : {1e-3, 1e-2, 0.1}) {
            const double f = average_gate_fidelity(cx_pi() * z_on_b(t), cx_pi());
            CHECK(f == doctest::Approx((12.0 + 8.0 * std::cos(t)) / 20.0).epsilon(1e-12));
            CHECK(1.0 - f == doctest::Approx(t * t / 5.0).epsilon(1e-2));
        }
    }

    TEST_CASE("leakage lowers the fidelity") {
        Mat4 u = cx_pi();
        u.col(0) *= std::sqrt(1.0 - 0.01);  // 1 % of |00> lost
        CHECK(average_gate_fidelity(u, cx_pi()) < 1.0 - 0.001);
    }

    TEST_CASE("channel fidelity: unitary and depolarizing") {
        const CMat s = unitary_superop(cx_pi());
        CHECK(average_gate_fidelity_channel(s, cx_pi()) == doctest::Approx(1.0));
        for (double lam : {0.0, 0.01, 0.1, 0.5}) {
            const double f = average_gate_fidelity_channel(depolarizing_superop(lam) * s, cx_pi());
            CHECK(f == doctest::Approx(1.0 - 0.75 * lam).epsilon(1e-12));
        }
        // Agrees with the unitary formula.
        const Mat4 v = cx_pi() * z_on_b(0.2) * on_a(rx(0.05));
        CHECK(average_gate_fidelity_channel(unitary_superop(v), cx_pi()) ==
              doctest::Approx(average_gate_fidelity(v, cx_pi())).epsilon(1e-12));
    }

    TEST_CASE("superoperator vectorization is row-major") {
        Mat4 rho = Mat4::Zero();
        rho(0, 0) = 1.0;
        const Mat4 out = apply_superop(unitary_superop(cnot()), rho);
        CHECK(std::abs(out(0, 0) - 1.0) < 1e-14);
        rho.setZero();
        rho(2, 2) = 1.0;
        CHECK(std::abs(apply_superop(unitary_superop(cnot()), rho)(3, 3) - 1.0) < 1e-14);
        const Mat4 mixed = apply_superop(depolarizing_superop(1.0), rho);
        CHECK((mixed - 0.25 * Mat4::Identity()).norm() < 1e-14);
    }

    TEST_CASE("off-block norm") {
        CHECK(off_block_norm(cx_pi()) < 1e-15);
        CHECK(off_block_norm(on_a(rx(0.1))) == doctest::Approx(std::sin(0.05)));
    }

    TEST_CASE("coherence limit") {
        const double inf = std::numeric_limits<double>::infinity();
        CHECK(coherence_limit(inf, inf, inf, inf, 70.0) == 0.0);
        // 1 / T_err = 6 / (5 T) with every time equal to T.
        CHECK(coherence_limit(100.0, 100.0, 100.0, 100.0, 50.0) == doctest::Approx(0.05 * 6.0 / 500.0));
        const double a = coherence_limit(150.0, 90.0, 40.0, 30.0, 35.0);
        CHECK(coherence_limit(150.0, 90.0, 40.0, 30.0, 70.0) == doctest::Approx(2.0 * a).epsilon(1e-15));
    }

    TEST_CASE("reduced frame wraps into [0, 2 pi)") {
        const auto r = GateFrame{-0.5, 7.0}.reduced();
        CHECK(r.theta_a == doctest::Approx(kTwoPi - 0.5));
        CHECK(r.theta_b == doctest::Approx(7.0 - kTwoPi));
    }
}
