// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include <doctest.h>

#include "fxcr/gates.hpp"
#include "fxcr/rb.hpp"

using namespace fxcr;

namespace {

const std::vector<std::size_t> kLengths{1, 2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100};

std::vector<std::vector<double>> synthetic(double a, double p, double b, const std::vector<std::size_t>& lengths) {
    std::vector<std::vector<double>> raw;
    for (auto m : lengths) raw.push_back({a * std::pow(p, static_cast<double>(m)) + b});
    return raw;
}

}  // namespace

TEST_SUITE("rb") {
    TEST_CASE("fit of a synthetic decay") {
        const auto r = fit_rb(kLengths, synthetic(0.5, 0.97, 0.25, kLengths));
        CHECK(r.fit_ok);
        CHECK(r.p == doctest::Approx(0.97).epsilon(1e-3));
        // EPC = (1 - p) (d - 1) / d with d = 4.
        CHECK(r.epc == doctest::Approx(0.0225).epsilon(0.035));
        CHECK(r.a == doctest::Approx(0.5).epsilon(1e-3));
        CHECK(r.b == doctest::Approx(0.25).epsilon(1e-3));
    }

    TEST_CASE("a growing curve is not an RB decay") {
        const auto raw = synthetic(0.1, 1.02, 0.3, kLengths);
        try {
            (void)fit_rb(kLengths, raw);
            FAIL("expected RbFitError");
        } catch (const RbFitError& e) {
            CHECK(e.result.mean.size() == kLengths.size());
            CHECK_FALSE(e.result.fit_ok);
        }
    }

    TEST_CASE("identity channel: no decay") {
        RbOptions o;
        o.lengths = {1, 4, 16, 64};
        o.sequences = 5;
        const auto r = run_rb({}, o);
        CHECK(r.p == 1.0);
        CHECK(r.epc < 1e-6);
        for (double m : r.mean) CHECK(m == doctest::Approx(1.0));
    }

    TEST_CASE("gate-level depolarizing channel is recovered exactly") {
        for (double epc : {0.005, 0.0215, 0.05}) {
            RbOptions o;
            o.lengths = kLengths;
            o.sequences = 3;
            const auto r = run_rb({depolarizing_for_epc(epc)}, o);
            CHECK(r.epc == doctest::Approx(epc).epsilon(1e-6));
        }
    }

    TEST_CASE("op-by-op mode averages the CX depolarizing over the CX count") {
        const double lam = 0.02;
        RbChannel ch;
        ch.cx_superop = depolarizing_superop(lam) * unitary_superop(cx_pi());
        RbOptions o;
        o.lengths = {1, 2, 4, 8, 16, 32};
        o.sequences = 60;
        o.seed = 17;
        const auto r = run_rb(ch, o);
        const double q = 1.0 - lam;
        const double p_exact = (576.0 + 5184.0 * q + 5184.0 * q * q + 576.0 * q * q * q) / 11520.0;
        CHECK(r.p == doctest::Approx(p_exact).epsilon(2e-3));
    }

    TEST_CASE("results do not depend on the worker count") {
        RbOptions o;
        o.lengths = {1, 8, 32};
        o.sequences = 6;
        o.shots = 500;
        o.seed = 123;
        const auto one = run_rb({0.02}, o);
        o.jobs = 3;
        const auto three = run_rb({0.02}, o);
        CHECK(one.raw == three.raw);
        CHECK(one.p == three.p);
    }

    TEST_CASE("interleaved fidelity") {
        CHECK(irb_fidelity(0.0215, 1.0 - 0.9949 * (1.0 - 0.0215)) == doctest::Approx(0.9949).epsilon(1e-12));
        RbOptions o;
        o.lengths = kLengths;
        o.sequences = 4;
        const auto ref = run_rb({depolarizing_for_epc(0.0215)}, o);
        o.interleave = cx_pi();
        RbChannel ch{depolarizing_for_epc(0.0215), std::nullopt, depolarizing_superop(0.008) * unitary_superop(cx_pi())};
        const auto inter = run_rb(ch, o);
        // EPC_int follows from p_int = p_ref (1 - lambda) for a depolarizing interleaved gate.
        const double epc_int = 0.75 * (1.0 - ref.p * (1.0 - 0.008));
        CHECK(inter.epc == doctest::Approx(epc_int).epsilon(1e-6));
        CHECK(irb_fidelity(ref, inter) == doctest::Approx((1.0 - epc_int) / (1.0 - 0.0215)).epsilon(1e-6));
        CHECK(irb_fidelity(ref, inter) == doctest::Approx(1.0 - 0.75 * 0.008).epsilon(1e-4));
    }
}
