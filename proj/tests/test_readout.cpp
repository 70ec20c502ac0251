// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>

#include <doctest.h>

#include "fxcr/gates.hpp"
#include "fxcr/readout.hpp"

using namespace fxcr;

TEST_SUITE("readout") {
    TEST_CASE("noiseless voltage inversion is exact") {
        const auto model = default_readout_model();
        for (const auto& p : {PopulationVector::basis(2), PopulationVector::product(0.01, 0.05),
                              PopulationVector::make({0.4, 0.3, 0.2, 0.1})}) {
            const auto inv = invert_population(simulate_voltages(p, model), model);
            for (int k = 0; k < 4; ++k) CHECK(std::abs(inv.p[k] - p.p[k]) < 1e-12);
            CHECK(inv.imag_residual < 1e-12);
            CHECK_FALSE(inv.negative);
        }
    }

    TEST_CASE("pre-rotations permute the populations") {
        const auto model = default_readout_model();
        const auto p = PopulationVector::basis(0);
        CHECK(simulate_voltage(p, model, PreRotation::XX) == model.m[3]);
        CHECK(simulate_voltage(p, model, PreRotation::IX) == model.m[1]);
        CHECK(parse_prerotation("XI") == PreRotation::XI);
        CHECK_THROWS(parse_prerotation("ZZ"));
    }

    TEST_CASE("product populations") {
        const auto p = PopulationVector::product(0.01, 0.05);
        CHECK(p.p[0] == doctest::Approx(0.99 * 0.95));
        CHECK(p.p[1] == doctest::Approx(0.99 * 0.05));
        CHECK(p.p[2] == doctest::Approx(0.01 * 0.95));
        CHECK(p.p[3] == doctest::Approx(0.01 * 0.05));
        CHECK_THROWS_AS(PopulationVector::make({0.5, 0.6, 0.0, 0.0}), ParameterError);
        CHECK_THROWS_AS(PopulationVector::make({1.1, -0.1, 0.0, 0.0}), ParameterError);
    }

    TEST_CASE("M calibration from an imperfect initial state") {
        const auto model = default_readout_model();
        const auto p = PopulationVector::product(0.01, 0.05);
        const auto m = calibrate_m(p, simulate_voltages(p, model));
        for (int k = 0; k < 4; ++k) CHECK(std::abs(m[k] - model.m[k]) < 1e-12);
        CHECK_THROWS_AS(calibrate_m(PopulationVector::make({0.25, 0.25, 0.25, 0.25}), simulate_voltages(p, model)),
                        InversionError);
    }

    TEST_CASE("degenerate readout is rejected") {
        ReadoutModel bad;
        bad.m = {1.0, 1.0, 1.0, 1.0};
        CHECK_THROWS_AS(bad.validate(), InversionError);
        CHECK_THROWS_AS(invert_population(simulate_voltages(PopulationVector::basis(0), bad), bad), InversionError);
    }

    TEST_CASE("simplex projection") {
        const auto q = project_to_simplex({0.7, 0.4, -0.05, -0.05});
        CHECK(std::accumulate(q.begin(), q.end(), 0.0) == doctest::Approx(1.0));
        for (double v : q) CHECK(v >= 0.0);
        CHECK(q[0] - q[1] == doctest::Approx(0.3));
        const std::array<double, 4> inside{0.1, 0.2, 0.3, 0.4};
        const auto same = project_to_simplex(inside);
        for (int k = 0; k < 4; ++k) CHECK(same[k] == doctest::Approx(inside[k]));
    }

    TEST_CASE("the two control-population estimators agree on ideal data") {
        // Contrasts from the four-sequence model with arbitrary M differences.
        const cplx d0{0.8, 0.3}, d1{-0.2, 0.9};
        const double e = 0.013;
        const cplx a = (1 - e) * d0 + e * d1, b = (1 - e) * d0 - e * d1;
        const cplx c = (1 - e) * d1 + e * d0, d = (1 - e) * d1 - e * d0;
        const auto cp = control_population(a, b, c, d);
        CHECK(std::abs(cp.from_cd - e) < 1e-14);
        CHECK(std::abs(cp.from_ab - e) < 1e-14);
        CHECK(cp.mean == doctest::Approx(e));
    }

    TEST_CASE("simulated sequences recover the control population") {
        const auto model = default_readout_model();
        for (double e : {0.0, 0.01, 0.05}) {
            const auto c = population_contrasts(PopulationVector::product(e, 0.03), unitary_superop(cnot()), model);
            const auto cp = control_population(c[0], c[1], c[2], c[3]);
            CHECK(std::abs(cp.mean - e) < 1e-9);
        }
    }

    TEST_CASE("reversed CNOT") {
        Mat4 want = Mat4::Zero();
        // B is the control: |01> <-> |11>.
        want(0, 0) = want(2, 2) = 1.0;
        want(1, 3) = want(3, 1) = 1.0;
        CHECK((reversed_cnot() - want).norm() < 1e-14);
    }

    TEST_CASE("shot-noise measurement is unbiased on average") {
        auto model = default_readout_model();
        model.noise_sigma = 0.5;
        model.shots = 2000;
        Rng rng(11);
        const std::array<double, 4> p{0.7, 0.1, 0.15, 0.05};
        std::array<double, 4> acc{};
        const int reps = 200;
        for (int i = 0; i < reps; ++i) {
            const auto q = measure_populations(p, model, rng);
            for (int k = 0; k < 4; ++k) acc[k] += q[k] / reps;
        }
        for (int k = 0; k < 4; ++k) CHECK(std::abs(acc[k] - p[k]) < 0.01);
    }
}
