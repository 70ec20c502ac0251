// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "fxcr/gates.hpp"
#include "fxcr/qubit_sim.hpp"
#include "fxcr/reflections.hpp"

using namespace fxcr;

TEST_SUITE("reflections") {
    TEST_CASE("zero-order-hold propagator is unitary and matches a constant rotation") {
        PulseEnvelope e = gap(10.0);
        for (auto& s : e.samples) s = std::polar(0.1, 0.4);
        const Mat2 u = zoh_propagator(e);
        CHECK((u * u.adjoint() - Mat2::Identity()).norm() < 1e-13);
        CHECK((u - r_axis(0.4, 1.0)).norm() < 1e-12);
        const Mat2 d = zoh_propagator(e, 0.01);
        CHECK((d * d.adjoint() - Mat2::Identity()).norm() < 1e-13);
    }

    TEST_CASE("rotation pulses reach their angle") {
        CHECK(zoh_excited(rotation_pulse(16.0, 4.0, 0.0, kPi)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(zoh_excited(rotation_pulse(16.0, 4.0, kPi / 2, kPi / 2)) == doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("AllXY on an ideal line matches the staircase") {
        const auto& pairs = allxy_pairs();
        CHECK(pairs.size() == 21);
        const auto& ideal = allxy_ideal();
        REQUIRE(ideal.size() == 21);
        CHECK(std::count(ideal.begin(), ideal.end(), 0.0) == 5);
        CHECK(std::count(ideal.begin(), ideal.end(), 0.5) == 12);
        CHECK(std::count(ideal.begin(), ideal.end(), 1.0) == 4);
        const auto trace = allxy_trace({});
        for (size_t k = 0; k < 21; ++k) CHECK(std::abs(trace[k] - ideal[k]) < 1e-9);
    }

    TEST_CASE("AllXY reveals an amplitude error") {
        SingleQubitGateSet g;
        g.amplitude_scale = 1.05;
        const auto trace = allxy_trace(g);
        double dev = 0.0;
        for (size_t k = 0; k < 21; ++k) dev = std::max(dev, std::abs(trace[k] - allxy_ideal()[k]));
        CHECK(dev > 0.01);
    }

    TEST_CASE("predistortion restores AllXY on a reflective line") {
        SingleQubitGateSet g;
        g.channel = demo_reflection_model();
        const auto bad = allxy_trace(g);
        g.predistortion = demo_reflection_model();
        const auto fixed = allxy_trace(g);
        double dev_bad = 0.0, dev_fixed = 0.0;
        for (size_t k = 0; k < 21; ++k) {
            dev_bad = std::max(dev_bad, std::abs(bad[k] - allxy_ideal()[k]));
            dev_fixed = std::max(dev_fixed, std::abs(fixed[k] - allxy_ideal()[k]));
        }
        CHECK(dev_fixed < 1e-3);
        CHECK(dev_bad > dev_fixed);
    }

    TEST_CASE("reflection traces are flat without echoes") {
        const auto t = reflection_traces({});
        REQUIRE_FALSE(t.quadrature.empty());
        for (const auto& row : t.quadrature)
            for (double p : row) CHECK(p < 1e-9);
    }

    TEST_CASE("a real echo leaves the quadrature trace flat") {
        // X_pi then X_-pi: an in-phase echo only rescales the axis-aligned rotation.
        ReflectionScanOptions o;
        o.repetitions = {1};
        const auto t = reflection_traces(ReflectionModel{{{15.0, cplx{0.2, 0.0}}}}, o);
        const auto& q = t.quadrature.front();
        const double spread = *std::max_element(q.begin(), q.end()) - *std::min_element(q.begin(), q.end());
        const auto& ip = t.in_phase.front();
        const double ip_spread = *std::max_element(ip.begin(), ip.end()) - *std::min_element(ip.begin(), ip.end());
        CHECK(spread < 1e-9);
        CHECK(ip_spread > 1e-3);
    }

    TEST_CASE("blind characterization finds a hidden echo") {
        const ReflectionModel hidden{{{15.0, cplx{0.2, 0.0}}}};
        const auto est = characterize_reflections(hidden);
        REQUIRE(est.echoes.size() >= 1);
        CHECK(std::abs(est.echoes.front().delay - 15.0) <= 1.0);
        CHECK(std::abs(std::abs(est.echoes.front().amplitude) - 0.2) <= 0.02);
    }
}
