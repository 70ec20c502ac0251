// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>

#include <doctest.h>

#include "fxcr/pulse.hpp"

using namespace fxcr;

namespace {

// Continuous-time echo sum evaluated pointwise on the grid.
cplx echo_sum_at(const PulseEnvelope& env, const ReflectionModel& m, double t) {
    cplx v = env.value(t);
    for (const auto& e : m.echoes) v += e.amplitude * env.value(t - e.delay);
    return v;
}

}  // namespace

TEST_SUITE("pulse") {
    TEST_CASE("rounded square is symmetric, starts at zero and has a unit flat top") {
        const auto env = rounded_square(58.0, 6.0);
        REQUIRE(env.samples.size() == 70);
        CHECK(std::abs(env.samples.front()) == 0.0);
        for (size_t k = 0; k < env.samples.size(); ++k)
            CHECK(std::abs(env.samples[k] - env.samples[env.samples.size() - 1 - k]) < 1e-15);
        for (size_t k = 6; k < 64; ++k) CHECK(env.samples[k].real() == 1.0);
        for (size_t k = 1; k < 6; ++k) CHECK(env.samples[k].real() > env.samples[k - 1].real());
        CHECK(env.peak() == 1.0);
        CHECK(env.duration() == 70.0);
    }

    TEST_CASE("envelope area of a flat pulse") {
        const auto env = rounded_square(10.0, 0.0);
        // Trapezoids with the final one closing at zero.
        CHECK(env.area().real() == doctest::Approx(9.5));
        CHECK(env.value(-1.0) == cplx{0.0});
        CHECK(env.value(100.0) == cplx{0.0});
        CHECK(env.value(3.5).real() == doctest::Approx(1.0));
    }

    TEST_CASE("gaussian envelope peaks at its centre") {
        const auto env = gaussian_envelope(21.0, 4.0);
        REQUIRE(env.samples.size() == 21);
        CHECK(env.samples[10].real() == doctest::Approx(1.0));
        CHECK(env.samples[6].real() == doctest::Approx(std::exp(-0.5)));
        CHECK_THROWS_AS(gaussian_envelope(21.0, 0.0), ParameterError);
    }

    TEST_CASE("reflection channel matches the pointwise echo sum") {
        const auto env = rounded_square(40.0, 6.0);
        const ReflectionModel m{{{7.0, cplx{0.3, 0.1}}, {20.0, cplx{-0.1, 0.05}}}};
        const auto out = apply_reflection_channel(env, m);
        CHECK(out.samples.size() == env.samples.size() + 20);
        for (size_t k = 0; k < out.samples.size(); ++k)
            CHECK(std::abs(out.samples[k] - echo_sum_at(env, m, static_cast<double>(k))) < 1e-14);
    }

    TEST_CASE("predistortion round trip stays below tolerance") {
        const auto env = rounded_square(58.0, 6.0);
        for (double tol : {1e-3, 1e-4, 1e-6}) {
            const auto pd = predistort_detailed(env, demo_reflection_model(), tol);
            const auto out = apply_reflection_channel(pd.envelope, demo_reflection_model());
            double err = 0.0;
            for (size_t k = 0; k < out.samples.size(); ++k) {
                const cplx want = k < env.samples.size() ? env.samples[k] : cplx{0.0};
                err = std::max(err, std::abs(out.samples[k] - want));
            }
            CHECK(err <= tol * env.peak());
            CHECK(pd.residual < tol);
            CHECK(pd.order >= 1);
        }
    }

    TEST_CASE("fixed-order predistortion leaves a residual of amplitude^(order+1)") {
        const auto env = rounded_square(58.0, 6.0);
        const auto m = demo_reflection_model();
        for (int order : {1, 2, 3}) {
            const auto out = apply_reflection_channel(predistort_order(env, m, order), m);
            double err = 0.0;
            for (size_t k = 0; k < out.samples.size(); ++k) {
                const cplx want = k < env.samples.size() ? env.samples[k] : cplx{0.0};
                err = std::max(err, std::abs(out.samples[k] - want));
            }
            CHECK(err == doctest::Approx(std::pow(0.35, order + 1)).epsilon(1e-9));
        }
    }

    TEST_CASE("invalid reflection models are rejected") {
        const auto env = rounded_square(10.0, 2.0);
        CHECK_THROWS_AS(apply_reflection_channel(env, ReflectionModel{{{-1.0, cplx{0.1}}}}), ParameterError);
        CHECK_THROWS_AS(apply_reflection_channel(env, ReflectionModel{{{5.0, cplx{0.1}}, {3.0, cplx{0.1}}}}),
                        ParameterError);
        CHECK_THROWS_AS(predistort(env, ReflectionModel{{{5.0, cplx{1.0}}}}), DivergenceError);
        CHECK_THROWS_AS(rounded_square(-1.0, 2.0), ParameterError);
    }

    TEST_CASE("empty model is the identity") {
        const auto env = rounded_square(10.0, 2.0);
        CHECK(apply_reflection_channel(env, {}).samples == env.samples);
        CHECK(predistort(env, {}).samples == env.samples);
        // A silent envelope needs no correction.
        const auto quiet = rounded_square(10.0, 0.0).scaled(0.0);
        CHECK(predistort(quiet, demo_reflection_model()).samples == quiet.samples);
    }

    TEST_CASE("envelope CSV round trip") {
        const auto env = predistort(rounded_square(20.0, 4.0), demo_reflection_model());
        const auto path = std::filesystem::temp_directory_path() / "fxcr_test_envelope.csv";
        write_envelope_csv(path.string(), env);
        const auto back = read_envelope_csv(path.string());
        std::filesystem::remove(path);
        REQUIRE(back.samples.size() == env.samples.size());
        CHECK(back.dt == doctest::Approx(env.dt));
        for (size_t k = 0; k < env.samples.size(); ++k) CHECK(std::abs(back.samples[k] - env.samples[k]) < 1e-12);
    }

    TEST_CASE("concatenation and delay") {
        const auto a = rounded_square(4.0, 0.0);
        const auto b = rounded_square(3.0, 0.0);
        CHECK(concatenate({a, b}).samples.size() == 7);
        const auto d = delay_envelope(a, 5.0);
        CHECK(d.samples.size() == 9);
        CHECK(d.value(4.0) == cplx{0.0});
        const auto s = add_envelopes(a, d);
        CHECK(s.samples[5].real() == 1.0);
        CHECK(s.samples[2].real() == 1.0);
    }
}
