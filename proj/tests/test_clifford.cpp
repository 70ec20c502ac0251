// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>

#include <doctest.h>

#include "fxcr/clifford.hpp"
#include "fxcr/gates.hpp"
#include "fxcr/rng.hpp"

using namespace fxcr;

namespace {

// Conjugation of every Pauli lands on a Pauli (up to phase): the defining property.
bool is_clifford(const Mat4& u) {
    Mat2 p[4];
    p[0] = Mat2::Identity();
    p[1] << 0, 1, 1, 0;
    p[2] << 0, -kI, kI, 0;
    p[3] << 1, 0, 0, -1;
    for (int i = 0; i < 16; ++i) {
        const Mat4 c = u * kron(p[i / 4], p[i % 4]) * u.adjoint();
        bool found = false;
        for (int j = 0; j < 16 && !found; ++j) {
            const cplx ov = (kron(p[j / 4], p[j % 4]).adjoint() * c).trace() / 4.0;
            found = std::abs(std::abs(ov) - 1.0) < 1e-9;
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("clifford") {
    TEST_CASE("single-qubit group: 24 distinct elements, 28 pulses") {
        const auto& g = single_qubit_cliffords();
        REQUIRE(g.size() == 24);
        int pulses = 0;
        for (size_t i = 0; i < g.size(); ++i) {
            pulses += g[i].physical_1q_count;
            CHECK(phase_insensitive_distance(recompose(g[i].decomposition, 1), g[i].unitary) < 1e-12);
            CHECK(single_qubit_index(g[i].unitary.topLeftCorner<2, 2>()) == i);
            for (size_t j = 0; j < i; ++j) CHECK(phase_insensitive_distance(g[i].unitary, g[j].unitary) > 1e-6);
        }
        CHECK(pulses == 28);
    }

    TEST_CASE("two-qubit group: every element recomposes from its decomposition") {
        const auto& g = TwoQubitCliffords::instance();
        std::array<int, 4> counts{};
        for (size_t i = 0; i < g.size(); ++i) {
            const auto e = g.element(i);
            ++counts[TwoQubitCliffords::element_class(i)];
            if (i % 7 == 0) CHECK(phase_insensitive_distance(recompose(e.decomposition, 2), e.unitary) < 1e-10);
        }
        CHECK(counts == std::array<int, 4>{576, 5184, 5184, 576});
        CHECK(g.average_cx_count() == 1.5);
    }

    TEST_CASE("elements are Clifford and indexed consistently") {
        const auto& g = TwoQubitCliffords::instance();
        Rng rng(3);
        for (int k = 0; k < 200; ++k) {
            const auto i = rng.below(g.size());
            CHECK(is_clifford(g.unitary(i)));
            CHECK(g.index_of(std::polar(1.0, 0.3) * g.unitary(i)) == i);
        }
        CHECK_THROWS_AS(g.index_of(on_a(rx(0.3))), ProtocolError);
        CHECK(g.index_of(cnot()) < g.size());
        CHECK(g.index_of(cx_pi()) < g.size());
    }

    TEST_CASE("composition and inverses") {
        const auto& g = TwoQubitCliffords::instance();
        Rng rng(4);
        const auto id = g.index_of(Mat4::Identity());
        for (int k = 0; k < 500; ++k) {
            const auto a = rng.below(g.size()), b = rng.below(g.size());
            const Mat4 prod = g.unitary(b) * g.unitary(a);
            CHECK(phase_insensitive_distance(g.unitary(g.compose(a, b)), prod) < 1e-10);
            CHECK(g.compose(a, g.inverse(a)) == id);
        }
    }

    TEST_CASE("RB sequences multiply to the identity and are reproducible") {
        for (std::size_t m : {1u, 5u, 40u}) {
            const auto s = generate_rb_sequence(m, std::nullopt, 99);
            CHECK(s.cliffords.size() == m);
            CHECK(phase_insensitive_distance(ideal_sequence_unitary(s), Mat4::Identity()) < 1e-9);
            const auto t = generate_rb_sequence(m, std::nullopt, 99);
            CHECK(t.cliffords == s.cliffords);
            CHECK(t.recovery == s.recovery);
            const auto si = generate_rb_sequence(m, cx_pi(), 99);
            CHECK(phase_insensitive_distance(ideal_sequence_unitary(si), Mat4::Identity()) < 1e-9);
        }
        CHECK(generate_rb_sequence(30, std::nullopt, 1).cliffords != generate_rb_sequence(30, std::nullopt, 2).cliffords);
    }
}
