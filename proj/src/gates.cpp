// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/gates.hpp"

#include <cmath>

namespace fxcr {

Mat2 rx(double a) {
    Mat2 m;
    m << std::cos(a / 2), -kI * std::sin(a / 2), -kI * std::sin(a / 2), std::cos(a / 2);
    return m;
}

Mat2 ry(double a) {
    Mat2 m;
    m << std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2);
    return m;
}

Mat2 rz(double a) {
    Mat2 m;
    m << std::polar(1.0, -a / 2), 0.0, 0.0, std::polar(1.0, a / 2);
    return m;
}

Mat2 r_axis(double axis, double a) {
    const double c = std::cos(a / 2), s = std::sin(a / 2);
    Mat2 m;
    m << c, -kI * s * std::polar(1.0, -axis), -kI * s * std::polar(1.0, axis), c;
    return m;
}

Mat2 hadamard() {
    Mat2 m;
    m << 1.0, 1.0, 1.0, -1.0;
    return m / std::sqrt(2.0);
}

Mat4 kron(const Mat2& a, const Mat2& b) {
    Mat4 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return m;
}

Mat4 on_a(const Mat2& g) { return kron(g, Mat2::Identity()); }
Mat4 on_b(const Mat2& g) { return kron(Mat2::Identity(), g); }

Mat4 cx_pi() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 3) = m(3, 2) = -kI;
    return m;
}

Mat4 cnot() {
    Mat4 m = Mat4::Zero();
    m(0, 0) = m(1, 1) = 1.0;
    m(2, 3) = m(3, 2) = 1.0;
    return m;
}

Mat4 z_on_a(double t) {
    Mat4 m = Mat4::Identity();
    m(2, 2) = m(3, 3) = std::polar(1.0, t);
    return m;
}

Mat4 z_on_b(double t) {
    Mat4 m = Mat4::Identity();
    m(1, 1) = m(3, 3) = std::polar(1.0, t);
    return m;
}

Mat4 cr_experimental(double ta, double tb) {
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1.0;
    m(1, 1) = std::polar(1.0, tb);
    m(2, 3) = m(3, 2) = -kI * std::polar(1.0, ta);
    return m;
}

GateFrame GateFrame::reduced() const {
    auto wrap = [](double x) {
        x = std::fmod(x, kTwoPi);
        return x < 0 ? x + kTwoPi : x;
    };
    return {wrap(theta_a), wrap(theta_b)};
}

Mat4 virtual_z_compose(const Mat4& u, double ta, double tb) {
    return z_on_b(-tb / 2) * u * z_on_b(-tb / 2) * z_on_a(tb / 2 - ta);
}

GateFrame frame_phases(const Mat4& u) {
    const cplx ref = u(0, 0);
    const cplx on = kI * 0.5 * (u(2, 3) + u(3, 2));
    return {std::arg(on / ref), std::arg(u(1, 1) / ref)};
}

double off_block_norm(const Mat4& u) {
    Eigen::Matrix2cd upper = u.block<2, 2>(0, 2);
    Eigen::Matrix2cd lower = u.block<2, 2>(2, 0);
    Eigen::JacobiSVD<Eigen::Matrix2cd> su(upper), sl(lower);
    return std::max(su.singularValues()(0), sl.singularValues()(0));
}

double average_gate_fidelity(const Mat4& actual, const Mat4& target) {
    const Mat4 m = target.adjoint() * actual;
    const double d = 4.0;
    return ((m * m.adjoint()).trace().real() + std::norm(m.trace())) / (d * (d + 1.0));
}

CMat unitary_superop(const Mat4& u) {
    // vec(U rho U^dag) with row-major vec is (U kron conj(U)) vec(rho).
    CMat s(16, 16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int k = 0; k < 4; ++k)
                for (int l = 0; l < 4; ++l) s(4 * i + j, 4 * k + l) = u(i, k) * std::conj(u(j, l));
    return s;
}

CMat depolarizing_superop(double lambda) {
    CMat s = (1.0 - lambda) * CMat::Identity(16, 16);
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) s(4 * i + i, 4 * k + k) += lambda / 4.0;
    return s;
}

Mat4 apply_superop(const CMat& s, const Mat4& rho) {
    CVec v(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v(4 * i + j) = rho(i, j);
    const CVec w = s * v;
    Mat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out(i, j) = w(4 * i + j);
    return out;
}

double average_gate_fidelity_channel(const CMat& s, const Mat4& target) {
    // Sum_ij <i|U^dag L(|i><j|) U|j> + Sum_i Tr L(|i><i|), over d (d + 1).
    double acc = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Mat4 e = Mat4::Zero();
            e(i, j) = 1.0;
            const Mat4 out = target.adjoint() * apply_superop(s, e) * target;
            acc += out(i, j).real();
            if (i == j) acc += apply_superop(s, e).trace().real();
        }
    return acc / 20.0;
}

double coherence_limit(double t1_a, double t1_b, double t2e_a, double t2e_b, double gate_time_ns) {
    if (!(t1_a > 0 && t1_b > 0 && t2e_a > 0 && t2e_b > 0 && gate_time_ns >= 0))
        throw ParameterError("coherence times must be positive");
    const double rate_per_us = (1.0 / t1_a + 1.0 / t1_b + 2.0 / t2e_a + 2.0 / t2e_b) / 5.0;
    return gate_time_ns * 1e-3 * rate_per_us;
}

double phase_insensitive_distance(const CMat& a, const CMat& b) {
    const cplx overlap = (b.adjoint() * a).trace();
    const cplx phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : cplx{1.0};
    return (a - phase * b).norm();
}

}  // namespace fxcr
