// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fxcr/gates.hpp"
#include "fxcr/io.hpp"

namespace fxcr {

namespace {

double condition_number(const Mat4& m) {
    Eigen::JacobiSVD<Mat4> svd(m);
    const auto sv = svd.singularValues();
    return sv(3) > 0.0 ? sv(0) / sv(3) : std::numeric_limits<double>::infinity();
}

constexpr double kMaxCondition = 1e8;
// Round-off below this is not reported as a negative population.
constexpr double kNegativeTol = 1e-12;

Mat4 vec_to_rho(const CVec& v) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = v(4 * i + j);
    return r;
}

}  // namespace

PreRotation parse_prerotation(const std::string& label) {
    if (label == "II") return PreRotation::II;
    if (label == "IX") return PreRotation::IX;
    if (label == "XI") return PreRotation::XI;
    if (label == "XX") return PreRotation::XX;
    throw ParameterError("unknown pre-rotation '" + label + "'");
}

PopulationVector PopulationVector::make(const std::array<double, 4>& p) {
    double sum = 0.0;
    for (double x : p) {
        if (!(x >= 0.0)) throw ParameterError("populations must be nonnegative");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw ParameterError("populations must sum to 1");
    return PopulationVector{p};
}

PopulationVector PopulationVector::product(double e_a, double e_b) {
    return make({(1 - e_a) * (1 - e_b), (1 - e_a) * e_b, e_a * (1 - e_b), e_a * e_b});
}

PopulationVector PopulationVector::basis(int index) {
    if (index < 0 || index > 3) throw ParameterError("basis index out of range");
    PopulationVector v;
    v.p = {0, 0, 0, 0};
    v.p[static_cast<size_t>(index)] = 1.0;
    return v;
}

Mat4 permutation_matrix(const std::array<cplx, 4>& v) {
    Mat4 m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = v[static_cast<size_t>(r ^ c)];
    return m;
}

void ReadoutModel::validate() const {
    if (!(noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be >= 0");
    if (shots < 1) throw ParameterError("shots must be >= 1");
    if (condition_number(mapping()) >= kMaxCondition) throw InversionError("readout matrix is ill-conditioned");
}

Mat4 ReadoutModel::mapping() const { return permutation_matrix(m); }

ReadoutModel default_readout_model() {
    ReadoutModel r;
    r.m = {std::polar(1.0, 0.0), std::polar(1.0, 1.9), std::polar(1.0, 3.6), std::polar(1.0, -1.2)};
    return r;
}

cplx simulate_voltage(const PopulationVector& p, const ReadoutModel& model, PreRotation prerot, Rng* rng) {
    const int r = static_cast<int>(prerot);
    cplx v = 0.0;
    for (int c = 0; c < 4; ++c) v += p.p[static_cast<size_t>(c)] * model.m[static_cast<size_t>(r ^ c)];
    if (rng && model.noise_sigma > 0.0) {
        const double s = model.noise_sigma / std::sqrt(static_cast<double>(model.shots));
        const double re = rng->normal();
        const double im = rng->normal();
        v += s * cplx{re, im};
    }
    return v;
}

Voltages simulate_voltages(const PopulationVector& p, const ReadoutModel& model, Rng* rng) {
    Voltages v;
    for (int r = 0; r < 4; ++r) v[static_cast<size_t>(r)] = simulate_voltage(p, model, static_cast<PreRotation>(r), rng);
    return v;
}

InvertedPopulation invert_population(const Voltages& v, const ReadoutModel& model) {
    const Mat4 m = model.mapping();
    if (condition_number(m) >= kMaxCondition) throw InversionError("readout matrix is singular or ill-conditioned");
    const Eigen::Vector4cd sol = m.fullPivLu().solve(Eigen::Vector4cd(v[0], v[1], v[2], v[3]));
    InvertedPopulation out;
    for (int i = 0; i < 4; ++i) {
        out.p[static_cast<size_t>(i)] = sol(i).real();
        out.imag_residual = std::max(out.imag_residual, std::abs(sol(i).imag()));
        if (sol(i).real() < -kNegativeTol) out.negative = true;
    }
    return out;
}

std::array<double, 4> project_to_simplex(const std::array<double, 4>& p) {
    std::array<double, 4> u = p;
    std::sort(u.begin(), u.end(), std::greater<>());
    double css = 0.0, theta = 0.0;
    for (int k = 0; k < 4; ++k) {
        css += u[static_cast<size_t>(k)];
        const double t = (css - 1.0) / (k + 1);
        if (u[static_cast<size_t>(k)] - t > 0.0) theta = t;
    }
    std::array<double, 4> out;
    for (size_t i = 0; i < 4; ++i) out[i] = std::max(p[i] - theta, 0.0);
    return out;
}

std::array<cplx, 4> calibrate_m(const PopulationVector& p_init, const Voltages& v) {
    const std::array<cplx, 4> pc{p_init.p[0], p_init.p[1], p_init.p[2], p_init.p[3]};
    const Mat4 p = permutation_matrix(pc);
    if (condition_number(p) > kMaxCondition)
        throw InversionError("initial population is too close to uniform to calibrate M");
    const Eigen::Vector4cd m = p.fullPivLu().solve(Eigen::Vector4cd(v[0], v[1], v[2], v[3]));
    return {m(0), m(1), m(2), m(3)};
}

std::array<double, 4> measure_populations(const std::array<double, 4>& p, const ReadoutModel& model, Rng& rng) {
    PopulationVector pv;
    pv.p = p;
    return invert_population(simulate_voltages(pv, model, &rng), model).p;
}

ControlPopulation control_population(cplx a, cplx b, cplx c, cplx d) {
    const cplx den_cd = a + b + c - d;
    const cplx den_ab = a - b + c + d;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (scale == 0.0 || std::abs(den_cd) <= 1e-12 * scale || std::abs(den_ab) <= 1e-12 * scale)
        throw ProtocolError("degenerate contrasts: zero denominator");
    ControlPopulation out;
    out.from_cd = (c - d) / den_cd;
    out.from_ab = (a - b) / den_ab;
    out.mean = 0.5 * (out.from_cd.real() + out.from_ab.real());
    return out;
}

std::vector<SequenceStep> population_sequence(PopulationSequence which, double phi) {
    std::vector<SequenceStep> seq;
    seq.push_back({false, on_b(rx(kPi / 2))});
    if (which == PopulationSequence::B || which == PopulationSequence::D) seq.push_back({true, Mat4::Identity()});
    seq.push_back({false, on_b(r_axis(phi, kPi / 2))});
    if (which == PopulationSequence::C || which == PopulationSequence::D) seq.push_back({false, on_a(rx(kPi))});
    return seq;
}

std::array<cplx, 4> population_contrasts(const PopulationVector& initial, const CMat& cx_superop,
                                         const ReadoutModel& model, int phase_points, Rng* rng) {
    if (phase_points < 3) throw ParameterError("need at least 3 phase points");
    if (cx_superop.rows() != 16 || cx_superop.cols() != 16) throw ParameterError("CX superoperator must be 16 x 16");
    Mat4 rho0 = Mat4::Zero();
    for (int i = 0; i < 4; ++i) rho0(i, i) = initial.p[static_cast<size_t>(i)];

    std::array<cplx, 4> out;
    const PopulationSequence kinds[] = {PopulationSequence::A, PopulationSequence::B, PopulationSequence::C,
                                        PopulationSequence::D};
    for (int s = 0; s < 4; ++s) {
        cplx c1 = 0.0;
        for (int k = 0; k < phase_points; ++k) {
            const double phi = kTwoPi * k / phase_points;
            Mat4 rho = rho0;
            for (const auto& step : population_sequence(kinds[s], phi)) {
                if (step.is_cx) {
                    CVec v(16);
                    for (int i = 0; i < 4; ++i)
                        for (int j = 0; j < 4; ++j) v(4 * i + j) = rho(i, j);
                    rho = vec_to_rho(cx_superop * v);
                } else {
                    rho = step.gate * rho * step.gate.adjoint();
                }
            }
            PopulationVector p;
            for (int i = 0; i < 4; ++i) p.p[static_cast<size_t>(i)] = rho(i, i).real();
            c1 += simulate_voltage(p, model, PreRotation::II, rng) * std::cos(phi);
        }
        out[static_cast<size_t>(s)] = 2.0 * (2.0 / phase_points) * c1;
    }
    return out;
}

Mat4 reversed_cnot() {
    const Mat4 hh = kron(hadamard(), hadamard());
    return hh * cnot() * hh;
}

}  // namespace fxcr
