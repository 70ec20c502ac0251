// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/qubit_sim.hpp"

#include <cmath>

namespace fxcr {

Mat2 zoh_propagator(const PulseEnvelope& drive, double detuning) {
    Mat2 u = Mat2::Identity();
    const double hz = 0.5 * kTwoPi * detuning;
    for (const cplx& s : drive.samples) {
        const double hx = 0.5 * s.real(), hy = 0.5 * s.imag();
        const double norm = std::sqrt(hx * hx + hy * hy + hz * hz);
        if (norm == 0.0) continue;
        const double c = std::cos(norm * drive.dt), sn = std::sin(norm * drive.dt) / norm;
        Mat2 step;
        step << cplx{c, -sn * hz}, cplx{-sn * hy, -sn * hx}, cplx{sn * hy, -sn * hx}, cplx{c, sn * hz};
        u = step * u;
    }
    return u;
}

double zoh_excited(const PulseEnvelope& drive, double detuning) {
    return std::norm(zoh_propagator(drive, detuning)(1, 0));
}

PulseEnvelope rotation_pulse(double length, double sigma, double axis, double angle, double dt) {
    PulseEnvelope g = gaussian_envelope(length, sigma, dt);
    double area = 0.0;
    for (const cplx& s : g.samples) area += s.real() * dt;
    return g.scaled(std::polar(angle / area, axis));
}

}  // namespace fxcr
