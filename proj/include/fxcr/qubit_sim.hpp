// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "fxcr/pulse.hpp"

namespace fxcr {

// Resonantly driven two-level system in its rotating frame. Envelope samples
// are rotation rates in rad/ns about the equatorial axis arg(s), held
// constant for one sample period; `detuning` (GHz) adds a z term.
Mat2 zoh_propagator(const PulseEnvelope& drive, double detuning = 0.0);

// Excited-state population after the drive, starting in |0>.
double zoh_excited(const PulseEnvelope& drive, double detuning = 0.0);

// Gaussian pulse rotating by `angle` about the axis at azimuth `axis`.
PulseEnvelope rotation_pulse(double length, double sigma, double axis, double angle, double dt = 1.0);

inline PulseEnvelope gap(double length, double dt = 1.0) {
    PulseEnvelope e;
    e.dt = dt;
    e.descriptor.kind = EnvelopeKind::Custom;
    e.samples.assign(static_cast<size_t>(std::llround(length / dt)), cplx{0.0});
    return e;
}

}  // namespace fxcr
