// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "fxcr/types.hpp"

namespace fxcr {

enum class EnvelopeKind { Gaussian, RoundedSquare, Custom };

struct EnvelopeDescriptor {
    EnvelopeKind kind = EnvelopeKind::RoundedSquare;
    double flat = 0.0;   // ns, rounded square
    double ramp = 0.0;   // ns, rounded square edge length
    double sigma = 0.0;  // ns, gaussian width
    double total = 0.0;  // ns, gaussian length
    double dt = 1.0;     // ns
};

// Sampled complex envelope. Samples sit at t_k = k * dt and are linearly
// interpolated; the envelope is zero outside [0, N dt].
struct PulseEnvelope {
    std::vector<cplx> samples;
    double dt = 1.0;
    EnvelopeDescriptor descriptor;

    double duration() const { return dt * static_cast<double>(samples.size()); }
    double peak() const;
    cplx value(double t) const;
    // Integral of the interpolated envelope over its support.
    cplx area() const;
    PulseEnvelope scaled(cplx factor) const;
};

PulseEnvelope make_envelope(const EnvelopeDescriptor& descriptor);
PulseEnvelope rounded_square(double flat, double ramp, double dt = 1.0);
PulseEnvelope gaussian_envelope(double total, double sigma, double dt = 1.0);

// Concatenate envelopes back to back (same dt).
PulseEnvelope concatenate(const std::vector<PulseEnvelope>& parts);
PulseEnvelope delay_envelope(const PulseEnvelope& env, double delay);
PulseEnvelope add_envelopes(const PulseEnvelope& a, const PulseEnvelope& b);

struct Echo {
    double delay = 0.0;  // ns
    cplx amplitude;      // relative to the main pulse
};

struct ReflectionModel {
    std::vector<Echo> echoes;

    bool empty() const { return echoes.empty(); }
    void validate() const;
};

// The dominant echo of the measured setup: 35 % arriving 20 ns later.
ReflectionModel demo_reflection_model();

// output(t) = env(t) + sum_k a_k env(t - d_k); the output is extended so no
// echo is truncated. Off-grid delays are snapped to dt with a warning.
PulseEnvelope apply_reflection_channel(const PulseEnvelope& env, const ReflectionModel& model);

struct Predistortion {
    PulseEnvelope envelope;
    int order = 0;           // number of correction generations kept
    double residual = 0.0;   // max round-trip error relative to peak
};

inline constexpr double kDefaultPredistortTol = 1e-4;

// Iterated echo cancellation: every correction generation spawns the next,
// stopping once the next generation falls below residual_tol of the peak.
Predistortion predistort_detailed(const PulseEnvelope& env, const ReflectionModel& model,
                                  double residual_tol = kDefaultPredistortTol, int max_order = 400);
PulseEnvelope predistort(const PulseEnvelope& env, const ReflectionModel& model,
                         double residual_tol = kDefaultPredistortTol);
// Fixed number of correction generations.
PulseEnvelope predistort_order(const PulseEnvelope& env, const ReflectionModel& model, int order);

void write_envelope_csv(const std::string& path, const PulseEnvelope& env);
PulseEnvelope read_envelope_csv(const std::string& path);

}  // namespace fxcr
