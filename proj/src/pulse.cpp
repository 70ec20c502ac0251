// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fxcr/io.hpp"

namespace fxcr {

namespace {

int whole_samples(double length, double dt, const char* what) {
    if (length < 0.0) throw ParameterError(std::string(what) + " must be non-negative");
    const double n = length / dt;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-9) throw ParameterError(std::string(what) + " must be a multiple of dt");
    return static_cast<int>(r);
}

int snap_delay(double delay, double dt) {
    const double n = delay / dt;
    const double r = std::round(n);
    if (std::abs(n - r) > 1e-9) {
        std::ostringstream os;
        os << "echo delay " << delay << " ns snapped to " << r * dt << " ns";
        warn(os.str());
    }
    return static_cast<int>(r);
}

}  // namespace

double PulseEnvelope::peak() const {
    double p = 0.0;
    for (const auto& s : samples) p = std::max(p, std::abs(s));
    return p;
}

cplx PulseEnvelope::value(double t) const {
    if (samples.empty() || t < 0.0) return 0.0;
    const double x = t / dt;
    const auto n = static_cast<double>(samples.size());
    if (x >= n) return 0.0;
    const auto k = static_cast<size_t>(x);
    const double frac = x - static_cast<double>(k);
    const cplx lo = samples[k];
    const cplx hi = (k + 1 < samples.size()) ? samples[k + 1] : cplx{0.0};
    return lo + frac * (hi - lo);
}

cplx PulseEnvelope::area() const {
    // Trapezoids between consecutive samples, the last one closing at zero.
    cplx a = 0.0;
    for (size_t k = 0; k < samples.size(); ++k) {
        const cplx next = (k + 1 < samples.size()) ? samples[k + 1] : cplx{0.0};
        a += 0.5 * (samples[k] + next) * dt;
    }
    return a;
}

PulseEnvelope PulseEnvelope::scaled(cplx factor) const {
    PulseEnvelope out = *this;
    for (auto& s : out.samples) s *= factor;
    return out;
}

PulseEnvelope rounded_square(double flat, double ramp, double dt) {
    EnvelopeDescriptor d;
    d.kind = EnvelopeKind::RoundedSquare;
    d.flat = flat;
    d.ramp = ramp;
    d.sigma = ramp / 2.0;
    d.total = flat + 2.0 * ramp;
    d.dt = dt;
    return make_envelope(d);
}

PulseEnvelope gaussian_envelope(double total, double sigma, double dt) {
    EnvelopeDescriptor d;
    d.kind = EnvelopeKind::Gaussian;
    d.total = total;
    d.sigma = sigma;
    d.dt = dt;
    return make_envelope(d);
}

PulseEnvelope make_envelope(const EnvelopeDescriptor& desc) {
    if (!(desc.dt > 0.0)) throw ParameterError("dt must be > 0");
    PulseEnvelope env;
    env.dt = desc.dt;
    env.descriptor = desc;

    if (desc.kind == EnvelopeKind::Gaussian) {
        const int n = whole_samples(desc.total, desc.dt, "gaussian total");
        if (n > 0 && !(desc.sigma > 0.0)) throw ParameterError("gaussian sigma must be > 0");
        const double center = 0.5 * (n - 1);
        const double s = desc.sigma / desc.dt;
        env.samples.resize(n);
        for (int k = 0; k < n; ++k) {
            const double x = (k - center) / s;
            env.samples[k] = std::exp(-0.5 * x * x);
        }
        return env;
    }
    if (desc.kind == EnvelopeKind::Custom) throw ParameterError("custom envelopes carry their own samples");

    const int nflat = whole_samples(desc.flat, desc.dt, "flat length");
    const int nramp = whole_samples(desc.ramp, desc.dt, "ramp length");
    env.descriptor.sigma = desc.ramp / 2.0;
    env.descriptor.total = desc.flat + 2.0 * desc.ramp;
    env.samples.assign(nflat + 2 * nramp, 1.0);
    if (nramp > 0) {
        // Half Gaussian with sigma = ramp / 2, lifted so the first sample is 0.
        const double r = nramp;
        const double s = r / 2.0;
        const double floor = std::exp(-r * r / (2.0 * s * s));
        for (int k = 0; k < nramp; ++k) {
            const double g = std::exp(-(k - r) * (k - r) / (2.0 * s * s));
            const double v = (g - floor) / (1.0 - floor);
            env.samples[k] = v;
            env.samples[nflat + 2 * nramp - 1 - k] = v;
        }
    }
    return env;
}

PulseEnvelope concatenate(const std::vector<PulseEnvelope>& parts) {
    PulseEnvelope out;
    out.descriptor.kind = EnvelopeKind::Custom;
    if (parts.empty()) return out;
    out.dt = parts.front().dt;
    out.descriptor.dt = out.dt;
    for (const auto& p : parts) {
        if (std::abs(p.dt - out.dt) > 1e-12) throw ParameterError("concatenated envelopes need a common dt");
        out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    }
    return out;
}

PulseEnvelope delay_envelope(const PulseEnvelope& env, double delay) {
    const int shift = whole_samples(delay, env.dt, "delay");
    PulseEnvelope out = env;
    out.descriptor.kind = EnvelopeKind::Custom;
    out.samples.insert(out.samples.begin(), shift, cplx{0.0});
    return out;
}

PulseEnvelope add_envelopes(const PulseEnvelope& a, const PulseEnvelope& b) {
    if (std::abs(a.dt - b.dt) > 1e-12) throw ParameterError("added envelopes need a common dt");
    PulseEnvelope out = a.samples.size() >= b.samples.size() ? a : b;
    const PulseEnvelope& other = a.samples.size() >= b.samples.size() ? b : a;
    out.descriptor.kind = EnvelopeKind::Custom;
    for (size_t k = 0; k < other.samples.size(); ++k) out.samples[k] += other.samples[k];
    return out;
}

void ReflectionModel::validate() const {
    double last = 0.0;
    for (const auto& e : echoes) {
        if (!(e.delay > last)) throw ParameterError("echo delays must be positive and strictly increasing");
        if (!(std::abs(e.amplitude) < 1.0)) throw ParameterError("echo amplitudes must have magnitude < 1");
        last = e.delay;
    }
}

ReflectionModel demo_reflection_model() { return ReflectionModel{{{20.0, cplx{0.35, 0.0}}}}; }

namespace {

// One application of the echo operator A: (A e)(t) = sum_k a_k e(t - d_k).
std::vector<cplx> echo_operator(const std::vector<cplx>& in, const std::vector<std::pair<int, cplx>>& taps,
                                int max_shift) {
    std::vector<cplx> out(in.size() + max_shift, cplx{0.0});
    for (const auto& [shift, amp] : taps)
        for (size_t k = 0; k < in.size(); ++k) out[k + shift] += amp * in[k];
    return out;
}

std::vector<std::pair<int, cplx>> taps_of(const ReflectionModel& model, double dt, int& max_shift) {
    std::vector<std::pair<int, cplx>> taps;
    max_shift = 0;
    for (const auto& e : model.echoes) {
        const int s = snap_delay(e.delay, dt);
        taps.emplace_back(s, e.amplitude);
        max_shift = std::max(max_shift, s);
    }
    return taps;
}

}  // namespace

PulseEnvelope apply_reflection_channel(const PulseEnvelope& env, const ReflectionModel& model) {
    model.validate();
    if (model.empty()) return env;
    int max_shift = 0;
    const auto taps = taps_of(model, env.dt, max_shift);
    PulseEnvelope out = env;
    out.descriptor.kind = EnvelopeKind::Custom;
    out.samples = echo_operator(env.samples, taps, max_shift);
    for (size_t k = 0; k < env.samples.size(); ++k) out.samples[k] += env.samples[k];
    return out;
}

Predistortion predistort_detailed(const PulseEnvelope& env, const ReflectionModel& model, double residual_tol,
                                  int max_order) {
    for (const auto& e : model.echoes)
        if (std::abs(e.amplitude) >= 1.0) throw DivergenceError("echo amplitude >= 1: echo cancellation diverges");
    model.validate();
    Predistortion res;
    res.envelope = env;
    const double peak = env.peak();
    if (model.empty() || peak == 0.0) return res;

    int max_shift = 0;
    const auto taps = taps_of(model, env.dt, max_shift);
    std::vector<cplx> total = env.samples;
    std::vector<cplx> generation = env.samples;
    for (int order = 1;; ++order) {
        generation = echo_operator(generation, taps, max_shift);
        double mag = 0.0;
        for (auto& g : generation) {
            g = -g;
            mag = std::max(mag, std::abs(g));
        }
        if (mag < residual_tol * peak) {
            res.order = order - 1;
            res.residual = peak > 0.0 ? mag / peak : 0.0;
            break;
        }
        if (order > max_order) throw DivergenceError("echo cancellation did not reach the residual tolerance");
        total.resize(generation.size(), cplx{0.0});
        for (size_t k = 0; k < generation.size(); ++k) total[k] += generation[k];
    }
    res.envelope.samples = std::move(total);
    res.envelope.descriptor.kind = EnvelopeKind::Custom;
    return res;
}

PulseEnvelope predistort(const PulseEnvelope& env, const ReflectionModel& model, double residual_tol) {
    return predistort_detailed(env, model, residual_tol).envelope;
}

PulseEnvelope predistort_order(const PulseEnvelope& env, const ReflectionModel& model, int order) {
    model.validate();
    if (model.empty() || order <= 0) return env;
    int max_shift = 0;
    const auto taps = taps_of(model, env.dt, max_shift);
    std::vector<cplx> total = env.samples;
    std::vector<cplx> generation = env.samples;
    for (int k = 0; k < order; ++k) {
        generation = echo_operator(generation, taps, max_shift);
        for (auto& g : generation) g = -g;
        total.resize(generation.size(), cplx{0.0});
        for (size_t i = 0; i < generation.size(); ++i) total[i] += generation[i];
    }
    PulseEnvelope out = env;
    out.samples = std::move(total);
    out.descriptor.kind = EnvelopeKind::Custom;
    return out;
}

void write_envelope_csv(const std::string& path, const PulseEnvelope& env) {
    CsvWriter w(path);
    w.header({"t_ns", "re", "im"});
    for (size_t k = 0; k < env.samples.size(); ++k)
        w.row({static_cast<double>(k) * env.dt, env.samples[k].real(), env.samples[k].imag()});
}

PulseEnvelope read_envelope_csv(const std::string& path) {
    const auto rows = read_csv(path);
    PulseEnvelope env;
    env.descriptor.kind = EnvelopeKind::Custom;
    std::vector<double> times;
    for (const auto& r : rows) {
        if (r.size() < 3) throw ParameterError("envelope CSV rows need t_ns,re,im");
        times.push_back(std::stod(r[0]));
        env.samples.emplace_back(std::stod(r[1]), std::stod(r[2]));
    }
    env.dt = times.size() > 1 ? times[1] - times[0] : 1.0;
    env.descriptor.dt = env.dt;
    return env;
}

}  // namespace fxcr
