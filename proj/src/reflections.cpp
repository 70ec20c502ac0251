// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/reflections.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "fxcr/fit.hpp"
#include "fxcr/io.hpp"
#include "fxcr/qubit_sim.hpp"

namespace fxcr {

namespace {

PulseEnvelope through(const PulseEnvelope& env, const ReflectionModel& channel) {
    return channel.empty() ? env : apply_reflection_channel(env, channel);
}

PulseEnvelope sweep_sequence(bool quadrature, int gap_ns, int n, const ReflectionScanOptions& o) {
    const double sigma = o.pi_len / 4.0;
    std::vector<PulseEnvelope> parts;
    for (int it = 0; it < n; ++it) {
        if (quadrature) {
            parts.push_back(rotation_pulse(o.pi_len, sigma, 0.0, kPi));
            parts.push_back(gap(gap_ns));
            parts.push_back(rotation_pulse(o.pi_len, sigma, 0.0, -kPi));
        } else {
            parts.push_back(rotation_pulse(o.pi_len, sigma, 0.0, it % 2 == 0 ? kPi : -kPi));
            parts.push_back(gap(gap_ns));
            parts.push_back(rotation_pulse(o.pi_len, sigma, kPi / 2, kPi));
        }
        parts.push_back(gap(o.spacing));
    }
    return concatenate(parts);
}

std::vector<double> flatten(const ReflectionTraces& t) {
    std::vector<double> out;
    for (const auto& v : t.quadrature) out.insert(out.end(), v.begin(), v.end());
    for (const auto& v : t.in_phase) out.insert(out.end(), v.begin(), v.end());
    return out;
}

// Gap positions (ns) of trace features: clusters of large first differences,
// reduced to their |derivative|-weighted centroid.
std::vector<double> feature_positions(const ReflectionTraces& t) {
    const size_t len = t.quadrature.front().size();
    std::vector<double> deriv(len > 0 ? len - 1 : 0, 0.0);
    auto accumulate = [&](const std::vector<std::vector<double>>& traces) {
        for (const auto& tr : traces)
            for (size_t k = 0; k + 1 < tr.size(); ++k) deriv[k] += std::abs(tr[k + 1] - tr[k]);
    };
    accumulate(t.quadrature);
    accumulate(t.in_phase);
    const double peak = deriv.empty() ? 0.0 : *std::max_element(deriv.begin(), deriv.end());
    std::vector<double> centers;
    if (peak < 1e-6) return centers;
    const double thresh = 0.1 * peak;
    size_t k = 0;
    while (k < deriv.size()) {
        if (deriv[k] < thresh) {
            ++k;
            continue;
        }
        double w = 0.0, m = 0.0;
        size_t last = k;
        for (size_t j = k; j < deriv.size() && (deriv[j] >= thresh || (j + 1 < deriv.size() && deriv[j + 1] >= thresh));
             ++j) {
            w += deriv[j];
            m += deriv[j] * (static_cast<double>(j) + 0.5);
            last = j;
        }
        centers.push_back(m / w);
        k = last + 1;
    }
    return centers;
}

double trace_cost(const ReflectionTraces& measured, const ReflectionModel& model, const ReflectionScanOptions& o) {
    const auto a = flatten(measured), b = flatten(reflection_traces(model, o));
    double c = 0.0;
    for (size_t i = 0; i < a.size(); ++i) c += (a[i] - b[i]) * (a[i] - b[i]);
    return c;
}

ReflectionModel fit_amplitudes(const ReflectionTraces& measured, const std::vector<double>& delays,
                               const ReflectionScanOptions& o) {
    const auto target = flatten(measured);
    const int ne = static_cast<int>(delays.size());
    auto model_of = [&](const RVec& x) {
        ReflectionModel m;
        for (int i = 0; i < ne; ++i) m.echoes.push_back({delays[static_cast<size_t>(i)], cplx{x(2 * i), x(2 * i + 1)}});
        return m;
    };
    ResidualFn fn = [&](const RVec& x, RVec& r) {
        ReflectionModel m = model_of(x);
        for (auto& e : m.echoes)
            if (std::abs(e.amplitude) >= 0.99) e.amplitude *= 0.99 / std::abs(e.amplitude);
        const auto sim = flatten(reflection_traces(m, o));
        for (size_t i = 0; i < sim.size(); ++i) r(static_cast<Eigen::Index>(i)) = sim[i] - target[i];
    };
    // A few sign-diverse starts: the traces are even in some amplitude directions.
    LeastSquaresFit best;
    best.cost = std::numeric_limits<double>::infinity();
    const double starts[][2] = {{0.05, 0.05}, {-0.05, 0.05}, {0.05, -0.05}, {-0.05, -0.05}};
    for (const auto& s : starts) {
        RVec x0(2 * ne);
        for (int i = 0; i < ne; ++i) {
            x0(2 * i) = s[0];
            x0(2 * i + 1) = s[1];
        }
        auto fit = levenberg_marquardt(fn, x0, static_cast<int>(target.size()));
        if (fit.cost < best.cost) best = fit;
    }
    return model_of(best.params);
}

}  // namespace

ReflectionTraces reflection_traces(const ReflectionModel& channel, const ReflectionScanOptions& o) {
    if (o.pi_len < 8.0) throw ParameterError("pi_len must be >= 8 ns");
    ReflectionTraces t;
    const int gaps = static_cast<int>(std::lround(o.max_delay));
    for (int n : o.repetitions) {
        std::vector<double> q, p;
        for (int g = 0; g <= gaps; ++g) {
            q.push_back(zoh_excited(through(sweep_sequence(true, g, n, o), channel)));
            p.push_back(zoh_excited(through(sweep_sequence(false, g, n, o), channel)));
        }
        t.quadrature.push_back(std::move(q));
        t.in_phase.push_back(std::move(p));
    }
    return t;
}

ReflectionModel characterize_reflections(const ReflectionModel& hidden, const ReflectionScanOptions& o) {
    hidden.validate();
    const ReflectionTraces measured = reflection_traces(hidden, o);
    auto centers = feature_positions(measured);
    if (centers.empty()) return {};

    // Feature-to-delay offset from probe echoes of known delay.
    const double probe_delay = std::round(o.pi_len + 0.5 * (o.max_delay - o.pi_len));
    double offset = 0.0;
    for (cplx a : {cplx{0.1, 0.0}, cplx{0.0, 0.1}}) {
        const auto c = feature_positions(reflection_traces(ReflectionModel{{{probe_delay, a}}}, o));
        if (c.size() != 1) throw CalibrationError("probe echo produced an ambiguous trace");
        offset += 0.5 * (probe_delay - c.front());
    }

    std::vector<double> delays;
    for (double c : centers) {
        const double d = std::round(c + offset);
        if (d <= 0.0) continue;
        if (!delays.empty() && d - delays.back() < o.pi_len)
            warn("reflection echoes closer than the pi pulse length may be unresolved");
        if (delays.empty() || d > delays.back()) delays.push_back(d);
    }
    if (delays.empty()) return {};

    ReflectionModel est = fit_amplitudes(measured, delays, o);
    // Integer refinement of each delay by one sample.
    double cost = trace_cost(measured, est, o);
    for (size_t i = 0; i < delays.size(); ++i) {
        for (double shift : {-1.0, 1.0}) {
            auto trial = delays;
            trial[i] += shift;
            if (trial[i] <= 0.0 || (i > 0 && trial[i] <= trial[i - 1]) ||
                (i + 1 < trial.size() && trial[i] >= trial[i + 1]))
                continue;
            ReflectionModel m = fit_amplitudes(measured, trial, o);
            const double c = trace_cost(measured, m, o);
            if (c < cost) {
                cost = c;
                est = m;
                delays = trial;
            }
        }
    }
    return est;
}

const std::vector<std::array<const char*, 2>>& allxy_pairs() {
    static const std::vector<std::array<const char*, 2>> pairs{
        {"I", "I"}, {"X", "X"}, {"Y", "Y"}, {"X", "Y"}, {"Y", "X"}, {"x", "I"}, {"y", "I"},
        {"x", "y"}, {"y", "x"}, {"x", "Y"}, {"y", "X"}, {"X", "y"}, {"Y", "x"}, {"x", "X"},
        {"X", "x"}, {"y", "Y"}, {"Y", "y"}, {"X", "I"}, {"Y", "I"}, {"x", "x"}, {"y", "y"}};
    return pairs;
}

const std::vector<double>& allxy_ideal() {
    static const std::vector<double> ideal{0, 0, 0, 0, 0, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5,
                                           0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 1, 1, 1, 1};
    return ideal;
}

std::vector<double> allxy_trace(const SingleQubitGateSet& g) {
    auto pulse = [&](const char* name) {
        const std::string s(name);
        if (s == "I") return gap(g.pi_len);
        const double axis = (s == "Y" || s == "y") ? kPi / 2 : 0.0;
        const double angle = (s == "X" || s == "Y") ? kPi : kPi / 2;
        return rotation_pulse(g.pi_len, g.sigma, axis, angle * g.amplitude_scale);
    };
    std::vector<double> out;
    for (const auto& [first, second] : allxy_pairs()) {
        PulseEnvelope env = concatenate({pulse(first), pulse(second)});
        if (g.predistortion && !g.predistortion->empty()) env = predistort(env, *g.predistortion);
        if (g.channel && !g.channel->empty()) env = apply_reflection_channel(env, *g.channel);
        out.push_back(zoh_excited(env, g.detuning));
    }
    return out;
}

}  // namespace fxcr
