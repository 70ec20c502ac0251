// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "fxcr/io.hpp"

namespace fxcr {

namespace {

using Vec4 = Eigen::Vector4cd;

double wrap_angle(double x) { return std::remainder(x, kTwoPi); }

PulseEnvelope cx_envelope(double gate_time, double ramp, double dt) {
    const double flat = gate_time - 2.0 * ramp;
    if (flat < 0.0) throw ParameterError("gate_time shorter than the two ramps");
    return rounded_square(flat, ramp, dt);
}

// Rotation angle of a 2x2 block that should be close to an X-type rotation.
double block_rotation_angle(const Mat2& m) {
    const double diag = 0.5 * (std::abs(m(0, 0)) + std::abs(m(1, 1)));
    const double off = 0.5 * (std::abs(m(0, 1)) + std::abs(m(1, 0)));
    return 2.0 * std::atan2(off, diag);
}

}  // namespace

// ---------------------------------------------------------------- calibration

void CXCalibration::validate() const {
    if (!(gate_time > 0.0)) throw ParameterError("gate_time must be > 0");
    if (!(ramp >= 0.0) || !(dt > 0.0)) throw ParameterError("ramp must be >= 0 and dt > 0");
    const double vals[] = {eta.real(), eta.imag(), common_amp.real(), common_amp.imag(), cr_detuning,
                           cr_angle,   theta_a,    theta_b,           stark_shift};
    for (double v : vals)
        if (!std::isfinite(v)) throw ParameterError("calibration parameters must be finite");
    if (reflection) reflection->validate();
}

DriveConfig cx_drive(const DressedSystem& system, const CXCalibration& c) {
    DriveConfig d;
    d.frequency = system.energy(1, 1) - system.energy(1, 0) + c.cr_detuning;
    d.port_c = c.common_amp * std::polar(1.0, c.cr_angle);
    d.port_c2 = d.port_c * c.eta;
    d.crosstalk = c.crosstalk;
    d.envelope = cx_envelope(c.gate_time, c.ramp, c.dt);
    d.reflection = c.reflection;
    return d;
}

double cx_window(const DressedSystem& system, const CXCalibration& c) {
    return std::max(c.gate_time, cx_drive(system, c).delivered_envelope().duration());
}

GateResult evaluate_cx(const DressedSystem& system, const CXCalibration& c, const IntegratorOptions& options) {
    return extract_gate(system, {cx_drive(system, c)}, cx_window(system, c), c.frame(), options);
}

std::string calibration_to_json(const CXCalibration& c) {
    using nlohmann::json;
    auto z = [](cplx v) { return json::array({v.real(), v.imag()}); };
    json k = json::array();
    for (int i = 0; i < 2; ++i) {
        json row = json::array();
        for (int j = 0; j < 2; ++j) row.push_back(z(c.crosstalk(i, j)));
        k.push_back(row);
    }
    json doc{{"schema", "fxcr.cx_calibration"},
             {"schema_version", 1},
             {"eta", z(c.eta)},
             {"common_amp", z(c.common_amp)},
             {"cr_detuning_ghz", c.cr_detuning},
             {"cr_angle_rad", c.cr_angle},
             {"theta_a_rad", c.theta_a},
             {"theta_b_rad", c.theta_b},
             {"gate_time_ns", c.gate_time},
             {"stark_shift_ghz", c.stark_shift},
             {"ramp_ns", c.ramp},
             {"dt_ns", c.dt},
             {"crosstalk", k}};
    if (c.reflection) {
        json echoes = json::array();
        for (const auto& e : c.reflection->echoes) echoes.push_back({{"delay_ns", e.delay}, {"amplitude", z(e.amplitude)}});
        doc["reflection"] = echoes;
    }
    return doc.dump(2);
}

CXCalibration calibration_from_json(const std::string& text) {
    using nlohmann::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("calibration JSON: ") + e.what());
    }
    try {
        if (doc.at("schema").get<std::string>() != "fxcr.cx_calibration") throw ConfigError("not a CX calibration");
        if (doc.at("schema_version").get<int>() != 1) throw ConfigError("unsupported calibration schema_version");
        auto z = [](const json& v) { return cplx{v.at(0).get<double>(), v.at(1).get<double>()}; };
        CXCalibration c;
        c.eta = z(doc.at("eta"));
        c.common_amp = z(doc.at("common_amp"));
        c.cr_detuning = doc.at("cr_detuning_ghz").get<double>();
        c.cr_angle = doc.at("cr_angle_rad").get<double>();
        c.theta_a = doc.at("theta_a_rad").get<double>();
        c.theta_b = doc.at("theta_b_rad").get<double>();
        c.gate_time = doc.at("gate_time_ns").get<double>();
        c.stark_shift = doc.at("stark_shift_ghz").get<double>();
        c.ramp = doc.at("ramp_ns").get<double>();
        c.dt = doc.at("dt_ns").get<double>();
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) c.crosstalk(i, j) = z(doc.at("crosstalk").at(i).at(j));
        if (doc.contains("reflection")) {
            ReflectionModel m;
            for (const auto& e : doc.at("reflection"))
                m.echoes.push_back({e.at("delay_ns").get<double>(), z(e.at("amplitude"))});
            c.reflection = m;
        }
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("calibration JSON: ") + e.what());
    }
}

// ------------------------------------------------------------------ darkening

CMat port_drive_operator(const DressedSystem& system, const Crosstalk& k, cplx ratio) {
    const cplx eps_a = k(0, 0) + k(0, 1) * ratio;
    const cplx eps_b = k(1, 0) + k(1, 1) * ratio;
    return eps_a * system.n_a_op + eps_b * system.n_b_op;
}

cplx first_order_darkening(const DressedSystem& system, const Crosstalk& k) {
    const int r = system.index(0, 1), c = system.index(0, 0);
    const cplx a0 = system.n_a_op(r, c), b0 = system.n_b_op(r, c);
    const cplx den = k(0, 1) * a0 + k(1, 1) * b0;
    if (std::abs(den) < 1e-15) throw SingularityError("darkening ratio undefined: second port does not reach |01>");
    return -(k(0, 0) * a0 + k(1, 0) * b0) / den;
}

Mat2 effective_block_hamiltonian(const Mat4& u, int block, double duration) {
    if (!(duration > 0.0)) throw ParameterError("duration must be > 0");
    // Leakage leaves the projected block slightly non-unitary; its log would
    // not be Hermitian. Use the closest unitary (polar factor) instead.
    const Mat2 m = u.block<2, 2>(2 * block, 2 * block);
    Eigen::JacobiSVD<Mat2> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat2 w = svd.matrixU() * svd.matrixV().adjoint();
    Eigen::ComplexEigenSolver<Mat2> es(w);
    Mat2 logd = Mat2::Zero();
    for (int i = 0; i < 2; ++i) logd(i, i) = std::log(es.eigenvalues()(i));
    const Mat2 v = es.eigenvectors();
    return kI * (v * logd * v.inverse()) / (kTwoPi * duration);
}

cplx amplitude_for_strength(const DressedSystem& system, const Crosstalk& k, cplx eta, double strength) {
    const double n01b = std::abs(system.spectrum_b.n_elements(0, 1));
    const cplx eps_a_per_c = k(0, 0) + k(0, 1) * eta;
    if (std::abs(eps_a_per_c) == 0.0 || n01b == 0.0) throw SingularityError("zero CR drive path");
    const CMat v = port_drive_operator(system, k, eta);
    const cplx g1 = v(system.index(1, 1), system.index(1, 0));
    const double phase = std::abs(g1) > 0.0 ? -std::arg(g1) : 0.0;
    return std::polar(strength / (std::abs(eps_a_per_c) * n01b), phase);
}

DarkeningResult find_darkening_ratio_detailed(const DressedSystem& system, double drive_freq, cplx amplitude,
                                              const DarkeningOptions& o) {
    if (std::abs(amplitude) == 0.0) throw ParameterError("darkening needs a nonzero amplitude");
    if (o.scan_points < 3) throw ParameterError("scan_points must be >= 3");
    DriveConfig base;
    base.frequency = drive_freq;
    base.crosstalk = o.crosstalk;
    base.envelope = rounded_square(o.flat, o.ramp);
    base.validate();
    const double t_end = base.envelope.duration();
    CMat init = CMat::Zero(system.dim, 1);
    init(system.index(0, 0), 0) = 1.0;
    const int target = system.index(0, 1);

    auto off = [&](cplx eta) {
        DriveConfig d = base;
        d.port_c = amplitude;
        d.port_c2 = amplitude * eta;
        return propagate_frame_columns(system, {d}, init, 0.0, t_end, o.integrator)(target, 0);
    };

    DarkeningResult res;
    res.first_order = first_order_darkening(system, o.crosstalk);
    double mag = std::abs(res.first_order), arg = std::arg(res.first_order);

    auto scan = [&](bool magnitude, std::vector<std::array<double, 2>>& dump) {
        const double center = magnitude ? mag : arg;
        const double half = magnitude ? o.scan_span * std::max(mag, 1e-3) : o.scan_span;
        int best = 0;
        for (int i = 0; i < o.scan_points; ++i) {
            const double x = center + half * (2.0 * i / (o.scan_points - 1) - 1.0);
            const cplx eta = magnitude ? std::polar(x, arg) : std::polar(mag, x);
            dump.push_back({x, std::abs(off(eta))});
            if (dump.back()[1] < dump[static_cast<size_t>(best)][1]) best = i;
        }
        if (best == 0 || best == o.scan_points - 1) {
            std::ostringstream msg;
            msg << "darkening scan did not bracket a minimum (" << (magnitude ? "|eta|" : "arg eta") << "):";
            for (const auto& p : dump) msg << " (" << p[0] << ", " << p[1] << ")";
            throw CalibrationError(msg.str());
        }
        (magnitude ? mag : arg) = dump[static_cast<size_t>(best)][0];
    };
    scan(true, res.magnitude_scan);
    scan(false, res.phase_scan);

    // f(eta) = <01|psi(T)> is close to complex-linear in eta.
    cplx eta = std::polar(mag, arg);
    cplx f = off(eta);
    for (int it = 0; it < o.max_newton && std::abs(f) > o.target; ++it) {
        const cplx h = 1e-4 * std::max(std::abs(eta), 1e-3);
        const cplx deriv = (off(eta + h) - f) / h;
        if (std::abs(deriv) == 0.0) break;
        const cplx next = eta - f / deriv;
        const cplx fn = off(next);
        if (std::abs(fn) >= std::abs(f)) break;
        eta = next;
        f = fn;
    }
    res.eta = eta;
    res.off_amplitude = std::abs(f);
    return res;
}

cplx find_darkening_ratio(const DressedSystem& system, double drive_freq, cplx amplitude, const DarkeningOptions& o) {
    return find_darkening_ratio_detailed(system, drive_freq, amplitude, o).eta;
}

cplx find_single_qubit_ratio(const DressedSystem& system, const Crosstalk& k) {
    const cplx a0 = system.n_a_op(system.index(0, 0), system.index(0, 1));
    const cplx b0 = system.n_b_op(system.index(0, 0), system.index(0, 1));
    const cplx a1 = system.n_a_op(system.index(1, 0), system.index(1, 1));
    const cplx b1 = system.n_b_op(system.index(1, 0), system.index(1, 1));
    const cplx da = a0 - a1, db = b0 - b1;
    const cplx den = k(0, 1) * da + k(1, 1) * db;
    if (std::abs(den) < 1e-12 * (std::abs(b0) + std::abs(a0))) {
        // No conditional matrix element: pick the ratio that keeps A undriven.
        return std::abs(k(0, 1)) > 0.0 ? -k(0, 0) / k(0, 1) : cplx{0.0};
    }
    const cplx num = k(0, 0) * da + k(1, 0) * db;
    if (std::abs(num) < 1e-15) return 0.0;
    return -num / den;
}

// ------------------------------------------------------------------ syndromes

const char* cal_param_name(CalParam p) {
    switch (p) {
        case CalParam::EtaMag: return "eta_magnitude";
        case CalParam::EtaArg: return "eta_phase";
        case CalParam::AmpMag: return "amplitude";
        case CalParam::Detuning: return "cr_detuning";
        case CalParam::Angle: return "cr_angle";
        case CalParam::ThetaB: return "theta_b";
        case CalParam::ThetaA: return "theta_a";
    }
    return "?";
}

char syndrome_label(CalParam p) { return static_cast<char>('a' + static_cast<int>(p)); }

double get_param(const CXCalibration& c, CalParam p) {
    switch (p) {
        case CalParam::EtaMag: return std::abs(c.eta);
        case CalParam::EtaArg: return std::arg(c.eta);
        case CalParam::AmpMag: return std::abs(c.common_amp);
        case CalParam::Detuning: return c.cr_detuning;
        case CalParam::Angle: return c.cr_angle;
        case CalParam::ThetaB: return c.theta_b;
        case CalParam::ThetaA: return c.theta_a;
    }
    return 0.0;
}

void set_param(CXCalibration& c, CalParam p, double v) {
    switch (p) {
        case CalParam::EtaMag: c.eta = std::polar(v, std::arg(c.eta)); break;
        case CalParam::EtaArg: c.eta = std::polar(std::abs(c.eta), v); break;
        case CalParam::AmpMag: c.common_amp = std::polar(v, std::arg(c.common_amp)); break;
        case CalParam::Detuning: c.cr_detuning = v; break;
        case CalParam::Angle: c.cr_angle = v; break;
        case CalParam::ThetaB: c.theta_b = v; break;
        case CalParam::ThetaA: c.theta_a = v; break;
    }
}

const SyndromeEntry& SyndromeReport::at(CalParam p) const {
    for (const auto& e : entries)
        if (e.param == p) return e;
    throw ProtocolError(std::string("no syndrome entry for ") + cal_param_name(p));
}

std::array<int, 7> default_repetitions(int n) {
    if (n < 1) throw ParameterError("repetitions must be >= 1");
    const int even = n % 2 == 0 ? n : n + 1;
    return {n, n, n % 2 == 1 ? n : n + 1, n, n, n, even};
}

namespace {

struct Probe {
    Vec4 psi;
    int qubit;  // 0 = A, 1 = B
};

Vec4 ket(int a, int b) {
    Vec4 v = Vec4::Zero();
    v(2 * a + b) = 1.0;
    return v;
}

double excited(const Vec4& psi, int qubit) {
    return qubit == 0 ? std::norm(psi(2)) + std::norm(psi(3)) : std::norm(psi(1)) + std::norm(psi(3));
}

// Final states of the (+) and (-) members of a parameter's sequence pair.
std::array<Probe, 2> run_pair(const Mat4& g, CalParam p, int n) {
    Mat4 gn = Mat4::Identity();
    for (int i = 0; i < n; ++i) gn = g * gn;
    std::array<Probe, 2> out;
    for (int s = 0; s < 2; ++s) {
        const double sign = s == 0 ? 1.0 : -1.0;
        Vec4 psi;
        int q = 1;
        switch (p) {
            case CalParam::EtaMag:
                psi = on_b(rx(sign * kPi / 2)) * gn * ket(0, 0);
                break;
            case CalParam::EtaArg:
                psi = on_b(ry(sign * kPi / 2)) * gn * ket(0, 0);
                break;
            case CalParam::AmpMag:
                psi = gn * on_b(rx(sign * kPi / 2)) * ket(1, 0);
                break;
            case CalParam::Detuning: {
                const Mat4 unit = on_b(rz(kPi)) * g;
                Mat4 un = Mat4::Identity();
                for (int i = 0; i < n; ++i) un = unit * un;
                psi = un * on_b(ry(sign * kPi / 2)) * ket(1, 0);
                break;
            }
            case CalParam::Angle: {
                const Mat4 unit = on_b(rx(kPi)) * g;
                Mat4 un = Mat4::Identity();
                for (int i = 0; i < n; ++i) un = unit * un;
                psi = on_b(rx(sign * kPi / 2)) * un * on_b(ry(kPi / 2)) * ket(1, 0);
                break;
            }
            case CalParam::ThetaB:
                psi = on_b(ry(sign * kPi / 2)) * gn * on_b(rx(kPi / 2)) * ket(0, 0);
                break;
            case CalParam::ThetaA:
                psi = on_a(ry(sign * kPi / 2)) * gn * on_a(rx(kPi / 2)) * ket(0, 0);
                q = 0;
                break;
        }
        out[static_cast<size_t>(s)] = {psi, q};
    }
    return out;
}

// Populations of the computational states, optionally through joint readout.
double measured_excited(const Probe& pr, const SyndromeOptions& o, Rng* rng) {
    if (!o.readout || !rng) return excited(pr.psi, pr.qubit);
    std::array<double, 4> p;
    for (int i = 0; i < 4; ++i) p[static_cast<size_t>(i)] = std::norm(pr.psi(i));
    const auto m = measure_populations(p, *o.readout, *rng);
    return pr.qubit == 0 ? m[2] + m[3] : m[1] + m[3];
}

double signal(const Mat4& g, CalParam p, int n, const SyndromeOptions& o, Rng* rng) {
    const auto pair = run_pair(g, p, n);
    return measured_excited(pair[0], o, rng) - measured_excited(pair[1], o, rng);
}

bool is_virtual(CalParam p) { return p == CalParam::ThetaA || p == CalParam::ThetaB; }

double default_window(CalParam p, const CXCalibration& c, const SyndromeOptions& o) {
    switch (p) {
        case CalParam::EtaMag: return o.amp_window * std::max(std::abs(c.eta), 1e-3);
        case CalParam::AmpMag: return o.amp_window * std::abs(c.common_amp);
        case CalParam::Detuning: return o.detuning_window;
        default: return o.angle_window;
    }
}

// Framed gate for a calibration; the raw propagator is reused when only
// virtual phases change.
struct GateCache {
    const DressedSystem& system;
    const IntegratorOptions& integrator;
    Mat4 raw = Mat4::Identity();
    bool have = false;

    Mat4 framed(const CXCalibration& c, bool reuse_raw) {
        if (!reuse_raw || !have) {
            raw = evaluate_cx(system, c, integrator).raw;
            have = true;
        }
        return virtual_z_compose(raw, c.frame());
    }
};

struct Sweep {
    std::vector<double> xs;
    std::vector<double> ds;
};

Sweep sweep(GateCache& cache, const CXCalibration& c, CalParam p, CalParam sig, int n, double window, int points,
            const SyndromeOptions& o, Rng* rng) {
    Sweep s;
    const double x0 = get_param(c, p);
    for (int i = 0; i < points; ++i) {
        const double x = x0 + window * (2.0 * i / (points - 1) - 1.0);
        CXCalibration trial = c;
        set_param(trial, p, x);
        s.xs.push_back(x);
        s.ds.push_back(signal(cache.framed(trial, is_virtual(p)), sig, n, o, rng));
    }
    return s;
}

// Crossing by linear interpolation between the bracketing pair closest to the
// current value; returns false if no sign change exists.
bool crossing(const Sweep& s, double x0, double& at, double& slope) {
    bool found = false;
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < s.xs.size(); ++i) {
        const double d0 = s.ds[i], d1 = s.ds[i + 1];
        if (d0 == 0.0 || (d0 < 0) != (d1 < 0)) {
            const double sl = (d1 - d0) / (s.xs[i + 1] - s.xs[i]);
            const double x = sl != 0.0 ? s.xs[i] - d0 / sl : s.xs[i];
            if (std::abs(x - x0) < best) {
                best = std::abs(x - x0);
                at = x;
                slope = sl;
                found = true;
            }
        }
    }
    return found;
}

SyndromeEntry locate(GateCache& cache, const CXCalibration& c, CalParam p, CalParam sig, int n, double window,
                     const SyndromeOptions& o, Rng* rng) {
    SyndromeEntry e;
    e.param = p;
    e.sequence = syndrome_label(sig);
    e.current = get_param(c, p);
    e.repetitions = n;
    Sweep s;
    for (int attempt = 0; attempt <= o.widen_retries; ++attempt) {
        e.window = window;
        s = sweep(cache, c, p, sig, n, window, o.points, o, rng);
        if (crossing(s, e.current, e.crossing, e.slope)) return e;
        window *= 3.0;
    }
    std::ostringstream msg;
    msg << "no crossing for " << cal_param_name(p) << " within +-" << e.window << " of " << e.current << "; signals";
    for (double d : s.ds) msg << ' ' << d;
    throw CalibrationError(msg.str());
}

}  // namespace

double syndrome_signal(const Mat4& gate, CalParam param, int repetitions) {
    const SyndromeOptions o;
    return signal(gate, param, repetitions, o, nullptr);
}

SyndromeReport syndrome_experiments(const DressedSystem& system, const CXCalibration& calib, int repetitions,
                                    const SyndromeOptions& options) {
    return syndrome_experiments(system, calib, default_repetitions(repetitions), options);
}

SyndromeReport syndrome_experiments(const DressedSystem& system, const CXCalibration& calib,
                                    const std::array<int, 7>& reps, const SyndromeOptions& o) {
    calib.validate();
    for (int n : reps)
        if (n < 1) throw ParameterError("repetitions must be >= 1");
    if (reps[6] % 2 != 0) throw ParameterError("the theta_A syndrome needs an even number of repetitions");
    if (o.points < 2) throw ParameterError("a sweep needs at least 2 points");
    Rng rng(o.seed);
    Rng* r = o.readout ? &rng : nullptr;
    GateCache cache{system, o.integrator};

    // The two OFF-block sequences respond to both eta coordinates; pair each
    // with the coordinate it is most sensitive to.
    CalParam sig_mag = CalParam::EtaMag, sig_arg = CalParam::EtaArg;
    {
        const double wm = default_window(CalParam::EtaMag, calib, o), wa = default_window(CalParam::EtaArg, calib, o);
        auto slope = [&](CalParam p, CalParam sig, double w) {
            const Sweep s = sweep(cache, calib, p, sig, reps[0], w, 2, o, r);
            return (s.ds[1] - s.ds[0]) / (2.0 * w);
        };
        const double aa = slope(CalParam::EtaMag, CalParam::EtaMag, wm) * wm;
        const double ab = slope(CalParam::EtaMag, CalParam::EtaArg, wm) * wm;
        const double ba = slope(CalParam::EtaArg, CalParam::EtaMag, wa) * wa;
        const double bb = slope(CalParam::EtaArg, CalParam::EtaArg, wa) * wa;
        if (std::abs(ab * ba) > std::abs(aa * bb)) std::swap(sig_mag, sig_arg);
    }

    SyndromeReport rep;
    for (size_t i = 0; i < kCalParams.size(); ++i) {
        const CalParam p = kCalParams[i];
        CalParam sig = p;
        if (p == CalParam::EtaMag) sig = sig_mag;
        if (p == CalParam::EtaArg) sig = sig_arg;
        rep.entries.push_back(locate(cache, calib, p, sig, reps[i], default_window(p, calib, o), o, r));
    }
    return rep;
}

// ------------------------------------------------------------------ tune-up

double stark_shift_estimate(const DressedSystem& system, const DriveConfig& drive) {
    const auto [eps_a, eps_b] = drive.local_amplitudes();
    const double peak = drive.envelope.peak();
    const CMat v = peak * (eps_a * system.n_a_op + eps_b * system.n_b_op);
    const double w = drive.frequency;
    constexpr double kResonant = 0.02;  // GHz; pairs this close are driven, not shifted
    auto shift = [&](int k) {
        double s = 0.0;
        for (int m = 0; m < system.dim; ++m) {
            if (m == k) continue;
            const double up = system.energies(k) + w - system.energies(m);
            const double down = system.energies(k) - w - system.energies(m);
            // H = (V e^{-iwt} + V^dag e^{iwt}) / 2
            if (std::abs(up) > kResonant) s += std::norm(0.5 * v(m, k)) / up;
            if (std::abs(down) > kResonant) s += std::norm(0.5 * std::conj(v(k, m))) / down;
        }
        return s;
    };
    const double a0 = 0.5 * (shift(system.index(0, 0)) + shift(system.index(0, 1)));
    const double a1 = 0.5 * (shift(system.index(1, 0)) + shift(system.index(1, 1)));
    return a0 - a1;
}

CalibrationOutcome calibrate_cx(const DressedSystem& system, double gate_time,
                                const std::optional<CoherenceSpec>& coherence, const CalibrationOptions& o) {
    if (!(gate_time > 2.0 * o.ramp)) throw ParameterError("gate_time must exceed the two ramps");
    if (coherence) coherence->validate();
    CalibrationOutcome out;
    CXCalibration c;
    GateCache cache{system, o.integrator};

    if (o.start) {
        c = *o.start;
        c.gate_time = gate_time;
    } else {
        c.gate_time = gate_time;
        c.ramp = o.ramp;
        c.crosstalk = o.crosstalk;
        c.reflection = o.reflection;
        const cplx eta0 = first_order_darkening(system, c.crosstalk);
        const CMat v = port_drive_operator(system, c.crosstalk, eta0);
        const cplx g1 = v(system.index(1, 1), system.index(1, 0));
        const double area = std::abs(cx_envelope(gate_time, c.ramp, c.dt).area());
        if (std::abs(g1) == 0.0) throw CalibrationError("no conditional drive path: |<11|H|10>| = 0");
        c.common_amp = std::polar(0.5 / (area * std::abs(g1)), -std::arg(g1));

        DarkeningOptions dopt;
        dopt.crosstalk = c.crosstalk;
        dopt.flat = gate_time - 2.0 * c.ramp;
        dopt.ramp = c.ramp;
        dopt.integrator = o.integrator;
        const double f_ref = system.energy(1, 1) - system.energy(1, 0);
        // Darkening depends on the amplitude at short gate times, so alternate.
        for (int round = 0; round < 2; ++round) {
            c.eta = find_darkening_ratio(system, f_ref, c.common_amp, dopt);
            for (int k = 0; k < 3; ++k) {
                const Mat4 raw = evaluate_cx(system, c, o.integrator).raw;
                const double beta = block_rotation_angle(raw.block<2, 2>(2, 2));
                if (beta > 0.0) c.common_amp *= kPi / beta;
            }
        }
        const GateFrame f = frame_phases(evaluate_cx(system, c, o.integrator).raw);
        c.theta_a = f.theta_a;
        c.theta_b = f.theta_b;
    }
    c.validate();

    const auto reps = default_repetitions(o.repetitions);
    std::array<double, 7> windows;
    for (size_t i = 0; i < 7; ++i) windows[i] = default_window(kCalParams[i], c, o.syndrome);
    auto tolerance = [&](CalParam p) {
        switch (p) {
            case CalParam::EtaMag: return o.amp_tol * std::max(std::abs(c.eta), 1e-3);
            case CalParam::AmpMag: return o.amp_tol * std::abs(c.common_amp);
            case CalParam::Detuning: return o.detuning_tol;
            default: return o.angle_tol;
        }
    };
    auto floor_window = [&](CalParam p) { return 20.0 * tolerance(p); };

    Rng rng(o.syndrome.seed);
    Rng* r = o.syndrome.readout ? &rng : nullptr;
    for (int it = 0; it < o.max_iterations; ++it) {
        std::array<double, 7> shift{};
        SyndromeReport rep;

        // eta: both OFF-block sequences against both coordinates, solved jointly.
        {
            const double wm = windows[0], wa = windows[1];
            const Sweep sm = sweep(cache, c, CalParam::EtaMag, CalParam::EtaMag, reps[0], wm, 3, o.syndrome, r);
            const Sweep sm2 = sweep(cache, c, CalParam::EtaMag, CalParam::EtaArg, reps[0], wm, 3, o.syndrome, r);
            const Sweep sa = sweep(cache, c, CalParam::EtaArg, CalParam::EtaMag, reps[1], wa, 3, o.syndrome, r);
            const Sweep sa2 = sweep(cache, c, CalParam::EtaArg, CalParam::EtaArg, reps[1], wa, 3, o.syndrome, r);
            Eigen::Matrix2d jac;
            jac << (sm.ds[2] - sm.ds[0]) / (2 * wm), (sa.ds[2] - sa.ds[0]) / (2 * wa),
                (sm2.ds[2] - sm2.ds[0]) / (2 * wm), (sa2.ds[2] - sa2.ds[0]) / (2 * wa);
            const Eigen::Vector2d d0(0.5 * (sm.ds[1] + sa.ds[1]), 0.5 * (sm2.ds[1] + sa2.ds[1]));
            Eigen::Vector2d step = -jac.fullPivLu().solve(d0);
            if (!step.allFinite()) throw CalibrationError("eta syndromes are degenerate");
            step(0) = std::clamp(step(0), -3 * wm, 3 * wm);
            step(1) = std::clamp(step(1), -3 * wa, 3 * wa);
            for (int k = 0; k < 2; ++k) {
                const CalParam p = kCalParams[static_cast<size_t>(k)];
                SyndromeEntry e;
                e.param = p;
                e.sequence = syndrome_label(p);
                e.current = get_param(c, p);
                e.crossing = e.current + step(k);
                e.slope = jac(k, k);
                e.repetitions = reps[static_cast<size_t>(k)];
                e.window = k == 0 ? wm : wa;
                rep.entries.push_back(e);
                shift[static_cast<size_t>(k)] = step(k);
            }
            set_param(c, CalParam::EtaMag, get_param(c, CalParam::EtaMag) + step(0));
            set_param(c, CalParam::EtaArg, get_param(c, CalParam::EtaArg) + step(1));
        }

        for (size_t i = 2; i < 7; ++i) {
            const CalParam p = kCalParams[i];
            const SyndromeEntry e = locate(cache, c, p, p, reps[i], windows[i], o.syndrome, r);
            shift[i] = e.crossing - e.current;
            set_param(c, p, e.crossing);
            rep.entries.push_back(e);
        }
        c.theta_a = wrap_angle(c.theta_a);
        c.theta_b = wrap_angle(c.theta_b);

        std::array<double, 7> snapshot;
        for (size_t i = 0; i < 7; ++i) snapshot[i] = get_param(c, kCalParams[i]);
        out.history.push_back(snapshot);
        out.last_report = rep;
        out.iterations = it + 1;

        bool done = true;
        for (size_t i = 0; i < 7; ++i) {
            const CalParam p = kCalParams[i];
            if (std::abs(shift[i]) >= tolerance(p)) done = false;
            windows[i] = std::clamp(4.0 * std::abs(shift[i]), floor_window(p), default_window(p, c, o.syndrome));
        }
        if (done && out.iterations >= o.min_iterations) {
            out.converged = true;
            break;
        }
    }
    if (!out.converged) {
        std::ostringstream msg;
        msg << "CX calibration did not converge in " << o.max_iterations << " iterations; last crossings:";
        for (const auto& e : out.last_report.entries)
            msg << " " << cal_param_name(e.param) << " " << e.current << "->" << e.crossing;
        throw CalibrationError(msg.str());
    }

    const DriveConfig drive = cx_drive(system, c);
    c.stark_shift = stark_shift_estimate(system, drive);
    const GateResult g = evaluate_cx(system, c, o.integrator);
    out.coherent_error = 1.0 - average_gate_fidelity(g.u, cx_pi());
    out.leakage = g.leakage;
    if (coherence && coherence->any()) {
        const auto proc = lindblad_process(system, {drive}, cx_window(system, c), *coherence, o.integrator);
        out.total_error = 1.0 - average_gate_fidelity_channel(frame_superop(proc.superop, c.frame()), cx_pi());
    }
    out.calibration = c;
    return out;
}

}  // namespace fxcr
