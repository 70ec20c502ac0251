// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fxcr/calibration.hpp"
#include "fxcr/gates.hpp"
#include "fxcr/io.hpp"
#include "fxcr/qpt.hpp"
#include "fxcr/rb.hpp"
#include "fxcr/readout.hpp"
#include "fxcr/reflections.hpp"
#include "fxcr/rng.hpp"

namespace fxcr {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ---- config reading ------------------------------------------------------

enum class Bound { Any, Positive, NonNegative };

class Reader {
public:
    Reader(const json& obj, std::string path, std::vector<std::string>& errors)
        : obj_(obj), path_(std::move(path)), errors_(errors) {
        if (!obj_.is_object()) fail("", "must be an object");
    }

    Reader child(const char* key) {
        static const json empty = json::object();
        const json* v = take(key);
        if (!v) return Reader(empty, where(key), errors_);
        if (!v->is_object()) {
            fail(key, "must be an object");
            return Reader(empty, where(key), errors_);
        }
        return Reader(*v, where(key), errors_);
    }

    void num(const char* key, double& out, Bound bound = Bound::Any) {
        if (const json* v = take(key)) {
            if (!v->is_number()) return fail(key, "must be a number");
            set_num(key, v->get<double>(), out, bound);
        }
    }

    void opt_num(const char* key, std::optional<double>& out, Bound bound = Bound::Any) {
        if (const json* v = take(key)) {
            if (v->is_null()) {
                out.reset();
                return;
            }
            if (!v->is_number()) return fail(key, "must be a number or null");
            double x = 0.0;
            if (set_num(key, v->get<double>(), x, bound)) out = x;
        }
    }

    void integer(const char* key, int& out, int min) {
        if (const json* v = take(key)) {
            if (!v->is_number_integer()) return fail(key, "must be an integer");
            const auto x = v->get<long long>();
            if (x < min) return fail(key, "must be >= " + std::to_string(min));
            out = static_cast<int>(x);
        }
    }

    void boolean(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) return fail(key, "must be true or false");
            out = v->get<bool>();
        }
    }

    void text(const char* key, std::string& out) {
        if (const json* v = take(key)) {
            if (!v->is_string()) return fail(key, "must be a string");
            out = v->get<std::string>();
        }
    }

    void numbers(const char* key, std::vector<double>& out) {
        if (const json* v = take(key)) {
            if (!v->is_array()) return fail(key, "must be an array of numbers");
            std::vector<double> xs;
            for (const auto& e : *v) {
                if (!e.is_number()) return fail(key, "must be an array of numbers");
                xs.push_back(e.get<double>());
            }
            out = std::move(xs);
        }
    }

    const json* take(const char* key) {
        seen_.insert(key);
        if (!obj_.is_object()) return nullptr;
        const auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    bool has(const char* key) const { return obj_.is_object() && obj_.contains(key); }

    void fail(const std::string& key, const std::string& msg) { errors_.push_back(where(key) + ": " + msg); }

    // Reports every key that no reader asked for.
    void finish() {
        if (!obj_.is_object()) return;
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key())) errors_.push_back(where(it.key()) + ": unknown key");
    }

    std::string where(const std::string& key) const {
        if (key.empty()) return path_.empty() ? "<root>" : path_;
        return path_.empty() ? key : path_ + "." + key;
    }

    static bool parse_complex(const json& v, cplx& out) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) return false;
        out = {v[0].get<double>(), v[1].get<double>()};
        return true;
    }

private:
    bool set_num(const std::string& key, double x, double& out, Bound bound) {
        if (!std::isfinite(x)) {
            fail(key, "must be finite");
            return false;
        }
        if (bound == Bound::Positive && !(x > 0.0)) {
            fail(key, "must be > 0");
            return false;
        }
        if (bound == Bound::NonNegative && !(x >= 0.0)) {
            fail(key, "must be >= 0");
            return false;
        }
        out = x;
        return true;
    }

    const json& obj_;
    std::string path_;
    std::vector<std::string>& errors_;
    std::set<std::string> seen_;
};

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json echo_json(const Echo& e) { return {{"delay_ns", e.delay}, {"amplitude", complex_json(e.amplitude)}}; }

bool parse_echo(Reader& parent, const json& v, const std::string& key, Echo& out) {
    if (!v.is_object()) {
        parent.fail(key, "must be an object with delay_ns and amplitude");
        return false;
    }
    Echo e;
    bool ok = true;
    if (!v.contains("delay_ns") || !v["delay_ns"].is_number() || !(v["delay_ns"].get<double>() > 0.0)) {
        parent.fail(key + ".delay_ns", "must be a number > 0");
        ok = false;
    } else {
        e.delay = v["delay_ns"].get<double>();
    }
    if (!v.contains("amplitude") || !Reader::parse_complex(v["amplitude"], e.amplitude)) {
        parent.fail(key + ".amplitude", "must be [re, im]");
        ok = false;
    } else if (!(std::abs(e.amplitude) < 1.0)) {
        parent.fail(key + ".amplitude", "magnitude must be < 1");
        ok = false;
    }
    for (auto it = v.begin(); it != v.end(); ++it)
        if (it.key() != "delay_ns" && it.key() != "amplitude") parent.fail(key + "." + it.key(), "unknown key");
    if (ok) out = e;
    return ok;
}

void read_fluxonium(Reader r, FluxoniumParams& p) {
    r.num("e_c_ghz", p.e_c, Bound::Positive);
    r.num("e_l_ghz", p.e_l, Bound::Positive);
    r.num("e_j_ghz", p.e_j, Bound::NonNegative);
    if (r.has("flux_quanta")) {
        double flux = 0.0;
        r.num("flux_quanta", flux);
        p.phi_ext = kTwoPi * flux;
    } else {
        r.take("flux_quanta");
    }
    r.finish();
}

json fluxonium_json(const FluxoniumParams& p) {
    return {{"e_c_ghz", p.e_c}, {"e_l_ghz", p.e_l}, {"e_j_ghz", p.e_j}, {"flux_quanta", p.phi_ext / kTwoPi}};
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

// ---- scenario plumbing ---------------------------------------------------

class Outputs {
public:
    explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

    CsvWriter csv(const std::string& name) {
        files_.push_back(name);
        return CsvWriter((dir_ / name).string());
    }

    void json_file(const std::string& name, const json& j) {
        files_.push_back(name);
        std::ofstream out(dir_ / name);
        if (!out) throw Error("cannot open " + (dir_ / name).string() + " for writing");
        out << j.dump(2) << '\n';
    }

    void text_file(const std::string& name, const std::string& text) {
        files_.push_back(name);
        std::ofstream out(dir_ / name);
        if (!out) throw Error("cannot open " + (dir_ / name).string() + " for writing");
        out << text;
    }

    const fs::path& dir() const { return dir_; }
    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

class Checks {
public:
    void add(const std::string& name, double value, double lo, double hi) {
        checks_.push_back({name, value, lo, hi, std::isfinite(value) && value >= lo && value <= hi});
    }
    std::vector<Check>& list() { return checks_; }

private:
    std::vector<Check> checks_;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

std::vector<std::size_t> as_lengths(const std::vector<double>& xs) {
    std::vector<std::size_t> out;
    for (double x : xs) out.push_back(static_cast<std::size_t>(std::llround(x)));
    return out;
}

json matrix_json(const CMat& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(complex_json(m(i, j)));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"layout", "row-major [re, im]"}, {"data", data}};
}

struct Context {
    const ScenarioConfig& cfg;
    Outputs& out;
    Checks& checks;
    std::uint64_t seed() const { return cfg.seed.value_or(0); }
};

DriveConfig darkened_on_drive(const DressedSystem& sys, const DriveSettings& d, cplx eta) {
    DriveConfig drive;
    drive.frequency = sys.energy(1, 1) - sys.energy(1, 0);
    const cplx c = amplitude_for_strength(sys, d.crosstalk, eta, d.strength);
    drive.port_c = c;
    drive.port_c2 = eta * c;
    drive.crosstalk = d.crosstalk;
    drive.envelope = rounded_square(d.gate_time - 2.0 * d.ramp, d.ramp, d.dt);
    if (!d.reflection.empty()) drive.reflection = d.reflection;
    return drive;
}

CalibrationOptions calibration_options(const ScenarioConfig& cfg) {
    CalibrationOptions o;
    o.crosstalk = cfg.drive.crosstalk;
    o.ramp = cfg.drive.ramp;
    if (!cfg.drive.reflection.empty()) o.reflection = cfg.drive.reflection;
    o.syndrome.seed = cfg.seed.value_or(1);
    return o;
}

std::optional<CoherenceSpec> active_coherence(const ScenarioConfig& cfg) {
    if (!cfg.coherence_enabled) return std::nullopt;
    return cfg.coherence;
}

double coherence_limit_of(const CoherenceSpec& c, double gate_time) {
    return coherence_limit(c.t1_a.value_or(kInf), c.t1_b.value_or(kInf), c.t2e_a.value_or(kInf),
                           c.t2e_b.value_or(kInf), gate_time);
}

// ---- scenarios -----------------------------------------------------------

void run_table1(Context& ctx) {
    const auto sys = build_coupled_system(ctx.cfg.system);
    const RMat na = charge_matrix_elements(sys.spectrum_a, 3);
    const RMat nb = charge_matrix_elements(sys.spectrum_b, 3);
    auto pair = [&](int q) {
        double x = conditional_transition(sys, q, 1, 2, 0), y = conditional_transition(sys, q, 1, 2, 1);
        if (x > y) std::swap(x, y);
        return std::pair{x, y};
    };
    const auto [a12_lo, a12_hi] = pair(0);
    const auto [b12_lo, b12_hi] = pair(1);

    CoupledParams uncoupled = ctx.cfg.system;
    uncoupled.j_c = 0.0;
    const double zz_uncoupled = build_coupled_system(uncoupled).static_zz;

    struct Row {
        std::string name;
        double computed, reference, tolerance;
    };
    const std::vector<Row> rows{
        {"omega_a_ghz", sys.raw_energies(sys.index(1, 0)), 0.5552, 0.030},
        {"omega_b_ghz", sys.raw_energies(sys.index(0, 1)), 1.0045, 0.030},
        {"n01_a", na(0, 1), 0.13, 0.03},
        {"n01_b", nb(0, 1), 0.20, 0.03},
        {"n12_a", na(1, 2), 0.55, 0.03},
        {"n12_b", nb(1, 2), 0.59, 0.03},
        {"omega_a12_low_ghz", a12_lo, 3.610, 0.050},
        {"omega_a12_high_ghz", a12_hi, 3.691, 0.050},
        {"omega_b12_low_ghz", b12_lo, 3.719, 0.050},
        {"omega_b12_high_ghz", b12_hi, 3.796, 0.050},
        {"static_zz_mhz", 1e3 * sys.static_zz, 0.9, 0.3},
        {"static_zz_uncoupled_mhz", 1e3 * zz_uncoupled, 0.0, 1e-9},
    };
    auto csv = ctx.out.csv("table1.csv");
    csv.header({"quantity", "computed", "reference", "tolerance", "pass"});
    for (const auto& r : rows) {
        const bool pass = std::abs(r.computed - r.reference) <= r.tolerance;
        csv.row_text({r.name, fmt_num(r.computed), fmt_num(r.reference), fmt_num(r.tolerance), pass ? "1" : "0"});
        ctx.checks.add(r.name, r.computed, r.reference - r.tolerance, r.reference + r.tolerance);
    }
}

void run_chevron(Context& ctx) {
    const auto& d = ctx.cfg.drive;
    const auto sys = build_coupled_system(ctx.cfg.system);
    const cplx eta = first_order_darkening(sys, d.crosstalk);
    const DriveConfig drive = darkened_on_drive(sys, d, eta);
    std::vector<double> dets = ctx.cfg.sweep.detunings.empty() ? linspace(-0.03, 0.03, 21) : ctx.cfg.sweep.detunings;
    std::vector<double> times = ctx.cfg.sweep.times.empty() ? linspace(0.0, 160.0, 41) : ctx.cfg.sweep.times;

    auto csv = ctx.out.csv("chevron.csv");
    csv.header({"control", "detuning_ghz", "time_ns", "p1_b"});
    std::array<RMat, 2> maps;
    for (int control = 0; control < 2; ++control) {
        maps[control] = chevron_scan(sys, drive, dets, times, control);
        for (size_t i = 0; i < dets.size(); ++i)
            for (size_t k = 0; k < times.size(); ++k)
                csv.row({static_cast<double>(control), dets[i], times[k],
                         maps[control](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k))});
    }
    const auto res = std::min_element(dets.begin(), dets.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    const auto row = static_cast<Eigen::Index>(res - dets.begin());
    ctx.checks.add("on_resonant_max_p1", maps[1].row(row).maxCoeff(), 0.9, 1.0 + 1e-9);
    ctx.checks.add("off_resonant_max_p1", maps[0].row(row).maxCoeff(), 0.0, 0.01);
}

void run_darkening(Context& ctx) {
    const auto& d = ctx.cfg.drive;
    const auto sys = build_coupled_system(ctx.cfg.system);
    DarkeningOptions o;
    o.crosstalk = d.crosstalk;
    o.flat = d.gate_time - 2.0 * d.ramp;
    o.ramp = d.ramp;
    const cplx eta0 = first_order_darkening(sys, d.crosstalk);
    const cplx c = amplitude_for_strength(sys, d.crosstalk, eta0, d.strength);
    const double freq = sys.energy(1, 1) - sys.energy(1, 0);
    const auto dr = find_darkening_ratio_detailed(sys, freq, c, o);

    {
        auto csv = ctx.out.csv("darkening_scan.csv");
        csv.header({"axis", "value", "off_amplitude"});
        for (const auto& s : dr.magnitude_scan) csv.row_text({"magnitude", fmt_num(s[0]), fmt_num(s[1])});
        for (const auto& s : dr.phase_scan) csv.row_text({"phase", fmt_num(s[0]), fmt_num(s[1])});
    }
    ctx.out.json_file("darkening_ratio.json", {{"eta", complex_json(dr.eta)},
                                               {"first_order", complex_json(dr.first_order)},
                                               {"off_amplitude", dr.off_amplitude},
                                               {"drive_frequency_ghz", freq}});

    DriveConfig drive;
    drive.frequency = freq;
    drive.port_c = c;
    drive.port_c2 = dr.eta * c;
    drive.crosstalk = d.crosstalk;
    drive.envelope = rounded_square(o.flat, o.ramp, d.dt);
    const auto grid = linspace(0.0, d.gate_time, static_cast<int>(std::lround(d.gate_time / d.dt)) + 1);
    const auto off = propagate_schrodinger(sys, {drive}, basis_state(sys, 0, 0), grid);
    ctx.checks.add("off_max_p01", off.populations.col(1).maxCoeff(), 0.0, 1e-4);

    const auto gate = extract_gate(sys, {drive}, d.gate_time);
    const Mat2 h_off = effective_block_hamiltonian(gate.raw, 0, d.gate_time);
    const Mat2 h_on = effective_block_hamiltonian(gate.raw, 1, d.gate_time);
    ctx.checks.add("off_relative_element", std::abs(h_off(0, 1)) / std::abs(h_on(0, 1)), 0.0, 1e-6);

    auto csv = ctx.out.csv("bloch.csv");
    csv.header({"control", "time_ns", "x", "y", "z"});
    for (int control = 0; control < 2; ++control) {
        const auto traj = bloch_trajectory(sys, {drive}, grid, control);
        for (size_t k = 0; k < traj.size(); ++k)
            csv.row({static_cast<double>(control), grid[k], traj[k][0], traj[k][1], traj[k][2]});
    }
}

void write_history(Context& ctx, const std::string& name, const CalibrationOutcome& oc) {
    auto csv = ctx.out.csv(name);
    std::vector<std::string> head{"iteration"};
    for (CalParam p : kCalParams) head.emplace_back(cal_param_name(p));
    csv.header(head);
    for (size_t i = 0; i < oc.history.size(); ++i) {
        std::vector<double> row{static_cast<double>(i + 1)};
        row.insert(row.end(), oc.history[i].begin(), oc.history[i].end());
        csv.row(row);
    }
}

void run_calibrate(Context& ctx) {
    const auto sys = build_coupled_system(ctx.cfg.system);
    const auto coh = active_coherence(ctx.cfg);
    const auto oc = calibrate_cx(sys, ctx.cfg.drive.gate_time, coh, calibration_options(ctx.cfg));
    ctx.out.text_file("calibration.json", calibration_to_json(oc.calibration) + "\n");
    write_history(ctx, "calibration_history.csv", oc);
    ctx.checks.add("coherent_error", oc.coherent_error, 0.0, 1e-3);
    ctx.checks.add("leakage", oc.leakage, 0.0, 1e-4);
    if (oc.total_error) ctx.checks.add("total_error", *oc.total_error, 0.003, 0.008);
}

void run_error_vs_time(Context& ctx) {
    const auto sys = build_coupled_system(ctx.cfg.system);
    const auto coh = active_coherence(ctx.cfg);
    const auto& times = ctx.cfg.sweep.gate_times;
    auto csv = ctx.out.csv("error_vs_time.csv");
    csv.header({"gate_time_ns", "coherent_error", "total_error", "coherence_limit", "leakage", "iterations"});
    std::vector<double> coherent, excess, limit;
    std::vector<CalibrationOutcome> outcomes;
    for (double tg : times) {
        CalibrationOutcome oc = calibrate_cx(sys, tg, coh, calibration_options(ctx.cfg));
        const double total = oc.total_error.value_or(oc.coherent_error);
        const double lim = coh ? coherence_limit_of(*coh, tg) : 0.0;
        csv.row({tg, oc.coherent_error, total, lim, oc.leakage, static_cast<double>(oc.iterations)});
        coherent.push_back(oc.coherent_error);
        excess.push_back(total - oc.coherent_error);
        limit.push_back(lim);
        outcomes.push_back(std::move(oc));
    }
    // Non-increasing coherent error allowing a 20 % ripple between neighbours.
    const auto order = [&] {
        std::vector<size_t> idx(times.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return times[a] < times[b]; });
        return idx;
    }();
    double worst = 0.0;
    for (size_t k = 1; k < order.size(); ++k)
        worst = std::max(worst, coherent[order[k]] / coherent[order[k - 1]]);
    if (order.size() > 1) ctx.checks.add("coherent_ratio_max", worst, 0.0, 1.2);
    if (!coh) return;

    double dev = 0.0;
    for (size_t i = 0; i < times.size(); ++i) dev = std::max(dev, std::abs(excess[i] / limit[i] - 1.0));
    ctx.checks.add("decoherence_vs_limit_max_dev", dev, 0.0, 0.25);

    const double t2 = ctx.cfg.sweep.level2_lifetime;
    if (t2 > 0.0) {
        const auto ref = std::min_element(times.begin(), times.end(), [&](double a, double b) {
            return std::abs(a - ctx.cfg.drive.gate_time) < std::abs(b - ctx.cfg.drive.gate_time);
        });
        const size_t i = static_cast<size_t>(ref - times.begin());
        const auto& cal = outcomes[i].calibration;
        CoherenceSpec with2 = *coh;
        with2.level2_t1 = t2;
        with2.level2_t2 = t2;
        const auto proc = lindblad_process(sys, {cx_drive(sys, cal)}, cx_window(sys, cal), with2);
        const double total2 =
            1.0 - average_gate_fidelity_channel(frame_superop(proc.superop, cal.frame()), cx_pi());
        const double total = coherent[i] + excess[i];
        auto c2 = ctx.out.csv("error_level2.csv");
        c2.header({"gate_time_ns", "total_error", "total_error_level2", "level2_lifetime_us"});
        c2.row({times[i], total, total2, t2});
        ctx.checks.add("level2_relative_change", std::abs(total2 - total) / total, 0.0, 0.1);
    }
}

void write_rb(CsvWriter& decay, CsvWriter* raw, const std::string& series, const RbResult& r) {
    for (size_t i = 0; i < r.lengths.size(); ++i) {
        decay.row_text({series, fmt_num(static_cast<double>(r.lengths[i])), fmt_num(r.mean[i]), fmt_num(r.stderr_[i])});
        if (raw)
            for (size_t s = 0; s < r.raw[i].size(); ++s)
                raw->row_text({series, fmt_num(static_cast<double>(r.lengths[i])), std::to_string(s), fmt_num(r.raw[i][s])});
    }
}

json fit_json(const RbResult& r) {
    json cov = json::array();
    for (int i = 0; i < r.covariance.rows(); ++i)
        for (int j = 0; j < r.covariance.cols(); ++j) cov.push_back(r.covariance(i, j));
    return {{"A", r.a}, {"p", r.p}, {"B", r.b}, {"epc", r.epc}, {"epc_sigma", r.epc_sigma}, {"covariance", cov}};
}

RbOptions rb_options(const ScenarioConfig& cfg, std::uint64_t seed) {
    RbOptions o;
    o.lengths = as_lengths(cfg.sweep.lengths);
    o.sequences = cfg.sweep.sequences;
    o.seed = seed;
    o.jobs = cfg.jobs;
    if (cfg.sweep.readout_noise > 0.0) {
        ReadoutModel m = default_readout_model();
        m.noise_sigma = cfg.sweep.readout_noise;
        m.shots = cfg.sweep.shots > 0 ? cfg.sweep.shots : 1000;
        o.readout = m;
    } else {
        o.shots = cfg.sweep.shots;
    }
    return o;
}

void run_rb_scenario(Context& ctx) {
    RbChannel ch;
    ch.clifford_depolarizing = depolarizing_for_epc(ctx.cfg.sweep.epc);
    const auto r = run_rb(ch, rb_options(ctx.cfg, ctx.seed()));
    auto decay = ctx.out.csv("rb_decay.csv");
    decay.header({"series", "length", "mean", "sem"});
    auto raw = ctx.out.csv("rb_sequences.csv");
    raw.header({"series", "length", "sequence", "fidelity"});
    write_rb(decay, &raw, "reference", r);
    ctx.out.json_file("rb_fit.json", fit_json(r));
    const double epc = ctx.cfg.sweep.epc;
    if (epc == 0.0)
        ctx.checks.add("fitted_epc", r.epc, -1e-6, 1e-6);
    else
        ctx.checks.add("fitted_epc_relative_error", std::abs(r.epc - epc) / epc, 0.0, 0.1);
}

void run_irb(Context& ctx) {
    const auto& sw = ctx.cfg.sweep;
    RbChannel ref;
    ref.clifford_depolarizing = depolarizing_for_epc(sw.epc);
    const auto r_ref = run_rb(ref, rb_options(ctx.cfg, derive_seed(ctx.seed(), 1)));

    auto interleaved = [&](const Mat4& gate, double lambda, std::uint64_t stream) {
        RbChannel ch = ref;
        ch.interleaved_superop = depolarizing_superop(lambda) * unitary_superop(gate);
        RbOptions o = rb_options(ctx.cfg, derive_seed(ctx.seed(), stream));
        o.interleave = gate;
        return run_rb(ch, o);
    };
    const auto r_cx = interleaved(cx_pi(), sw.cx_depolarizing, 2);
    const auto r_idle = interleaved(Mat4::Identity(), sw.idle_depolarizing, 3);

    auto decay = ctx.out.csv("irb_decay.csv");
    decay.header({"series", "length", "mean", "sem"});
    write_rb(decay, nullptr, "reference", r_ref);
    write_rb(decay, nullptr, "cx", r_cx);
    write_rb(decay, nullptr, "idle", r_idle);

    auto sigma = [&](const RbResult& r) {
        const double d = 1.0 - r_ref.epc;
        return std::hypot(r.epc_sigma / d, (1.0 - r.epc) * r_ref.epc_sigma / (d * d));
    };
    const double f_cx = irb_fidelity(r_ref, r_cx), f_idle = irb_fidelity(r_ref, r_idle);
    ctx.out.json_file("irb_fit.json", {{"reference", fit_json(r_ref)},
                                       {"cx", fit_json(r_cx)},
                                       {"idle", fit_json(r_idle)},
                                       {"cx_fidelity", f_cx},
                                       {"cx_fidelity_sigma", sigma(r_cx)},
                                       {"idle_fidelity", f_idle},
                                       {"idle_fidelity_sigma", sigma(r_idle)}});
    // Average fidelity of a two-qubit depolarized gate is 1 - 3 lambda / 4.
    ctx.checks.add("cx_fidelity_error", std::abs(f_cx - (1.0 - 0.75 * sw.cx_depolarizing)), 0.0,
                   std::max(3.0 * sigma(r_cx), 1e-3));
    ctx.checks.add("idle_fidelity_error", std::abs(f_idle - (1.0 - 0.75 * sw.idle_depolarizing)), 0.0,
                   std::max(3.0 * sigma(r_idle), 1e-3));
}

void run_qpt_scenario(Context& ctx) {
    const auto& sw = ctx.cfg.sweep;
    const double lambda = sw.cx_depolarizing;
    QptOptions o;
    o.seed = ctx.seed();
    if (sw.readout_noise > 0.0) {
        ReadoutModel m = default_readout_model();
        m.noise_sigma = sw.readout_noise;
        m.shots = sw.shots > 0 ? sw.shots : 1000;
        o.readout = m;
    }
    const auto pm = qpt(depolarizing_superop(lambda) * unitary_superop(cx_pi()), o);
    ctx.out.json_file("chi.json", {{"basis", "pauli 4a+b, order I X Y Z"},
                                   {"chi", matrix_json(pm.chi)},
                                   {"fidelity", pm.fidelity},
                                   {"min_eigenvalue", pm.min_eigenvalue},
                                   {"raw_trace", pm.raw_trace}});
    auto csv = ctx.out.csv("chi.csv");
    csv.header({"m", "n", "label_m", "label_n", "re", "im"});
    for (int m = 0; m < 16; ++m)
        for (int n = 0; n < 16; ++n)
            csv.row_text({std::to_string(m), std::to_string(n), pauli_label(m), pauli_label(n),
                          fmt_num(pm.chi(m, n).real()), fmt_num(pm.chi(m, n).imag())});

    const double analytic = 1.0 - 15.0 * lambda / 16.0;
    const double tol = sw.readout_noise > 0.0 ? 0.01 : 1e-4;
    ctx.checks.add("fidelity_error", std::abs(pm.fidelity - analytic), 0.0, tol);
    const CMat ideal = chi_from_unitary(cx_pi());
    int mismatched = 0;
    for (int m = 0; m < 16; ++m)
        for (int n = 0; n < 16; ++n)
            if ((std::abs(ideal(m, n)) > 0.125) != (std::abs(pm.chi(m, n)) > 0.125)) ++mismatched;
    ctx.checks.add("support_mismatches", mismatched, 0, 0);
}

void run_predistort(Context& ctx) {
    const auto& d = ctx.cfg.drive;
    const ReflectionModel model = d.reflection.empty() ? demo_reflection_model() : d.reflection;
    const PulseEnvelope env = rounded_square(d.gate_time - 2.0 * d.ramp, d.ramp, d.dt);
    const auto pd = predistort_detailed(env, model);
    const PulseEnvelope delivered = apply_reflection_channel(pd.envelope, model);
    const PulseEnvelope raw = apply_reflection_channel(env, model);

    const size_t n = std::max({env.samples.size(), pd.envelope.samples.size(), delivered.samples.size(), raw.samples.size()});
    auto at = [](const PulseEnvelope& e, size_t k) { return k < e.samples.size() ? e.samples[k] : cplx{0.0}; };
    double residual = 0.0;
    {
        auto csv = ctx.out.csv("predistort_envelopes.csv");
        csv.header({"time_ns", "target_re", "target_im", "played_re", "played_im", "delivered_re", "delivered_im",
                    "uncorrected_re", "uncorrected_im"});
        for (size_t k = 0; k < n; ++k) {
            const cplx t = at(env, k), p = at(pd.envelope, k), dl = at(delivered, k), u = at(raw, k);
            residual = std::max(residual, std::abs(dl - t));
            csv.row({static_cast<double>(k) * d.dt, t.real(), t.imag(), p.real(), p.imag(), dl.real(), dl.imag(),
                     u.real(), u.imag()});
        }
    }
    ctx.checks.add("round_trip_residual", residual / env.peak(), 0.0, 1e-3);

    const Echo hidden = ctx.cfg.sweep.hidden_echo;
    const ReflectionModel hidden_model{{hidden}};
    ReflectionScanOptions so;
    so.max_delay = std::max(so.max_delay, hidden.delay + 10.0);
    const auto traces = reflection_traces(hidden_model, so);
    {
        auto csv = ctx.out.csv("reflection_traces.csv");
        csv.header({"kind", "repetitions", "gap_ns", "p1"});
        auto dump = [&](const char* kind, const std::vector<std::vector<double>>& tr) {
            for (size_t r = 0; r < tr.size(); ++r)
                for (size_t g = 0; g < tr[r].size(); ++g)
                    csv.row_text({kind, std::to_string(so.repetitions[r]), std::to_string(g), fmt_num(tr[r][g])});
        };
        dump("quadrature", traces.quadrature);
        dump("in_phase", traces.in_phase);
    }
    const ReflectionModel est = characterize_reflections(hidden_model, so);
    json echoes = json::array();
    for (const auto& e : est.echoes) echoes.push_back(echo_json(e));
    ctx.out.json_file("reflection_estimate.json", {{"hidden", echo_json(hidden)}, {"estimate", echoes}});
    if (est.echoes.empty()) {
        ctx.checks.add("echo_found", 0, 1, 1);
        return;
    }
    const auto main = *std::max_element(est.echoes.begin(), est.echoes.end(), [](const Echo& a, const Echo& b) {
        return std::abs(a.amplitude) < std::abs(b.amplitude);
    });
    ctx.checks.add("echo_delay_error_ns", std::abs(main.delay - hidden.delay), 0.0, 1.0);
    ctx.checks.add("echo_amplitude_error", std::abs(main.amplitude - hidden.amplitude), 0.0, 0.02);
}

void run_allxy(Context& ctx) {
    const ReflectionModel line = ctx.cfg.drive.reflection.empty() ? demo_reflection_model() : ctx.cfg.drive.reflection;
    SingleQubitGateSet ideal;
    SingleQubitGateSet distorted = ideal;
    distorted.channel = line;
    SingleQubitGateSet corrected = distorted;
    corrected.predistortion = line;
    const auto t_ideal = allxy_trace(ideal), t_dist = allxy_trace(distorted), t_corr = allxy_trace(corrected);
    const auto& expect = allxy_ideal();
    const auto& pairs = allxy_pairs();
    auto csv = ctx.out.csv("allxy.csv");
    csv.header({"index", "pair", "expected", "ideal_line", "reflective_line", "predistorted"});
    double dev_ideal = 0, dev_dist = 0, dev_corr = 0;
    for (size_t i = 0; i < expect.size(); ++i) {
        csv.row_text({std::to_string(i), std::string(pairs[i][0]) + "-" + pairs[i][1], fmt_num(expect[i]),
                      fmt_num(t_ideal[i]), fmt_num(t_dist[i]), fmt_num(t_corr[i])});
        dev_ideal = std::max(dev_ideal, std::abs(t_ideal[i] - expect[i]));
        dev_dist = std::max(dev_dist, std::abs(t_dist[i] - expect[i]));
        dev_corr = std::max(dev_corr, std::abs(t_corr[i] - expect[i]));
    }
    ctx.checks.add("ideal_max_deviation", dev_ideal, 0.0, 1e-3);
    ctx.checks.add("predistorted_max_deviation", dev_corr, 0.0, 0.02);
    ctx.checks.add("reflective_line_max_deviation", dev_dist, 0.02, 1.0);  // the echo must be visible
}

void run_population(Context& ctx) {
    const auto& sw = ctx.cfg.sweep;
    ReadoutModel model = default_readout_model();
    Rng rng(ctx.seed());
    Rng* noise = nullptr;
    if (sw.readout_noise > 0.0) {
        model.noise_sigma = sw.readout_noise;
        model.shots = sw.shots > 0 ? sw.shots : 1000;
        noise = &rng;
    }
    const double e = sw.excited_population;
    const auto initial = PopulationVector::product(e, 0.0);
    const double lambda = 4.0 / 3.0 * (1.0 - sw.cx_fidelity);

    auto csv = ctx.out.csv("population.csv");
    csv.header({"case", "cx_fidelity", "contrast", "re", "im", "e_from_cd", "e_from_ab", "e_mean"});
    auto estimate = [&](const std::string& name, const CMat& superop, double fid) {
        const auto c = population_contrasts(initial, superop, model, 16, noise);
        const auto cp = control_population(c[0], c[1], c[2], c[3]);
        const char* labels[] = {"a", "b", "c", "d"};
        for (int k = 0; k < 4; ++k)
            csv.row_text({name, fmt_num(fid), labels[k], fmt_num(c[k].real()), fmt_num(c[k].imag()),
                          fmt_num(cp.from_cd.real()), fmt_num(cp.from_ab.real()), fmt_num(cp.mean)});
        return cp.mean;
    };
    const double e_ideal = estimate("ideal", unitary_superop(cnot()), 1.0);
    const double e_noisy = estimate("depolarized", depolarizing_superop(lambda) * unitary_superop(cnot()), sw.cx_fidelity);
    ctx.checks.add("ideal_cx_error", std::abs(e_ideal - e), 0.0, 0.002);
    ctx.checks.add("noisy_cx_error", std::abs(e_noisy - e), 0.0, 0.5 * (1.0 - sw.cx_fidelity));

    ReadoutModel exact = default_readout_model();
    auto rt = ctx.out.csv("readout_roundtrip.csv");
    rt.header({"population", "injected", "recovered"});
    const auto v = simulate_voltages(initial, exact);
    const auto inv = invert_population(v, exact);
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) {
        rt.row({static_cast<double>(k), initial.p[k], inv.p[k]});
        worst = std::max(worst, std::abs(inv.p[k] - initial.p[k]));
    }
    ctx.checks.add("readout_round_trip_error", worst, 0.0, 1e-10);
}

using Runner = std::function<void(Context&)>;

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> m{
        {"table1", run_table1},       {"chevron", run_chevron},           {"darkening", run_darkening},
        {"calibrate", run_calibrate}, {"error-vs-time", run_error_vs_time}, {"rb", run_rb_scenario},
        {"irb", run_irb},             {"qpt", run_qpt_scenario},          {"predistort", run_predistort},
        {"allxy", run_allxy},         {"population", run_population}};
    return m;
}

const ScenarioInfo* find_scenario(const std::string& name) {
    for (const auto& s : scenario_catalog())
        if (s.name == name) return &s;
    return nullptr;
}

}  // namespace

const std::vector<ScenarioInfo>& scenario_catalog() {
    static const std::vector<ScenarioInfo> list{
        {"table1", "device spectrum, matrix elements and static ZZ against the device table", false},
        {"chevron", "Rabi chevron of B for A in |0> and |1> under the darkened CR drive", false},
        {"darkening", "OFF-state darkening ratio scan and Bloch trajectories of B", false},
        {"calibrate", "full CX_pi calibration at the configured gate time", false},
        {"error-vs-time", "calibrated coherent and total gate error versus gate time", false},
        {"rb", "two-qubit randomized benchmarking of a depolarizing Clifford channel", true},
        {"irb", "interleaved RB with a depolarized CX_pi and an idle", true},
        {"qpt", "process tomography of a depolarized CX_pi", true},
        {"predistort", "echo predistortion round trip and blind echo characterization", false},
        {"allxy", "AllXY trace on ideal, reflective and predistorted lines", false},
        {"population", "excited-population metrology through the joint readout", true},
    };
    return list;
}

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<std::string> errors;
    ScenarioConfig cfg;
    Reader r(root, "", errors);
    if (!root.is_object()) throw ConfigError("<root>: must be an object");

    if (const json* v = r.take("schema_version")) {
        if (!v->is_number_integer() || v->get<long long>() != kConfigSchemaVersion)
            r.fail("schema_version", "must be " + std::to_string(kConfigSchemaVersion));
    } else {
        r.fail("schema_version", "missing required field");
    }
    if (!r.has("scenario")) r.fail("scenario", "missing required field");
    r.text("scenario", cfg.scenario);
    const ScenarioInfo* info = find_scenario(cfg.scenario);
    if (r.has("scenario") && !info) r.fail("scenario", "unknown scenario '" + cfg.scenario + "'");

    if (const json* v = r.take("seed")) {
        if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
            r.fail("seed", "must be a non-negative integer");
        else
            cfg.seed = v->get<std::uint64_t>();
    }
    if (info && info->stochastic && !cfg.seed) r.fail("seed", "required for stochastic scenario '" + info->name + "'");
    r.text("output_dir", cfg.output_dir);
    r.integer("jobs", cfg.jobs, 1);

    {
        Reader s = r.child("system");
        read_fluxonium(s.child("qubit_a"), cfg.system.qubit_a);
        read_fluxonium(s.child("qubit_b"), cfg.system.qubit_b);
        s.num("j_c_ghz", cfg.system.j_c, Bound::NonNegative);
        s.integer("levels_per_qubit", cfg.system.levels_per_qubit, 3);
        s.integer("basis_size", cfg.system.basis_size, 20);
        s.opt_num("zz_override_ghz", cfg.system.residual_zz_override);
        s.finish();
    }
    {
        Reader d = r.child("drive");
        d.num("gate_time_ns", cfg.drive.gate_time, Bound::Positive);
        d.num("ramp_ns", cfg.drive.ramp, Bound::NonNegative);
        d.num("dt_ns", cfg.drive.dt, Bound::Positive);
        d.num("strength_ghz", cfg.drive.strength, Bound::Positive);
        if (const json* k = d.take("crosstalk")) {
            bool ok = k->is_array() && k->size() == 2;
            for (int i = 0; ok && i < 2; ++i) {
                ok = (*k)[i].is_array() && (*k)[i].size() == 2;
                for (int j = 0; ok && j < 2; ++j) ok = Reader::parse_complex((*k)[i][j], cfg.drive.crosstalk(i, j));
            }
            if (!ok)
                d.fail("crosstalk", "must be a 2 x 2 array of [re, im]");
            else if (std::abs(cfg.drive.crosstalk.determinant()) < 1e-9)
                d.fail("crosstalk", "must be invertible");
        }
        if (const json* e = d.take("reflection")) {
            if (!e->is_array()) {
                d.fail("reflection", "must be an array of echoes");
            } else {
                ReflectionModel m;
                bool ok = true;
                for (size_t i = 0; i < e->size(); ++i) {
                    Echo echo;
                    if (parse_echo(d, (*e)[i], "reflection[" + std::to_string(i) + "]", echo))
                        m.echoes.push_back(echo);
                    else
                        ok = false;
                }
                if (ok) {
                    try {
                        m.validate();
                        cfg.drive.reflection = m;
                    } catch (const Error& ex) {
                        d.fail("reflection", ex.what());
                    }
                }
            }
        }
        if (cfg.drive.gate_time <= 2.0 * cfg.drive.ramp) d.fail("gate_time_ns", "must exceed twice ramp_ns");
        d.finish();
    }
    {
        Reader c = r.child("coherence");
        c.boolean("enabled", cfg.coherence_enabled);
        c.opt_num("t1_a_us", cfg.coherence.t1_a, Bound::Positive);
        c.opt_num("t1_b_us", cfg.coherence.t1_b, Bound::Positive);
        c.opt_num("t2e_a_us", cfg.coherence.t2e_a, Bound::Positive);
        c.opt_num("t2e_b_us", cfg.coherence.t2e_b, Bound::Positive);
        c.opt_num("level2_t1_us", cfg.coherence.level2_t1, Bound::Positive);
        c.opt_num("level2_t2_us", cfg.coherence.level2_t2, Bound::Positive);
        try {
            cfg.coherence.validate();
        } catch (const Error& ex) {
            c.fail("", ex.what());
        }
        c.finish();
    }
    {
        Reader s = r.child("sweep");
        auto& sw = cfg.sweep;
        s.numbers("gate_times_ns", sw.gate_times);
        for (double t : sw.gate_times)
            if (!(t > 2.0 * cfg.drive.ramp)) {
                s.fail("gate_times_ns", "every gate time must exceed twice ramp_ns");
                break;
            }
        s.numbers("detunings_ghz", sw.detunings);
        s.numbers("times_ns", sw.times);
        for (double t : sw.times)
            if (!(t >= 0.0)) {
                s.fail("times_ns", "times must be >= 0");
                break;
            }
        s.numbers("lengths", sw.lengths);
        bool lengths_ok = !sw.lengths.empty();
        for (size_t i = 0; i < sw.lengths.size(); ++i) {
            const double m = sw.lengths[i];
            if (!(m >= 1.0) || m != std::floor(m) || (i > 0 && !(m > sw.lengths[i - 1]))) lengths_ok = false;
        }
        if (!lengths_ok) s.fail("lengths", "must be strictly ascending integers >= 1");
        s.integer("sequences", sw.sequences, 1);
        s.integer("shots", sw.shots, 0);
        s.num("epc", sw.epc, Bound::NonNegative);
        if (sw.epc >= 0.75) s.fail("epc", "must be < 0.75");
        s.num("cx_depolarizing", sw.cx_depolarizing, Bound::NonNegative);
        s.num("idle_depolarizing", sw.idle_depolarizing, Bound::NonNegative);
        if (sw.cx_depolarizing > 1.0) s.fail("cx_depolarizing", "must be <= 1");
        if (sw.idle_depolarizing > 1.0) s.fail("idle_depolarizing", "must be <= 1");
        s.num("readout_noise", sw.readout_noise, Bound::NonNegative);
        s.num("excited_population", sw.excited_population, Bound::NonNegative);
        if (sw.excited_population > 1.0) s.fail("excited_population", "must be <= 1");
        s.num("cx_fidelity", sw.cx_fidelity, Bound::Positive);
        if (sw.cx_fidelity > 1.0 || sw.cx_fidelity < 0.25) s.fail("cx_fidelity", "must lie in [0.25, 1]");
        s.num("level2_lifetime_us", sw.level2_lifetime);
        if (const json* h = s.take("hidden_echo")) parse_echo(s, *h, "hidden_echo", sw.hidden_echo);
        s.finish();
    }
    r.finish();

    if (!errors.empty()) {
        std::string msg = "invalid config (" + std::to_string(errors.size()) + " issue" + (errors.size() > 1 ? "s" : "") + "):";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return cfg;
}

ScenarioConfig validate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& c) {
    json crosstalk = json::array();
    for (int i = 0; i < 2; ++i) crosstalk.push_back({complex_json(c.drive.crosstalk(i, 0)), complex_json(c.drive.crosstalk(i, 1))});
    json reflection = json::array();
    for (const auto& e : c.drive.reflection.echoes) reflection.push_back(echo_json(e));
    json j = {
        {"schema_version", kConfigSchemaVersion},
        {"scenario", c.scenario},
        {"output_dir", c.output_dir},
        {"jobs", c.jobs},
        {"system",
         {{"qubit_a", fluxonium_json(c.system.qubit_a)},
          {"qubit_b", fluxonium_json(c.system.qubit_b)},
          {"j_c_ghz", c.system.j_c},
          {"levels_per_qubit", c.system.levels_per_qubit},
          {"basis_size", c.system.basis_size},
          {"zz_override_ghz", opt_json(c.system.residual_zz_override)}}},
        {"drive",
         {{"gate_time_ns", c.drive.gate_time},
          {"ramp_ns", c.drive.ramp},
          {"dt_ns", c.drive.dt},
          {"strength_ghz", c.drive.strength},
          {"crosstalk", crosstalk},
          {"reflection", reflection}}},
        {"coherence",
         {{"enabled", c.coherence_enabled},
          {"t1_a_us", opt_json(c.coherence.t1_a)},
          {"t1_b_us", opt_json(c.coherence.t1_b)},
          {"t2e_a_us", opt_json(c.coherence.t2e_a)},
          {"t2e_b_us", opt_json(c.coherence.t2e_b)},
          {"level2_t1_us", opt_json(c.coherence.level2_t1)},
          {"level2_t2_us", opt_json(c.coherence.level2_t2)}}},
        {"sweep",
         {{"gate_times_ns", c.sweep.gate_times},
          {"detunings_ghz", c.sweep.detunings},
          {"times_ns", c.sweep.times},
          {"lengths", c.sweep.lengths},
          {"sequences", c.sweep.sequences},
          {"shots", c.sweep.shots},
          {"epc", c.sweep.epc},
          {"cx_depolarizing", c.sweep.cx_depolarizing},
          {"idle_depolarizing", c.sweep.idle_depolarizing},
          {"readout_noise", c.sweep.readout_noise},
          {"excited_population", c.sweep.excited_population},
          {"cx_fidelity", c.sweep.cx_fidelity},
          {"level2_lifetime_us", c.sweep.level2_lifetime},
          {"hidden_echo", echo_json(c.sweep.hidden_echo)}}},
    };
    if (c.seed) j["seed"] = *c.seed;
    return j.dump(2);
}

namespace {
// Config without execution-only settings, which never change numeric outputs.
json numeric_config(const ScenarioConfig& config) {
    json j = json::parse(config_to_json(config));
    j.erase("jobs");
    j.erase("output_dir");
    return j;
}
}  // namespace

std::string config_hash(const ScenarioConfig& config) { return fnv1a_hex(numeric_config(config).dump()); }

bool ScenarioReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

ScenarioReport run_scenario(const ScenarioConfig& config, const std::string& out_dir) {
    const ScenarioInfo* info = find_scenario(config.scenario);
    if (!info) throw ConfigError("unknown scenario '" + config.scenario + "'");
    if (info->stochastic && !config.seed) throw ConfigError("seed: required for stochastic scenario '" + info->name + "'");

    Outputs out(out_dir);
    Checks checks;
    Context ctx{config, out, checks};
    try {
        runners().at(config.scenario)(ctx);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw Error("scenario '" + config.scenario + "': " + e.what());
    }

    {
        auto csv = out.csv("checks.csv");
        csv.header({"check", "value", "lo", "hi", "pass"});
        for (const auto& c : checks.list())
            csv.row_text({c.name, fmt_num(c.value), fmt_num(c.lo), fmt_num(c.hi), c.pass ? "1" : "0"});
    }

    ScenarioReport report;
    report.checks = checks.list();
    report.files = out.files();

    json files = json::array();
    for (const auto& f : report.files) {
        std::ifstream in(out.dir() / f, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        files.push_back({{"file", f}, {"fnv1a", fnv1a_hex(ss.str())}});
    }
    json check_list = json::array();
    for (const auto& c : report.checks)
        check_list.push_back({{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", c.hi}, {"pass", c.pass}});
    const json manifest = {{"tool", "fxcr"},
                           {"version", kToolVersion},
                           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                         "." + std::to_string(EIGEN_MINOR_VERSION)},
                           {"scenario", config.scenario},
                           {"seed", config.seed ? json(*config.seed) : json(nullptr)},
                           {"config_hash", config_hash(config)},
                           {"config", numeric_config(config)},
                           {"outputs", files},
                           {"checks", check_list},
                           {"passed", report.passed()}};
    std::ofstream mf(out.dir() / "manifest.json");
    mf << manifest.dump(2) << '\n';
    report.files.push_back("manifest.json");
    return report;
}

}  // namespace fxcr
