// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. `fxcr_acceptance N` runs criterion N; without arguments
// every criterion runs. One PASS/FAIL line per criterion; exit status is
// nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "fxcr/calibration.hpp"
#include "fxcr/clifford.hpp"
#include "fxcr/gates.hpp"
#include "fxcr/io.hpp"
#include "fxcr/qpt.hpp"
#include "fxcr/rb.hpp"
#include "fxcr/readout.hpp"
#include "fxcr/reflections.hpp"
#include "fxcr/rng.hpp"
#include "fxcr/scenario.hpp"

using namespace fxcr;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records a named measurement against [lo, hi].
    void require(const std::string& name, double value, double lo, double hi) {
        const bool ok = std::isfinite(value) && value >= lo && value <= hi;
        pass = pass && ok;
        detail << ' ' << name << '=' << fmt_num(value) << (ok ? "" : "(!)");
    }
    void require_true(const std::string& name, bool ok) {
        pass = pass && ok;
        detail << ' ' << name << '=' << (ok ? "yes" : "no(!)");
    }
};

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// 1. Spectrum against the device table.
void criterion_spectrum(Outcome& o) {
    Timer t;
    const auto sys = build_coupled_system(table1_params());
    const RMat na = charge_matrix_elements(sys.spectrum_a, 3);
    const RMat nb = charge_matrix_elements(sys.spectrum_b, 3);
    o.require("omega_a", sys.raw_energies(sys.index(1, 0)), 0.5552 - 0.030, 0.5552 + 0.030);
    o.require("omega_b", sys.raw_energies(sys.index(0, 1)), 1.0045 - 0.030, 1.0045 + 0.030);
    o.require("n01_a", na(0, 1), 0.13 - 0.03, 0.13 + 0.03);
    o.require("n01_b", nb(0, 1), 0.20 - 0.03, 0.20 + 0.03);
    o.require("n12_a", na(1, 2), 0.55 - 0.03, 0.55 + 0.03);
    o.require("n12_b", nb(1, 2), 0.59 - 0.03, 0.59 + 0.03);
    double lo = conditional_transition(sys, 0, 1, 2, 0), hi = conditional_transition(sys, 0, 1, 2, 1);
    if (lo > hi) std::swap(lo, hi);
    o.require("omega_a12_low", lo, 3.610 - 0.050, 3.610 + 0.050);
    o.require("omega_a12_high", hi, 3.691 - 0.050, 3.691 + 0.050);
    o.require("runtime_s", t.seconds(), 0.0, 5.0);
}

// 2. Static ZZ.
void criterion_static_zz(Outcome& o) {
    Timer t;
    auto p = table1_params();
    const double zz = build_coupled_system(p).static_zz;
    p.j_c = 0.0;
    const double zz0 = build_coupled_system(p).static_zz;
    o.require("zz_mhz", 1e3 * zz, 0.6, 1.2);
    o.require("zz_uncoupled_ghz", std::abs(zz0), 0.0, 0.0);
    o.require("runtime_s", t.seconds(), 0.0, 5.0);
}

// 3. Selective darkening.
void criterion_darkening(Outcome& o) {
    Timer t;
    const auto sys = build_coupled_system(table1_params());
    const Crosstalk k = default_crosstalk();
    const double gate = 70.0, ramp = 6.0;
    const cplx c = amplitude_for_strength(sys, k, first_order_darkening(sys, k), 0.09);
    const double freq = sys.energy(1, 1) - sys.energy(1, 0);
    DarkeningOptions opts;
    opts.crosstalk = k;
    opts.flat = gate - 2 * ramp;
    opts.ramp = ramp;
    const cplx eta = find_darkening_ratio(sys, freq, c, opts);

    DriveConfig d;
    d.frequency = freq;
    d.port_c = c;
    d.port_c2 = eta * c;
    d.crosstalk = k;
    d.envelope = rounded_square(gate - 2 * ramp, ramp);
    std::vector<double> grid;
    for (int i = 0; i <= 70; ++i) grid.push_back(i);
    const auto off = propagate_schrodinger(sys, {d}, basis_state(sys, 0, 0), grid);
    o.require("max_p01", off.populations.col(1).maxCoeff(), 0.0, 1e-4);

    const auto g = extract_gate(sys, {d}, gate);
    const double rel = std::abs(effective_block_hamiltonian(g.raw, 0, gate)(0, 1)) /
                       std::abs(effective_block_hamiltonian(g.raw, 1, gate)(0, 1));
    o.require("relative_residual", rel, 0.0, 1e-6);
    o.require("runtime_s", t.seconds(), 0.0, 60.0);
}

// 4. Calibrated gate at 70 ns.
void criterion_calibrated_gate(Outcome& o) {
    Timer t;
    const auto sys = build_coupled_system(table1_params());
    const auto oc = calibrate_cx(sys, 70.0, table1_coherence());
    o.require("infidelity", oc.coherent_error, 0.0, 1e-3);
    o.require("leakage", oc.leakage, 0.0, 1e-4);
    o.require("total_error", oc.total_error.value_or(-1.0), 0.003, 0.008);
    o.require("runtime_s", t.seconds(), 0.0, 600.0);
}

// 5. Error versus gate time.
void criterion_error_vs_time(Outcome& o) {
    Timer t;
    const auto sys = build_coupled_system(table1_params());
    const auto coh = table1_coherence();
    const std::vector<double> times{50, 60, 70, 80, 100};
    std::vector<double> coherent, excess, limit;
    std::optional<CXCalibration> cal70;
    double total70 = 0.0;
    for (double tg : times) {
        const auto oc = calibrate_cx(sys, tg, coh);
        coherent.push_back(oc.coherent_error);
        excess.push_back(oc.total_error.value_or(0.0) - oc.coherent_error);
        limit.push_back(coherence_limit(*coh.t1_a, *coh.t1_b, *coh.t2e_a, *coh.t2e_b, tg));
        if (tg == 70.0) {
            cal70 = oc.calibration;
            total70 = oc.total_error.value_or(0.0);
        }
        o.detail << " e(" << tg << ")=" << fmt_num(oc.coherent_error) << '/' << fmt_num(oc.total_error.value_or(0));
    }
    double ripple = 0.0, dev = 0.0;
    for (size_t i = 1; i < times.size(); ++i) ripple = std::max(ripple, coherent[i] / coherent[i - 1]);
    for (size_t i = 0; i < times.size(); ++i) dev = std::max(dev, std::abs(excess[i] / limit[i] - 1.0));
    o.require("coherent_ratio_max", ripple, 0.0, 1.2);
    o.require("excess_vs_limit_dev", dev, 0.0, 0.25);

    CoherenceSpec with2 = coh;
    with2.level2_t1 = 1.0;
    with2.level2_t2 = 1.0;
    const auto proc = lindblad_process(sys, {cx_drive(sys, *cal70)}, cx_window(sys, *cal70), with2);
    const double total2 = 1.0 - average_gate_fidelity_channel(frame_superop(proc.superop, cal70->frame()), cx_pi());
    o.require("level2_relative_change", std::abs(total2 - total70) / total70, 0.0, 0.1);
    o.require("runtime_s", t.seconds(), 0.0, 1800.0);
}

// 6. Coherence-limit formula.
void criterion_coherence_limit(Outcome& o) {
    // Independent arithmetic: 1/T_err in 1/us, gate time in us.
    const double inv = (1 / 56.0 + 1 / 25.0 + 2 / 23.0 + 2 / 14.75) / 5.0;
    const double oracle = 0.070 * inv;
    const double v = coherence_limit(56.0, 25.0, 23.0, 14.75, 70.0);
    o.require("midpoint_70ns", v, 3.8e-3, 4.0e-3);
    o.require("oracle_diff", std::abs(v - oracle), 0.0, 1e-15);
    o.require("infinite", coherence_limit(kInf, kInf, kInf, kInf, 70.0), 0.0, 0.0);
    bool linear = true;
    for (double tg : {10.0, 35.0, 70.0, 123.0})
        linear = linear && coherence_limit(56.0, 25.0, 23.0, 14.75, 2 * tg) == 2 * coherence_limit(56.0, 25.0, 23.0, 14.75, tg);
    o.require_true("exact_linearity", linear);
}

// Canonical-phase key for the enumeration oracle.
std::string key_of(const CMat& u) {
    const CMat c = canonical_phase(u);
    std::string k;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        k += std::to_string(std::llround(c(i).real() * 1e6)) + ',';
        k += std::to_string(std::llround(c(i).imag() * 1e6)) + ';';
    }
    return k;
}

// Breadth-first closure of a generating set.
size_t closure_size(const std::vector<CMat>& gens) {
    const Eigen::Index d = gens.front().rows();
    std::unordered_set<std::string> seen{key_of(CMat::Identity(d, d))};
    std::vector<CMat> frontier{CMat::Identity(d, d)};
    while (!frontier.empty()) {
        std::vector<CMat> next;
        for (const auto& u : frontier)
            for (const auto& g : gens) {
                CMat v = g * u;
                if (seen.insert(key_of(v)).second) next.push_back(std::move(v));
            }
        frontier = std::move(next);
    }
    return seen.size();
}

// 7. Clifford accounting.
void criterion_cliffords(Outcome& o) {
    Timer t;
    const Mat2 h = hadamard(), s = rz(kPi / 2);
    o.require("enumerated_1q", static_cast<double>(closure_size({h, s})), 24, 24);
    o.require("enumerated_2q", static_cast<double>(closure_size({on_a(h), on_a(s), on_b(h), on_b(s), cnot()})), 11520,
              11520);

    const auto& c1 = single_qubit_cliffords();
    double pulses = 0;
    for (const auto& e : c1) pulses += e.physical_1q_count;
    o.require("table_1q", static_cast<double>(c1.size()), 24, 24);
    o.require("avg_1q_per_clifford", pulses / c1.size(), 1.167 - 0.001, 1.167 + 0.001);

    const auto& g = TwoQubitCliffords::instance();
    o.require("table_2q", static_cast<double>(g.size()), 11520, 11520);
    o.require("avg_cx", g.average_cx_count(), 1.5, 1.5);
    o.require("avg_1q_per_2q_clifford", g.average_physical_1q_count(), 6.483 - 0.5, 6.483 + 0.5);

    Rng rng(20211);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const std::size_t a = rng.below(g.size()), b = rng.below(g.size());
        try {
            const std::size_t c = g.index_of(g.unitary(b) * g.unitary(a));
            if (c != g.compose(a, b)) ++failures;
        } catch (const Error&) {
            ++failures;
        }
    }
    o.require("closure_failures", failures, 0, 0);
    o.require("runtime_s", t.seconds(), 0.0, 60.0);
}

// 8. RB estimator.
void criterion_rb(Outcome& o) {
    Timer t;
    RbOptions opts;
    opts.lengths = {1, 2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100};
    opts.sequences = 40;
    opts.shots = 5000;
    for (double epc : {0.005, 0.0215, 0.05}) {
        RbChannel ch;
        ch.clifford_depolarizing = depolarizing_for_epc(epc);
        opts.seed = derive_seed(8, static_cast<std::uint64_t>(epc * 1e4));
        const auto r = run_rb(ch, opts);
        o.require("rel_err(" + fmt_num(epc) + ")", std::abs(r.epc - epc) / epc, 0.0, 0.10);
    }
    opts.seed = 8;
    const auto id = run_rb(RbChannel{}, opts);
    o.require("identity_epc", id.epc, 0.0, 1e-6);
    o.require("runtime_s", t.seconds(), 0.0, 300.0);
}

// 9. IRB algebra on synthesized decays.
void criterion_irb(Outcome& o) {
    const double epc_ref = 0.0215;
    const double epc_int = 1.0 - 0.9949 * (1.0 - epc_ref);
    const std::vector<std::size_t> lengths{1, 2, 4, 6, 8, 12, 16, 24, 32, 48, 64, 100};
    auto synth = [&](double epc) {
        const double p = 1.0 - 4.0 * epc / 3.0;
        std::vector<std::vector<double>> raw;
        for (auto m : lengths) raw.push_back({0.72 * std::pow(p, static_cast<double>(m)) + 0.26});
        return fit_rb(lengths, raw);
    };
    const double f = irb_fidelity(synth(epc_ref), synth(epc_int));
    o.require("fidelity", f, 0.9949 - 1e-4, 0.9949 + 1e-4);
}

// 10. QPT.
void criterion_qpt(Outcome& o) {
    Timer t;
    const auto pm = qpt(unitary_superop(cx_pi()));
    o.require("ideal_fidelity", pm.fidelity, 0.999, 1.0 + 1e-9);
    const std::set<int> support{0, 1, 12, 13};  // II, IX, ZI, ZX
    bool match = true;
    for (int m = 0; m < 16; ++m)
        for (int n = 0; n < 16; ++n) {
            const bool expected = support.count(m) && support.count(n);
            match = match && ((std::abs(pm.chi(m, n)) > 1e-6) == expected);
        }
    o.require_true("support_II_IX_ZI_ZX", match);
    for (double lambda : {0.02, 0.1}) {
        QptOptions opts;
        opts.target = Mat4::Identity();
        const auto d = qpt(depolarizing_superop(lambda), opts);
        // rho -> (1 - l) rho + l I/4 keeps the identity Kraus weight 1 - 15 l / 16.
        o.require("depolarizing_err(" + fmt_num(lambda) + ")", std::abs(d.fidelity - (1.0 - 15.0 * lambda / 16.0)), 0.0,
                  1e-4);
    }
    o.require("runtime_s", t.seconds(), 0.0, 300.0);
}

// 11. Predistortion and blind characterization.
void criterion_predistortion(Outcome& o) {
    Timer t;
    const ReflectionModel model{{{20.0, cplx{0.35, 0.0}}}};
    const auto env = rounded_square(58.0, 6.0);
    const auto delivered = apply_reflection_channel(predistort(env, model), model);
    double worst = 0.0;
    for (size_t k = 0; k < delivered.samples.size(); ++k) {
        const cplx target = k < env.samples.size() ? env.samples[k] : cplx{0.0};
        worst = std::max(worst, std::abs(delivered.samples[k] - target));
    }
    o.require("round_trip_residual", worst / env.peak(), 0.0, 1e-3);

    const ReflectionModel hidden{{{15.0, cplx{0.2, 0.0}}}};
    const auto est = characterize_reflections(hidden);
    o.require("echoes_found", static_cast<double>(est.echoes.size()), 1, 1e9);
    if (!est.echoes.empty()) {
        const auto main = *std::max_element(est.echoes.begin(), est.echoes.end(), [](const Echo& a, const Echo& b) {
            return std::abs(a.amplitude) < std::abs(b.amplitude);
        });
        o.require("delay_err_ns", std::abs(main.delay - 15.0), 0.0, 1.0);
        o.require("amplitude_err", std::abs(main.amplitude - cplx{0.2, 0.0}), 0.0, 0.02);
    }
    o.require("runtime_s", t.seconds(), 0.0, 120.0);
}

// 12. Population metrology.
void criterion_population(Outcome& o) {
    const ReadoutModel model = default_readout_model();
    const double e = 0.01;
    const auto init = PopulationVector::product(e, 0.0);
    auto estimate = [&](const CMat& cx) {
        const auto c = population_contrasts(init, cx, model);
        return control_population(c[0], c[1], c[2], c[3]).mean;
    };
    o.require("ideal_err", std::abs(estimate(unitary_superop(cnot())) - e), 0.0, 0.002);
    // Two-qubit depolarizing with average fidelity 0.99: lambda = 4/3 (1 - F).
    const double lambda = 4.0 / 3.0 * 0.01;
    o.require("f99_err", std::abs(estimate(depolarizing_superop(lambda) * unitary_superop(cnot())) - e), 0.0, 0.005);

    double worst = 0.0;
    for (const auto& p : {init, PopulationVector::make({0.95, 0.04, 0.0, 0.01}), PopulationVector::make({0.1, 0.2, 0.3, 0.4})}) {
        const auto inv = invert_population(simulate_voltages(p, model), model);
        for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(inv.p[k] - p.p[k]));
    }
    o.require("round_trip_err", worst, 0.0, 1e-10);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// 13. Determinism of scenario outputs.
void criterion_determinism(Outcome& o) {
    const fs::path root = fs::temp_directory_path() / "fxcr_acceptance_determinism";
    fs::remove_all(root);
    const std::string configs = std::string(FXCR_SOURCE_DIR) + "/configs/";
    struct Run {
        std::string name;
        std::string patch;  // merged over the shipped config
    };
    const std::vector<Run> runs{
        {"rb", R"({"sweep": {"sequences": 8, "lengths": [1, 4, 16, 32], "shots": 500}})"},
        {"irb", R"({"sweep": {"sequences": 6, "lengths": [1, 4, 16, 32], "shots": 500}})"},
        {"qpt", R"({"sweep": {"readout_noise": 0.05, "shots": 200, "cx_depolarizing": 0.01}})"},
        {"population", R"({"sweep": {"readout_noise": 0.05, "shots": 500}})"},
        {"predistort", "{}"},
        {"table1", "{}"},
    };
    bool identical = true;
    for (const auto& r : runs) {
        auto doc = nlohmann::json::parse(slurp(configs + r.name + ".json"));
        doc.merge_patch(nlohmann::json::parse(r.patch));
        auto cfg = parse_config(doc.dump());
        for (int rep = 0; rep < 2; ++rep) {
            cfg.jobs = rep == 0 ? 1 : 2;
            run_scenario(cfg, (root / r.name / std::to_string(rep)).string());
        }
        for (const auto& f : fs::directory_iterator(root / r.name / "0")) {
            const auto other = root / r.name / "1" / f.path().filename();
            const bool same = fs::exists(other) && slurp(f.path()) == slurp(other);
            if (!same) o.detail << " differs:" << r.name << '/' << f.path().filename().string();
            identical = identical && same;
        }
    }
    o.require_true("byte_identical", identical);
    fs::remove_all(root);
}

const std::map<int, std::pair<const char*, std::function<void(Outcome&)>>>& criteria() {
    static const std::map<int, std::pair<const char*, std::function<void(Outcome&)>>> m{
        {1, {"spectrum", criterion_spectrum}},
        {2, {"static ZZ", criterion_static_zz}},
        {3, {"selective darkening", criterion_darkening}},
        {4, {"calibrated gate", criterion_calibrated_gate}},
        {5, {"error vs gate time", criterion_error_vs_time}},
        {6, {"coherence limit", criterion_coherence_limit}},
        {7, {"Clifford accounting", criterion_cliffords}},
        {8, {"RB estimator", criterion_rb}},
        {9, {"IRB algebra", criterion_irb}},
        {10, {"QPT", criterion_qpt}},
        {11, {"predistortion", criterion_predistortion}},
        {12, {"population metrology", criterion_population}},
        {13, {"determinism", criterion_determinism}},
    };
    return m;
}

bool run_one(int n) {
    const auto& [name, fn] = criteria().at(n);
    Outcome o;
    Timer t;
    try {
        fn(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " exception: " << e.what();
    }
    std::cout << "criterion " << n << " (" << name << "): " << (o.pass ? "PASS" : "FAIL") << " |" << o.detail.str()
              << " | " << fmt_num(std::round(t.seconds() * 10) / 10) << " s" << std::endl;
    return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
    set_warning_sink([](const std::string&) {});
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) {
        const int n = std::atoi(argv[i]);
        if (!criteria().count(n)) {
            std::cerr << "unknown criterion " << argv[i] << '\n';
            return 2;
        }
        selected.push_back(n);
    }
    if (selected.empty())
        for (const auto& [n, c] : criteria()) selected.push_back(n);
    bool all = true;
    for (int n : selected) all = run_one(n) && all;
    return all ? 0 : 1;
}
