// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/rb.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "fxcr/fit.hpp"
#include "fxcr/gates.hpp"
#include "fxcr/rng.hpp"

namespace fxcr {

namespace {

void apply_unitary(Mat4& rho, const Mat4& u) { rho = u * rho * u.adjoint(); }

void depolarize(Mat4& rho, double lambda) {
    if (lambda == 0.0) return;
    const cplx tr = rho.trace();
    rho = (1.0 - lambda) * rho + (lambda * tr / 4.0) * Mat4::Identity();
}

Mat2 op_gate(const GateOp& op) {
    return op.kind == GateOp::Kind::Physical ? pulse_unitary(op.pulse) : rz(op.angle);
}

class SequenceSimulator {
public:
    explicit SequenceSimulator(const RbChannel& ch) : ch_(ch), group_(TwoQubitCliffords::instance()) {}

    double survival(const RbSequence& seq) const {
        Mat4 rho = Mat4::Zero();
        rho(0, 0) = 1.0;
        for (std::size_t c : seq.cliffords) {
            clifford(rho, c);
            if (seq.interleaved) {
                if (ch_.interleaved_superop)
                    rho = apply_superop(*ch_.interleaved_superop, rho);
                else
                    apply_unitary(rho, *seq.interleaved);
            }
        }
        clifford(rho, seq.recovery);
        return std::clamp(rho(0, 0).real(), 0.0, 1.0);
    }

    std::array<double, 4> populations_after(const RbSequence& seq) const {
        Mat4 rho = Mat4::Zero();
        rho(0, 0) = 1.0;
        for (std::size_t c : seq.cliffords) {
            clifford(rho, c);
            if (seq.interleaved) {
                if (ch_.interleaved_superop)
                    rho = apply_superop(*ch_.interleaved_superop, rho);
                else
                    apply_unitary(rho, *seq.interleaved);
            }
        }
        clifford(rho, seq.recovery);
        std::array<double, 4> p{};
        for (int i = 0; i < 4; ++i) p[i] = std::max(0.0, rho(i, i).real());
        const double s = p[0] + p[1] + p[2] + p[3];
        for (double& x : p) x /= s;
        return p;
    }

private:
    void clifford(Mat4& rho, std::size_t index) const {
        if (!ch_.cx_superop) {
            apply_unitary(rho, group_.unitary(index));
            depolarize(rho, ch_.clifford_depolarizing);
            return;
        }
        for (const auto& op : group_.element(index).decomposition) {
            if (op.kind == GateOp::Kind::CX) {
                rho = apply_superop(*ch_.cx_superop, rho);
                apply_unitary(rho, z_on_a(kPi / 2));
            } else {
                apply_unitary(rho, op.qubit == 0 ? on_a(op_gate(op)) : on_b(op_gate(op)));
            }
        }
        depolarize(rho, ch_.clifford_depolarizing);
    }

    const RbChannel& ch_;
    const TwoQubitCliffords& group_;
};

double binomial_fraction(double p, int shots, Rng& rng) {
    int hits = 0;
    for (int k = 0; k < shots; ++k)
        if (rng.uniform() < p) ++hits;
    return static_cast<double>(hits) / shots;
}

}  // namespace

RbFitError::RbFitError(const std::string& what, RbResult partial) : FitError(what), result(std::move(partial)) {}

RbResult fit_rb(const std::vector<std::size_t>& lengths, const std::vector<std::vector<double>>& raw) {
    if (lengths.size() != raw.size() || lengths.size() < 3) throw ParameterError("RB fit needs >= 3 lengths with data");
    if (!std::is_sorted(lengths.begin(), lengths.end())) throw ParameterError("RB lengths must be ascending");

    RbResult r;
    r.lengths = lengths;
    r.raw = raw;
    const std::size_t n = lengths.size();
    for (const auto& v : raw) {
        if (v.empty()) throw ParameterError("RB length without sequences");
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var = v.size() > 1 ? var / (v.size() - 1) : 0.0;
        r.mean.push_back(mean);
        r.stderr_.push_back(std::sqrt(var / v.size()));
    }

    // A flat decay carries no information on A; report the exact no-error fit.
    const auto [lo, hi] = std::minmax_element(r.mean.begin(), r.mean.end());
    if (*hi - *lo < 1e-12) {
        r.a = 0.0;
        r.p = 1.0;
        r.b = r.mean.front();
        r.covariance = RMat::Zero(3, 3);
        r.epc = 0.0;
        r.fit_ok = true;
        return r;
    }

    // Start: B at the two-qubit floor, p from the log-linear slope above it.
    const double b0 = 0.25;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = r.mean[i] - b0;
        if (y <= 1e-6) continue;
        const double x = static_cast<double>(lengths[i]);
        sx += x;
        sy += std::log(y);
        sxx += x * x;
        sxy += x * std::log(y);
        ++used;
    }
    double p0 = 0.95;
    double a0 = r.mean.front() - b0;
    if (used >= 2 && used * sxx - sx * sx > 0) {
        const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
        p0 = std::clamp(std::exp(slope), 0.1, 0.99999);
        a0 = std::exp((sy - slope * sx) / used);
    }

    RVec start(3);
    start << a0, p0, b0;
    const auto fn = [&](const RVec& x, RVec& res) {
        for (std::size_t i = 0; i < n; ++i)
            res(static_cast<int>(i)) = x(0) * std::pow(x(1), static_cast<double>(lengths[i])) + x(2) - r.mean[i];
    };
    const auto fit = levenberg_marquardt(fn, start, static_cast<int>(n));
    r.a = fit.params(0);
    r.p = fit.params(1);
    r.b = fit.params(2);
    r.covariance = fit.covariance;
    r.epc = 0.75 * (1.0 - r.p);
    r.epc_sigma = 0.75 * std::sqrt(std::max(0.0, fit.covariance(1, 1)));
    r.fit_ok = fit.converged && std::isfinite(r.p) && r.p >= 0.0 && r.p <= 1.0;
    if (!r.fit_ok) {
        std::ostringstream msg;
        msg << "RB fit diverged (p = " << r.p << "); decay means:";
        for (std::size_t i = 0; i < n; ++i) msg << " m=" << lengths[i] << ":" << r.mean[i];
        throw RbFitError(msg.str(), r);
    }
    return r;
}

RbResult run_rb(const RbChannel& channel, const RbOptions& options) {
    if (options.lengths.empty()) throw ParameterError("RB needs lengths");
    if (!std::is_sorted(options.lengths.begin(), options.lengths.end())) throw ParameterError("RB lengths must be ascending");
    if (options.lengths.front() < 1) throw ParameterError("RB lengths must be >= 1");
    if (options.sequences < 1) throw ParameterError("RB needs >= 1 sequence per length");
    if (options.shots < 0) throw ParameterError("shots must be >= 0");
    if (options.readout) options.readout->validate();

    TwoQubitCliffords::instance();  // build before the workers start
    const SequenceSimulator sim(channel);
    const std::size_t nl = options.lengths.size();
    const std::size_t ns = static_cast<std::size_t>(options.sequences);
    std::vector<std::vector<double>> raw(nl, std::vector<double>(ns, 0.0));

    const auto task = [&](std::size_t job) {
        const std::size_t li = job / ns, si = job % ns;
        const std::uint64_t seq_seed = derive_seed(options.seed, 2 * job);
        const auto seq = generate_rb_sequence(options.lengths[li], options.interleave, seq_seed);
        Rng noise(derive_seed(options.seed, 2 * job + 1));
        double f;
        if (options.readout) {
            f = measure_populations(sim.populations_after(seq), *options.readout, noise)[0];
        } else {
            f = sim.survival(seq);
            if (options.shots > 0) f = binomial_fraction(f, options.shots, noise);
        }
        raw[li][si] = f;
    };

    const std::size_t total = nl * ns;
    const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, options.jobs)), 1, total);
    if (workers == 1) {
        for (std::size_t j = 0; j < total; ++j) task(j);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t j = w; j < total; j += workers) task(j);
            });
        for (auto& t : pool) t.join();
    }
    return fit_rb(options.lengths, raw);
}

double irb_fidelity(double epc_reference, double epc_interleaved) {
    return (1.0 - epc_interleaved) / (1.0 - epc_reference);
}

double irb_fidelity(const RbResult& reference, const RbResult& interleaved) {
    if (!reference.fit_ok || !interleaved.fit_ok) throw ProtocolError("IRB needs two successful fits");
    return irb_fidelity(reference.epc, interleaved.epc);
}

}  // namespace fxcr
