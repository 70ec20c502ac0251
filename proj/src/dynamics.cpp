// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fxcr/fit.hpp"

namespace fxcr {

Crosstalk default_crosstalk() {
    Crosstalk k;
    k << 1.0, 0.3 * std::polar(1.0, 0.4), 0.25 * std::polar(1.0, -0.7), 1.0;
    return k;
}

void DriveConfig::validate() const {
    if (!std::isfinite(frequency) || frequency < 0.0) throw ParameterError("drive frequency must be >= 0");
    Eigen::JacobiSVD<Crosstalk> svd(crosstalk);
    const auto sv = svd.singularValues();
    if (sv(1) <= 0.0 || sv(0) / sv(1) >= 1e6) throw ParameterError("crosstalk matrix is not invertible");
    if (!(envelope.dt > 0.0)) throw ParameterError("envelope dt must be > 0");
    if (reflection) reflection->validate();
}

std::pair<cplx, cplx> DriveConfig::local_amplitudes() const {
    const Eigen::Vector2cd ports(port_c, port_c2);
    const Eigen::Vector2cd local = crosstalk * ports;
    return {local(0), local(1)};
}

PulseEnvelope DriveConfig::delivered_envelope() const {
    if (reflection && !reflection->empty()) return apply_reflection_channel(envelope, *reflection);
    return envelope;
}

void CoherenceSpec::validate() const {
    auto positive = [](const std::optional<double>& v, const char* name) {
        if (v && !(*v > 0.0)) throw ParameterError(std::string(name) + " must be positive");
    };
    positive(t1_a, "t1_a");
    positive(t1_b, "t1_b");
    positive(t2e_a, "t2e_a");
    positive(t2e_b, "t2e_b");
    positive(t2star_a, "t2star_a");
    positive(t2star_b, "t2star_b");
    positive(level2_t1, "level2_t1");
    positive(level2_t2, "level2_t2");
    auto bounded = [](const std::optional<double>& t1, const std::optional<double>& t2, const char* name) {
        if (t1 && t2 && *t2 > 2.0 * *t1 * (1.0 + 1e-12))
            throw ParameterError(std::string(name) + ": T2 exceeds 2 T1 (negative pure-dephasing rate)");
    };
    bounded(t1_a, t2e_a, "qubit A");
    bounded(t1_b, t2e_b, "qubit B");
    bounded(level2_t1, level2_t2, "level 2");
}

bool CoherenceSpec::any() const { return t1_a || t1_b || t2e_a || t2e_b || level2_t1 || level2_t2; }

CoherenceSpec table1_coherence() {
    CoherenceSpec c;
    c.t1_a = 56.0;
    c.t1_b = 25.0;
    c.t2e_a = 23.0;
    c.t2e_b = 14.75;
    return c;
}

namespace {

struct SparseTerm {
    int row;
    int col;
    double amp;
};

struct CollapseSet {
    std::vector<std::vector<SparseTerm>> ops;
    RVec anti_diag;  // diagonal of sum_c L_c^dag L_c (all our operators give a diagonal sum)
    bool empty() const { return ops.empty(); }
};

double pure_dephasing_rate(const std::optional<double>& t1, const std::optional<double>& t2) {
    if (!t2) return 0.0;
    const double g1 = t1 ? 1.0 / *t1 : 0.0;
    const double gphi = 1.0 / *t2 - 0.5 * g1;
    if (gphi < -1e-15) throw ParameterError("negative pure-dephasing rate");
    return std::max(0.0, gphi);
}

CollapseSet build_collapse(const DressedSystem& s, const CoherenceSpec& c) {
    c.validate();
    CollapseSet set;
    const int L = s.levels;
    auto idx = [&](int qubit, int level, int other) { return qubit == 0 ? s.index(level, other) : s.index(other, level); };

    auto add_lowering = [&](int qubit, int from, int to, double rate_per_ns) {
        if (rate_per_ns <= 0.0) return;
        std::vector<SparseTerm> op;
        for (int j = 0; j < L; ++j) op.push_back({idx(qubit, to, j), idx(qubit, from, j), std::sqrt(rate_per_ns)});
        set.ops.push_back(std::move(op));
    };
    // Coherence between |0> and |1> decays at gphi with L = sqrt(gphi / 2) (|0><0| - |1><1|).
    auto add_dephasing = [&](int qubit, double gphi_per_ns) {
        if (gphi_per_ns <= 0.0) return;
        const double a = std::sqrt(0.5 * gphi_per_ns);
        std::vector<SparseTerm> op;
        for (int j = 0; j < L; ++j) {
            op.push_back({idx(qubit, 0, j), idx(qubit, 0, j), a});
            op.push_back({idx(qubit, 1, j), idx(qubit, 1, j), -a});
        }
        set.ops.push_back(std::move(op));
    };
    // Coherence between |2> and any other level decays at gphi with L = sqrt(2 gphi) |2><2|.
    auto add_level2_dephasing = [&](int qubit, double gphi_per_ns) {
        if (gphi_per_ns <= 0.0) return;
        std::vector<SparseTerm> op;
        for (int j = 0; j < L; ++j) op.push_back({idx(qubit, 2, j), idx(qubit, 2, j), std::sqrt(2.0 * gphi_per_ns)});
        set.ops.push_back(std::move(op));
    };

    const double us = 1e-3;  // 1/us -> 1/ns
    if (c.t1_a) add_lowering(0, 1, 0, us / *c.t1_a);
    if (c.t1_b) add_lowering(1, 1, 0, us / *c.t1_b);
    add_dephasing(0, us * pure_dephasing_rate(c.t1_a, c.t2e_a));
    add_dephasing(1, us * pure_dephasing_rate(c.t1_b, c.t2e_b));
    if (c.level2_t1) {
        add_lowering(0, 2, 1, us / *c.level2_t1);
        add_lowering(1, 2, 1, us / *c.level2_t1);
    }
    const double g2 = us * pure_dephasing_rate(c.level2_t1, c.level2_t2);
    add_level2_dephasing(0, g2);
    add_level2_dephasing(1, g2);

    set.anti_diag = RVec::Zero(s.dim);
    for (const auto& op : set.ops) {
        // L^dag L = sum over term pairs sharing a row; rows are distinct within an op
        // except for the diagonal operators, where each term is its own row.
        for (const auto& t : op) set.anti_diag(t.col) += t.amp * t.amp;
    }
    return set;
}

// Interaction-picture generator. Drive Hamiltonian in the Schroedinger
// picture is H_D(t) = a(t) n_A + b(t) n_B = i (a R_A + b R_B).
class Generator {
public:
    Generator(const DressedSystem& s, const std::vector<DriveConfig>& drives) : sys_(s) {
        ra_ = s.n_a_op.imag();
        rb_ = s.n_b_op.imag();
        for (const auto& d : drives) {
            d.validate();
            Active a;
            const auto [ea, eb] = d.local_amplitudes();
            a.eps_a = ea;
            a.eps_b = eb;
            a.freq = d.frequency;
            a.env = d.delivered_envelope();
            a.start = d.start;
            if (a.env.samples.empty() || (ea == 0.0 && eb == 0.0)) continue;
            active_.push_back(std::move(a));
        }
    }

    bool driven() const { return !active_.empty(); }

    // Coefficients a(t), b(t).
    void coefficients(double t, double& a, double& b) const {
        a = b = 0.0;
        for (const auto& d : active_) {
            const cplx s = d.env.value(t - d.start);
            if (s == 0.0) continue;
            const cplx carrier = std::polar(1.0, -kTwoPi * d.freq * t);
            a += (s * d.eps_a * carrier).real();
            b += (s * d.eps_b * carrier).real();
        }
    }

    void drive_matrix(double t, RMat& w) const {
        double a, b;
        coefficients(t, a, b);
        w.noalias() = a * ra_;
        w.noalias() += b * rb_;
    }

    void phases(double t, CVec& p) const {
        p.resize(sys_.dim);
        for (int k = 0; k < sys_.dim; ++k) p(k) = std::polar(1.0, kTwoPi * sys_.energies(k) * t);
    }

    std::vector<double> knots(double t0, double t1) const {
        std::vector<double> out;
        for (const auto& d : active_)
            for (size_t k = 0; k <= d.env.samples.size(); ++k) {
                const double t = d.start + static_cast<double>(k) * d.env.dt;
                if (t > t0 && t < t1) out.push_back(t);
            }
        return out;
    }

    double fastest_frequency() const {
        if (active_.empty()) return 0.0;
        double bohr = 0.0;
        const double scale = std::max(ra_.cwiseAbs().maxCoeff(), rb_.cwiseAbs().maxCoeff());
        for (int k = 0; k < sys_.dim; ++k)
            for (int l = 0; l < sys_.dim; ++l)
                if (std::abs(ra_(k, l)) + std::abs(rb_(k, l)) > 1e-12 * scale)
                    bohr = std::max(bohr, std::abs(sys_.energies(k) - sys_.energies(l)));
        double f = 0.0;
        for (const auto& d : active_) f = std::max(f, d.freq);
        return bohr + f;
    }

    double min_dt() const {
        double dt = std::numeric_limits<double>::infinity();
        for (const auto& d : active_) dt = std::min(dt, d.env.dt);
        return dt;
    }

private:
    struct Active {
        cplx eps_a, eps_b;
        double freq = 0.0;
        PulseEnvelope env;
        double start = 0.0;
    };
    const DressedSystem& sys_;
    RMat ra_, rb_;
    std::vector<Active> active_;
};

double dissipator_frequency(const DressedSystem& s, const CollapseSet& c) {
    double f = 0.0;
    for (const auto& op : c.ops)
        for (const auto& t1 : op)
            for (const auto& t2 : op) {
                const double w = (s.energies(t1.row) - s.energies(t2.row)) - (s.energies(t1.col) - s.energies(t2.col));
                f = std::max(f, std::abs(w));
            }
    return f;
}

double step_bound(const Generator& g, double dissipator_f) {
    const double f = std::max(g.fastest_frequency(), dissipator_f);
    double h = f > 0.0 ? 0.05 / f : std::numeric_limits<double>::infinity();
    if (g.driven()) h = std::min(h, g.min_dt() / 4.0);
    return h;
}

std::vector<double> breakpoints(const Generator& g, const std::vector<double>& grid) {
    std::vector<double> pts = grid;
    auto k = g.knots(grid.front(), grid.back());
    pts.insert(pts.end(), k.begin(), k.end());
    std::sort(pts.begin(), pts.end());
    std::vector<double> out;
    for (double t : pts)
        if (out.empty() || t - out.back() > 1e-12) out.push_back(t);
    return out;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw ParameterError("time grid is empty");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] >= grid[i - 1])) throw ParameterError("time grid must be ascending");
}

double resolve_step(double bound, const IntegratorOptions& o) {
    if (o.step) {
        if (!(*o.step > 0.0)) throw ResolutionError("integrator step must be positive");
        if (*o.step > bound * (1.0 + 1e-9)) {
            std::ostringstream os;
            os << "integrator step " << *o.step << " ns exceeds the allowed " << bound << " ns";
            throw ResolutionError(os.str());
        }
        return *o.step;
    }
    return bound;
}

// Pure-state RK4 over a set of breakpoints; `visit` is called at every
// breakpoint that belongs to the user grid.
template <typename Visit>
void integrate_pure(const Generator& g, CMat& psi, const std::vector<double>& pts, double hmax, Visit&& visit) {
    const int n = static_cast<int>(psi.rows());
    const int m = static_cast<int>(psi.cols());
    RMat w(n, n);
    CVec p0, pm, p1;
    CMat k1(n, m), k2(n, m), k3(n, m), k4(n, m), tmp(n, m), work(n, m);
    RMat re(n, m), im(n, m);

    // d psi / dt = 2 pi P W P^* psi
    auto deriv = [&](double t, const CVec& p, const CMat& x, CMat& out) {
        g.drive_matrix(t, w);
        work = p.conjugate().asDiagonal() * x;
        re.noalias() = w * work.real();
        im.noalias() = w * work.imag();
        out.real() = re;
        out.imag() = im;
        out = kTwoPi * (p.asDiagonal() * out);
    };

    visit(pts.front(), psi);
    for (size_t seg = 0; seg + 1 < pts.size(); ++seg) {
        const double a = pts[seg], b = pts[seg + 1];
        const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / hmax - 1e-9)));
        const double h = (b - a) / steps;
        if (g.driven()) {
            g.phases(a, p0);
            for (int s = 0; s < steps; ++s) {
                const double t = a + s * h;
                g.phases(t + 0.5 * h, pm);
                g.phases(t + h, p1);
                deriv(t, p0, psi, k1);
                tmp = psi + 0.5 * h * k1;
                deriv(t + 0.5 * h, pm, tmp, k2);
                tmp = psi + 0.5 * h * k2;
                deriv(t + 0.5 * h, pm, tmp, k3);
                tmp = psi + h * k3;
                deriv(t + h, p1, tmp, k4);
                psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                p0.swap(p1);
            }
        }
        visit(b, psi);
    }
}

// Open-system RK4 on a batch of interaction-picture operators.
template <typename Visit>
void integrate_open(const Generator& g, const CollapseSet& c, std::vector<CMat>& rhos, const std::vector<double>& pts,
                    double hmax, Visit&& visit) {
    const int n = rhos.empty() ? 0 : static_cast<int>(rhos.front().rows());
    const size_t m = rhos.size();
    RMat w(n, n);
    CVec p0, pm, p1;
    CMat phase_grid(n, n), sigma(n, n), out(n, n);
    RMat a_re(n, n), a_im(n, n), b_re(n, n), b_im(n, n);
    std::vector<CMat> k1(m), k2(m), k3(m), k4(m), tmp(m);

    // d rho / dt = G .* [ 2 pi (W s - s W) + D(s) ],  s = conj(G) .* rho,  G_kl = p_k conj(p_l)
    auto deriv = [&](double t, const CVec& p, const std::vector<CMat>& x, std::vector<CMat>& res) {
        const bool drive = g.driven();
        if (drive) g.drive_matrix(t, w);
        phase_grid = p * p.adjoint();
        for (size_t q = 0; q < m; ++q) {
            sigma = phase_grid.conjugate().cwiseProduct(x[q]);
            if (drive) {
                a_re.noalias() = w * sigma.real();
                a_im.noalias() = w * sigma.imag();
                b_re.noalias() = sigma.real() * w;
                b_im.noalias() = sigma.imag() * w;
                out.real() = kTwoPi * (a_re - b_re);
                out.imag() = kTwoPi * (a_im - b_im);
            } else {
                out.setZero();
            }
            if (!c.empty()) {
                for (const auto& op : c.ops)
                    for (const auto& t1 : op)
                        for (const auto& t2 : op) out(t1.row, t2.row) += t1.amp * t2.amp * sigma(t1.col, t2.col);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < n; ++j) out(i, j) -= 0.5 * (c.anti_diag(i) + c.anti_diag(j)) * sigma(i, j);
            }
            res[q] = phase_grid.cwiseProduct(out);
        }
    };

    const bool active = g.driven() || !c.empty();
    visit(pts.front(), rhos);
    for (size_t seg = 0; seg + 1 < pts.size(); ++seg) {
        const double a = pts[seg], b = pts[seg + 1];
        const int steps = std::max(1, static_cast<int>(std::ceil((b - a) / hmax - 1e-9)));
        const double h = (b - a) / steps;
        if (active) {
            g.phases(a, p0);
            for (int s = 0; s < steps; ++s) {
                const double t = a + s * h;
                g.phases(t + 0.5 * h, pm);
                g.phases(t + h, p1);
                deriv(t, p0, rhos, k1);
                for (size_t q = 0; q < m; ++q) tmp[q] = rhos[q] + 0.5 * h * k1[q];
                deriv(t + 0.5 * h, pm, tmp, k2);
                for (size_t q = 0; q < m; ++q) tmp[q] = rhos[q] + 0.5 * h * k2[q];
                deriv(t + 0.5 * h, pm, tmp, k3);
                for (size_t q = 0; q < m; ++q) tmp[q] = rhos[q] + h * k3[q];
                deriv(t + h, p1, tmp, k4);
                for (size_t q = 0; q < m; ++q) rhos[q] += (h / 6.0) * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
                p0.swap(p1);
            }
        }
        visit(b, rhos);
    }
}

bool on_grid(double t, const std::vector<double>& grid, size_t& cursor) {
    bool hit = false;
    while (cursor < grid.size() && std::abs(grid[cursor] - t) < 1e-12) {
        hit = true;
        ++cursor;
    }
    return hit;
}

}  // namespace

double max_step(const DressedSystem& system, const std::vector<DriveConfig>& drives, const CoherenceSpec* coherence) {
    Generator g(system, drives);
    double fd = 0.0;
    if (coherence) fd = dissipator_frequency(system, build_collapse(system, *coherence));
    return step_bound(g, fd);
}

CVec basis_state(const DressedSystem& system, int a, int b) {
    CVec v = CVec::Zero(system.dim);
    v(system.index(a, b)) = 1.0;
    return v;
}

PropagationResult propagate_schrodinger(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                                        const CVec& initial, const std::vector<double>& t_grid,
                                        const IntegratorOptions& options) {
    check_grid(t_grid);
    if (initial.size() != system.dim) throw ParameterError("initial state has the wrong dimension");
    Generator g(system, drives);
    const double h = resolve_step(step_bound(g, 0.0), options);
    const auto comp = system.computational();

    PropagationResult res;
    res.step = h;
    res.populations = RMat::Zero(static_cast<Eigen::Index>(t_grid.size()), 4);
    res.leakage = RVec::Zero(static_cast<Eigen::Index>(t_grid.size()));
    CMat psi = initial;
    // The interaction-picture state at t0.
    CVec p;
    g.phases(t_grid.front(), p);
    psi = p.asDiagonal() * psi;

    size_t cursor = 0;
    integrate_pure(g, psi, breakpoints(g, t_grid), h, [&](double t, const CMat& x) {
        if (!on_grid(t, t_grid, cursor)) return;
        const size_t row = res.times.size();
        for (size_t r = row; r < cursor; ++r) {
            res.times.push_back(t);
            double comp_pop = 0.0;
            for (int c = 0; c < 4; ++c) {
                res.populations(static_cast<Eigen::Index>(r), c) = std::norm(x(comp[c], 0));
                comp_pop += std::norm(x(comp[c], 0));
            }
            res.leakage(static_cast<Eigen::Index>(r)) = x.squaredNorm() - comp_pop;
            if (options.record_states) {
                CVec q;
                g.phases(t, q);
                res.states.push_back(q.conjugate().asDiagonal() * x.col(0));
            }
        }
    });
    return res;
}

PropagationResult propagate_lindblad(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                                     const CMat& initial, const CoherenceSpec& coherence,
                                     const std::vector<double>& t_grid, const IntegratorOptions& options) {
    check_grid(t_grid);
    if (initial.rows() != system.dim || initial.cols() != system.dim)
        throw ParameterError("initial density matrix has the wrong dimension");
    Generator g(system, drives);
    const CollapseSet c = build_collapse(system, coherence);
    const double h = resolve_step(step_bound(g, dissipator_frequency(system, c)), options);
    const auto comp = system.computational();

    PropagationResult res;
    res.step = h;
    res.populations = RMat::Zero(static_cast<Eigen::Index>(t_grid.size()), 4);
    res.leakage = RVec::Zero(static_cast<Eigen::Index>(t_grid.size()));
    CVec p;
    g.phases(t_grid.front(), p);
    std::vector<CMat> rhos{(p * p.adjoint()).cwiseProduct(initial)};

    size_t cursor = 0;
    integrate_open(g, c, rhos, breakpoints(g, t_grid), h, [&](double t, const std::vector<CMat>& x) {
        if (!on_grid(t, t_grid, cursor)) return;
        const size_t row = res.times.size();
        for (size_t r = row; r < cursor; ++r) {
            res.times.push_back(t);
            double comp_pop = 0.0;
            for (int k = 0; k < 4; ++k) {
                const double v = x[0](comp[k], comp[k]).real();
                res.populations(static_cast<Eigen::Index>(r), k) = v;
                comp_pop += v;
            }
            res.leakage(static_cast<Eigen::Index>(r)) = x[0].trace().real() - comp_pop;
            if (options.record_states) {
                CVec q;
                g.phases(t, q);
                res.densities.push_back((q * q.adjoint()).conjugate().cwiseProduct(x[0]));
            }
        }
    });
    return res;
}

CMat propagate_frame_columns(const DressedSystem& system, const std::vector<DriveConfig>& drives, const CMat& initial,
                             double t0, double t1, const IntegratorOptions& options) {
    Generator g(system, drives);
    const double h = resolve_step(step_bound(g, 0.0), options);
    CMat psi = initial;
    integrate_pure(g, psi, breakpoints(g, {t0, t1}), h, [](double, const CMat&) {});
    return psi;
}

GateResult extract_gate(const DressedSystem& system, const std::vector<DriveConfig>& drives, double gate_time,
                        const GateFrame& frame, const IntegratorOptions& options) {
    if (!(gate_time >= 0.0)) throw ParameterError("gate_time must be >= 0");
    const auto comp = system.computational();
    CMat init = CMat::Zero(system.dim, 4);
    for (int c = 0; c < 4; ++c) init(comp[c], c) = 1.0;
    GateResult r;
    r.columns = gate_time > 0.0 ? propagate_frame_columns(system, drives, init, 0.0, gate_time, options) : init;
    double kept = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            r.raw(i, j) = r.columns(comp[i], j);
            kept += std::norm(r.raw(i, j));
        }
    r.leakage = std::clamp(1.0 - kept / 4.0, 0.0, 1.0);
    r.u = virtual_z_compose(r.raw, frame);
    return r;
}

ProcessResult lindblad_process(const DressedSystem& system, const std::vector<DriveConfig>& drives, double gate_time,
                               const CoherenceSpec& coherence, const IntegratorOptions& options) {
    Generator g(system, drives);
    const CollapseSet c = build_collapse(system, coherence);
    const double h = resolve_step(step_bound(g, dissipator_frequency(system, c)), options);
    const auto comp = system.computational();

    // Inputs |i><j| with i <= j; the rest follow from Hermiticity of the map.
    std::vector<std::pair<int, int>> pairs;
    std::vector<CMat> rhos;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            CMat e = CMat::Zero(system.dim, system.dim);
            e(comp[i], comp[j]) = 1.0;
            rhos.push_back(e);
            pairs.emplace_back(i, j);
        }
    integrate_open(g, c, rhos, breakpoints(g, {0.0, gate_time}), h, [](double, const std::vector<CMat>&) {});

    ProcessResult r;
    r.superop = CMat::Zero(16, 16);
    double kept = 0.0;
    for (size_t q = 0; q < pairs.size(); ++q) {
        const auto [i, j] = pairs[q];
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) {
                const cplx v = rhos[q](comp[a], comp[b]);
                r.superop(4 * a + b, 4 * i + j) = v;
                if (i != j) r.superop(4 * b + a, 4 * j + i) = std::conj(v);
            }
        if (i == j)
            for (int a = 0; a < 4; ++a) kept += rhos[q](comp[a], comp[a]).real();
    }
    r.leakage = std::clamp(1.0 - kept / 4.0, 0.0, 1.0);
    return r;
}

CMat frame_superop(const CMat& superop, const GateFrame& f) {
    const Mat4 after = z_on_b(-f.theta_b / 2);
    const Mat4 before = z_on_b(-f.theta_b / 2) * z_on_a(f.theta_b / 2 - f.theta_a);
    return unitary_superop(after) * superop * unitary_superop(before);
}

RMat chevron_scan(const DressedSystem& system, const DriveConfig& drive_template, const std::vector<double>& detunings,
                  const std::vector<double>& times, int control_state, const IntegratorOptions& options) {
    if (times.empty()) return RMat(static_cast<Eigen::Index>(detunings.size()), 0);
    const double dt = drive_template.envelope.dt > 0 ? drive_template.envelope.dt : 1.0;
    const double tmax = *std::max_element(times.begin(), times.end());
    PulseEnvelope flat;
    flat.dt = dt;
    flat.descriptor.kind = EnvelopeKind::Custom;
    flat.samples.assign(static_cast<size_t>(std::ceil(tmax / dt)) + 1, cplx{1.0});

    std::vector<double> grid{0.0};
    for (double t : times) grid.push_back(t);
    std::sort(grid.begin(), grid.end());

    RMat map(static_cast<Eigen::Index>(detunings.size()), static_cast<Eigen::Index>(times.size()));
    for (size_t d = 0; d < detunings.size(); ++d) {
        DriveConfig drive = drive_template;
        drive.frequency += detunings[d];
        drive.envelope = flat;
        drive.start = 0.0;
        IntegratorOptions o = options;
        o.record_states = true;
        const auto res = propagate_schrodinger(system, {drive}, basis_state(system, control_state, 0), grid, o);
        for (size_t k = 0; k < times.size(); ++k) {
            const auto it = std::find(res.times.begin(), res.times.end(), times[k]);
            const CVec& psi = res.states[static_cast<size_t>(it - res.times.begin())];
            double p1 = 0.0;
            for (int a = 0; a < system.levels; ++a) p1 += std::norm(psi(system.index(a, 1)));
            map(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = p1;
        }
    }
    return map;
}

std::vector<std::array<double, 3>> bloch_trajectory(const DressedSystem& system, const std::vector<DriveConfig>& drives,
                                                    const std::vector<double>& t_grid, int control_state,
                                                    const IntegratorOptions& options) {
    IntegratorOptions o = options;
    o.record_states = true;
    const auto res = propagate_schrodinger(system, drives, basis_state(system, control_state, 0), t_grid, o);
    std::vector<std::array<double, 3>> out;
    CVec p;
    Generator g(system, drives);
    for (size_t k = 0; k < res.times.size(); ++k) {
        g.phases(res.times[k], p);
        const CVec psi = p.asDiagonal() * res.states[k];  // rotating frame
        cplx r00 = 0.0, r11 = 0.0, r01 = 0.0;
        for (int a = 0; a < system.levels; ++a) {
            const cplx c0 = psi(system.index(a, 0)), c1 = psi(system.index(a, 1));
            r00 += std::norm(c0);
            r11 += std::norm(c1);
            r01 += c0 * std::conj(c1);
        }
        out.push_back({2.0 * r01.real(), -2.0 * r01.imag(), (r00 - r11).real()});
    }
    return out;
}

RabiFit fit_rabi(const std::vector<double>& times, const std::vector<double>& excited) {
    const int n = static_cast<int>(times.size());
    if (n < 5) throw ParameterError("Rabi fit needs at least 5 points");
    const double span = times.back() - times.front();
    double mean = 0.0;
    for (double v : excited) mean += v;
    mean /= n;

    // Coarse periodogram: best single-frequency linear fit.
    double best_f = 0.0, best_score = -1.0;
    const int trials = 4000;
    double dtmin = span;
    for (int i = 1; i < n; ++i) dtmin = std::min(dtmin, times[i] - times[i - 1]);
    const double fmax = 0.5 / dtmin;
    for (int k = 1; k <= trials; ++k) {
        const double f = fmax * k / trials;
        double cc = 0, ss = 0, cs = 0, yc = 0, ys = 0;
        for (int i = 0; i < n; ++i) {
            const double c = std::cos(kTwoPi * f * times[i]), s = std::sin(kTwoPi * f * times[i]);
            const double y = excited[i] - mean;
            cc += c * c;
            ss += s * s;
            cs += c * s;
            yc += y * c;
            ys += y * s;
        }
        const double det = cc * ss - cs * cs;
        if (std::abs(det) < 1e-12) continue;
        const double a = (yc * ss - ys * cs) / det, b = (ys * cc - yc * cs) / det;
        const double score = a * yc + b * ys;
        if (score > best_score) {
            best_score = score;
            best_f = f;
        }
    }

    auto residual = [&](const RVec& x, RVec& r) {
        for (int i = 0; i < n; ++i)
            r(i) = x(2) - 0.5 * x(1) * std::cos(kTwoPi * x(0) * times[i] + x(3)) - excited[i];
    };
    RVec start(4);
    start << best_f, 1.0, mean, 0.0;
    double best_cost = std::numeric_limits<double>::infinity();
    LeastSquaresFit best;
    for (double ph : {0.0, 0.5 * kPi, kPi, 1.5 * kPi}) {
        start(3) = ph;
        auto f = levenberg_marquardt(residual, start, n);
        if (f.cost < best_cost) {
            best_cost = f.cost;
            best = f;
        }
    }
    // Canonical form: f >= 0, contrast >= 0, phase in (-pi, pi].
    RabiFit out;
    out.frequency = std::abs(best.params(0));
    out.contrast = best.params(1);
    out.offset = best.params(2);
    out.phase = best.params(0) < 0.0 ? -best.params(3) : best.params(3);
    if (out.contrast < 0.0) {
        out.contrast = -out.contrast;
        out.phase += kPi;
    }
    out.phase = std::remainder(out.phase, kTwoPi);
    return out;
}

double step_doubling_check(const DressedSystem& system, const std::vector<DriveConfig>& drives, double gate_time,
                           const IntegratorOptions& options) {
    Generator g(system, drives);
    const double h = resolve_step(step_bound(g, 0.0), options);
    IntegratorOptions a = options, b = options;
    a.step = h;
    b.step = h / 2;
    const auto ga = extract_gate(system, drives, gate_time, {}, a);
    const auto gb = extract_gate(system, drives, gate_time, {}, b);
    const cplx overlap = (ga.columns.adjoint() * gb.columns).trace();
    return 1.0 - std::norm(overlap) / (ga.columns.squaredNorm() * gb.columns.squaredNorm());
}

}  // namespace fxcr
