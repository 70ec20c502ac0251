// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/clifford.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

#include "fxcr/gates.hpp"
#include "fxcr/rng.hpp"

namespace fxcr {

namespace {

using Ops = std::vector<GateOp>;

GateOp phys(Pulse p, int q = 0) { return {GateOp::Kind::Physical, q, p, 0.0}; }
GateOp vz(double a, int q = 0) { return {GateOp::Kind::VirtualZ, q, Pulse::X90, a}; }
GateOp cx_op() { return {GateOp::Kind::CX, 0, Pulse::X90, 0.0}; }

int physical_count(const Ops& ops) {
    int n = 0;
    for (const auto& op : ops) n += op.kind == GateOp::Kind::Physical;
    return n;
}

int cx_count(const Ops& ops) {
    int n = 0;
    for (const auto& op : ops) n += op.kind == GateOp::Kind::CX;
    return n;
}

Ops on_qubit(Ops ops, int q) {
    for (auto& op : ops) op.qubit = q;
    return ops;
}

// Hash key of a canonical-phase matrix on a 1e-6 grid.
std::string matrix_key(const CMat& canon) {
    std::string key;
    key.reserve(static_cast<size_t>(canon.size()) * 2 * sizeof(std::int32_t));
    for (Eigen::Index i = 0; i < canon.rows(); ++i)
        for (Eigen::Index j = 0; j < canon.cols(); ++j) {
            for (double x : {canon(i, j).real(), canon(i, j).imag()}) {
                const auto v = static_cast<std::int32_t>(std::llround(x * 1e6));
                key.append(reinterpret_cast<const char*>(&v), sizeof v);
            }
        }
    return key;
}

std::vector<CliffordElement> build_single_qubit() {
    const double h = kPi / 2;
    // Paulis; 2pi/3 rotations about the cube diagonals; pi/2 rotations;
    // Hadamard-like pi rotations about face diagonals.
    const std::vector<Ops> table{
        {},
        {phys(Pulse::X180)},
        {phys(Pulse::Y180)},
        {vz(kPi)},
        {phys(Pulse::X90), phys(Pulse::Y90)},
        {phys(Pulse::Y90), phys(Pulse::X90)},
        {phys(Pulse::X90), phys(Pulse::Ym90)},
        {phys(Pulse::Ym90), phys(Pulse::X90)},
        {phys(Pulse::Xm90), phys(Pulse::Y90)},
        {phys(Pulse::Y90), phys(Pulse::Xm90)},
        {phys(Pulse::Xm90), phys(Pulse::Ym90)},
        {phys(Pulse::Ym90), phys(Pulse::Xm90)},
        {phys(Pulse::X90)},
        {phys(Pulse::Xm90)},
        {phys(Pulse::Y90)},
        {phys(Pulse::Ym90)},
        {vz(h)},
        {vz(-h)},
        {phys(Pulse::X90), vz(kPi)},
        {phys(Pulse::Xm90), vz(kPi)},
        {phys(Pulse::Y90), vz(kPi)},
        {phys(Pulse::Ym90), vz(kPi)},
        {phys(Pulse::X180), vz(h)},
        {phys(Pulse::X180), vz(-h)},
    };
    std::vector<CliffordElement> out;
    std::unordered_map<std::string, int> seen;
    for (const auto& ops : table) {
        CliffordElement e;
        e.unitary = canonical_phase(recompose(ops, 1));
        e.decomposition = ops;
        e.physical_1q_count = physical_count(ops);
        if (!seen.emplace(matrix_key(e.unitary), static_cast<int>(out.size())).second)
            throw ConstructionError("duplicate single-qubit Clifford in decomposition table");
        out.push_back(std::move(e));
    }
    return out;
}

// S1: identity and the two 2pi/3 rotations about (1, 1, 1).
const std::array<Ops, 3>& s1_layer() {
    static const std::array<Ops, 3> s1{Ops{}, Ops{phys(Pulse::Y90), phys(Pulse::X90)},
                                       Ops{phys(Pulse::Xm90), phys(Pulse::Ym90)}};
    return s1;
}

constexpr std::size_t kClass1 = 576;
constexpr std::size_t kClass2 = kClass1 + 5184;
constexpr std::size_t kClass3 = kClass2 + 5184;

}  // namespace

std::string to_string(const GateOp& op) {
    static const char* names[] = {"X90", "X-90", "Y90", "Y-90", "X180", "Y180"};
    std::ostringstream s;
    const char q = op.qubit == 0 ? 'A' : 'B';
    switch (op.kind) {
        case GateOp::Kind::Physical: s << names[static_cast<int>(op.pulse)] << ":" << q; break;
        case GateOp::Kind::VirtualZ: s << "Z(" << op.angle << "):" << q; break;
        case GateOp::Kind::CX: s << "CX"; break;
    }
    return s.str();
}

Mat2 pulse_unitary(Pulse p) {
    switch (p) {
        case Pulse::X90: return rx(kPi / 2);
        case Pulse::Xm90: return rx(-kPi / 2);
        case Pulse::Y90: return ry(kPi / 2);
        case Pulse::Ym90: return ry(-kPi / 2);
        case Pulse::X180: return rx(kPi);
        case Pulse::Y180: return ry(kPi);
    }
    return Mat2::Identity();
}

CMat canonical_phase(const CMat& u) {
    for (Eigen::Index i = 0; i < u.rows(); ++i)
        for (Eigen::Index j = 0; j < u.cols(); ++j)
            if (std::abs(u(i, j)) > 1e-9) return u * (std::conj(u(i, j)) / std::abs(u(i, j)));
    return u;
}

CMat recompose(const std::vector<GateOp>& ops, int qubits) {
    if (qubits != 1 && qubits != 2) throw ParameterError("recompose supports 1 or 2 qubits");
    const int dim = qubits == 1 ? 2 : 4;
    CMat u = CMat::Identity(dim, dim);
    for (const auto& op : ops) {
        Mat2 g;
        if (op.kind == GateOp::Kind::CX) {
            if (qubits != 2) throw ParameterError("CX in a single-qubit decomposition");
            u = (z_on_a(kPi / 2) * cx_pi()) * u;
            continue;
        }
        g = op.kind == GateOp::Kind::Physical ? pulse_unitary(op.pulse) : rz(op.angle);
        if (qubits == 1)
            u = g * u;
        else
            u = (op.qubit == 0 ? on_a(g) : on_b(g)) * u;
    }
    return u;
}

const std::vector<CliffordElement>& single_qubit_cliffords() {
    static const std::vector<CliffordElement> group = build_single_qubit();
    return group;
}

std::size_t single_qubit_index(const Mat2& u) {
    static const std::unordered_map<std::string, std::size_t> index = [] {
        std::unordered_map<std::string, std::size_t> m;
        const auto& g = single_qubit_cliffords();
        for (std::size_t i = 0; i < g.size(); ++i) m.emplace(matrix_key(g[i].unitary), i);
        return m;
    }();
    const auto it = index.find(matrix_key(canonical_phase(u)));
    if (it == index.end()) throw ProtocolError("not a single-qubit Clifford");
    return it->second;
}

struct TwoQubitCliffords::Impl {
    std::vector<Mat4> unitaries;
    std::unordered_map<std::string, std::size_t> index;
    double avg_cx = 0.0;
    double avg_1q = 0.0;
};

namespace {

Ops layer(std::size_t a, std::size_t b) {
    const auto& g = single_qubit_cliffords();
    Ops ops = on_qubit(g[a].decomposition, 0);
    const Ops ob = on_qubit(g[b].decomposition, 1);
    ops.insert(ops.end(), ob.begin(), ob.end());
    return ops;
}

Ops layer_ops(const Ops& a, const Ops& b) {
    Ops ops = on_qubit(a, 0);
    const Ops ob = on_qubit(b, 1);
    ops.insert(ops.end(), ob.begin(), ob.end());
    return ops;
}

void append(Ops& dst, const Ops& src) { dst.insert(dst.end(), src.begin(), src.end()); }

Ops two_qubit_decomposition(std::size_t index) {
    if (index >= TwoQubitCliffords::kSize) throw ParameterError("Clifford index out of range");
    Ops ops;
    if (index < kClass1) return layer(index / 24, index % 24);
    const auto& s1 = s1_layer();
    if (index < kClass3) {
        const std::size_t j = index < kClass2 ? index - kClass1 : index - kClass2;
        const std::size_t c = j / 9, s = j % 9;
        append(ops, layer_ops(s1[s / 3], s1[s % 3]));
        ops.push_back(cx_op());
        if (index >= kClass2) {
            const Ops mid{phys(Pulse::X90), phys(Pulse::Y90)};
            append(ops, layer_ops(mid, mid));
            ops.push_back(cx_op());
        }
        append(ops, layer(c / 24, c % 24));
        return ops;
    }
    // SWAP = CNOT (H x H) CNOT (H x H) CNOT.
    const std::size_t c = index - kClass3;
    const std::size_t hi = single_qubit_index(hadamard());
    ops.push_back(cx_op());
    append(ops, layer(hi, hi));
    ops.push_back(cx_op());
    append(ops, layer(hi, hi));
    ops.push_back(cx_op());
    append(ops, layer(c / 24, c % 24));
    return ops;
}

}  // namespace

TwoQubitCliffords::TwoQubitCliffords() {
    auto impl = std::make_unique<Impl>();
    impl->unitaries.reserve(kSize);
    double cx = 0.0, one = 0.0;
    for (std::size_t i = 0; i < kSize; ++i) {
        const Ops ops = two_qubit_decomposition(i);
        const Mat4 u = canonical_phase(recompose(ops, 2));
        if (!impl->index.emplace(matrix_key(u), i).second)
            throw ConstructionError("two-qubit Clifford classes overlap at index " + std::to_string(i));
        impl->unitaries.push_back(u);
        cx += cx_count(ops);
        one += physical_count(ops);
    }
    impl->avg_cx = cx / kSize;
    impl->avg_1q = one / kSize;
    impl_ = std::move(impl);
}

TwoQubitCliffords::~TwoQubitCliffords() = default;

const TwoQubitCliffords& TwoQubitCliffords::instance() {
    static const TwoQubitCliffords group;
    return group;
}

int TwoQubitCliffords::element_class(std::size_t i) {
    if (i < kClass1) return 0;
    if (i < kClass2) return 1;
    if (i < kClass3) return 2;
    return 3;
}

CliffordElement TwoQubitCliffords::element(std::size_t index) const {
    CliffordElement e;
    e.decomposition = two_qubit_decomposition(index);
    e.unitary = impl_->unitaries[index];
    e.physical_1q_count = physical_count(e.decomposition);
    e.cx_count = cx_count(e.decomposition);
    return e;
}

const Mat4& TwoQubitCliffords::unitary(std::size_t index) const {
    if (index >= kSize) throw ParameterError("Clifford index out of range");
    return impl_->unitaries[index];
}

std::size_t TwoQubitCliffords::index_of(const Mat4& u) const {
    const auto it = impl_->index.find(matrix_key(canonical_phase(u)));
    if (it == impl_->index.end()) throw ProtocolError("operator is not a two-qubit Clifford");
    return it->second;
}

std::size_t TwoQubitCliffords::compose(std::size_t first, std::size_t second) const {
    return index_of(unitary(second) * unitary(first));
}

std::size_t TwoQubitCliffords::inverse(std::size_t index) const { return index_of(unitary(index).adjoint()); }

double TwoQubitCliffords::average_cx_count() const { return impl_->avg_cx; }
double TwoQubitCliffords::average_physical_1q_count() const { return impl_->avg_1q; }

RbSequence generate_rb_sequence(std::size_t m, const std::optional<Mat4>& interleave, std::uint64_t seed) {
    if (m < 1) throw ParameterError("sequence length must be >= 1");
    const auto& group = TwoQubitCliffords::instance();
    if (interleave) group.index_of(*interleave);  // must be a Clifford
    Rng rng(seed);
    RbSequence seq;
    seq.interleaved = interleave;
    Mat4 total = Mat4::Identity();
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t c = static_cast<std::size_t>(rng.below(group.size()));
        seq.cliffords.push_back(c);
        total = group.unitary(c) * total;
        if (interleave) {
            total = *interleave * total;
            ++seq.interleave_count;
        }
    }
    seq.recovery = group.index_of(total.adjoint());
    return seq;
}

Mat4 ideal_sequence_unitary(const RbSequence& seq) {
    const auto& group = TwoQubitCliffords::instance();
    Mat4 total = Mat4::Identity();
    for (std::size_t c : seq.cliffords) {
        total = group.unitary(c) * total;
        if (seq.interleaved) total = *seq.interleaved * total;
    }
    return group.unitary(seq.recovery) * total;
}

}  // namespace fxcr
