// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fxcr/types.hpp"

namespace fxcr {

enum class Pulse : std::uint8_t { X90, Xm90, Y90, Ym90, X180, Y180 };

// One step of a physical decomposition, in time order.
struct GateOp {
    enum class Kind : std::uint8_t { Physical, VirtualZ, CX };
    Kind kind = Kind::Physical;
    int qubit = 0;  // 0 = A, 1 = B (single-qubit ops)
    Pulse pulse = Pulse::X90;
    double angle = 0.0;  // VirtualZ
};

std::string to_string(const GateOp& op);
Mat2 pulse_unitary(Pulse p);

// A CX slot is the native CX_pi followed by a virtual S on A, i.e. CNOT.
struct CliffordElement {
    CMat unitary;  // canonical phase
    std::vector<GateOp> decomposition;
    int physical_1q_count = 0;
    int cx_count = 0;
};

// First entry with magnitude above 1e-9 (row-major) made real positive.
CMat canonical_phase(const CMat& u);
// Ideal operator of a decomposition on `qubits` qubits.
CMat recompose(const std::vector<GateOp>& ops, int qubits);

// The 24 single-qubit Cliffords; 28 physical pulses in total.
const std::vector<CliffordElement>& single_qubit_cliffords();
std::size_t single_qubit_index(const Mat2& u);

// Lazily materialized two-qubit Clifford group, built once and shared.
class TwoQubitCliffords {
public:
    static constexpr std::size_t kSize = 11520;
    static const TwoQubitCliffords& instance();

    std::size_t size() const { return kSize; }
    // Class of an index: 0 single-qubit, 1 CNOT-like, 2 iSWAP-like, 3 SWAP-like.
    static int element_class(std::size_t index);
    CliffordElement element(std::size_t index) const;
    const Mat4& unitary(std::size_t index) const;
    // Throws ProtocolError if u is not a two-qubit Clifford.
    std::size_t index_of(const Mat4& u) const;
    std::size_t compose(std::size_t first, std::size_t second) const;  // second after first
    std::size_t inverse(std::size_t index) const;
    double average_cx_count() const;
    double average_physical_1q_count() const;

private:
    TwoQubitCliffords();
    ~TwoQubitCliffords();
    struct Impl;
    std::unique_ptr<const Impl> impl_;
};

struct RbSequence {
    std::vector<std::size_t> cliffords;
    std::optional<Mat4> interleaved;
    std::size_t interleave_count = 0;
    std::size_t recovery = 0;
};

// m uniformly random two-qubit Cliffords (each followed by `interleave` when
// given), closed by the recovery element. Seeded from (seed).
RbSequence generate_rb_sequence(std::size_t m, const std::optional<Mat4>& interleave, std::uint64_t seed);
// Ideal product of a sequence including its recovery.
Mat4 ideal_sequence_unitary(const RbSequence& seq);

}  // namespace fxcr
