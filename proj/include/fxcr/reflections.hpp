// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fxcr/pulse.hpp"

namespace fxcr {

struct ReflectionScanOptions {
    double pi_len = 8.0;      // ns
    double max_delay = 60.0;  // ns, largest echo delay searched
    double spacing = 80.0;    // ns between repeated sets (tau)
    std::vector<int> repetitions{1, 2, 3};
};

// Delay-sweep traces against a channel. Quadrature: [X_pi, wait, X_-pi];
// in-phase: [+-X_pi, wait, Y_pi] with the X sign alternating per set.
// Each inner vector is P(1) versus the gap (0, 1, ... ns) for one n.
struct ReflectionTraces {
    std::vector<std::vector<double>> quadrature;
    std::vector<std::vector<double>> in_phase;
};

ReflectionTraces reflection_traces(const ReflectionModel& channel, const ReflectionScanOptions& options = {});

// Blind estimate of an unknown channel. `hidden` is only used to generate the
// measured traces; the estimate is built from the traces alone.
ReflectionModel characterize_reflections(const ReflectionModel& hidden, const ReflectionScanOptions& options = {});

struct SingleQubitGateSet {
    double pi_len = 16.0;  // ns
    double sigma = 4.0;    // ns
    double amplitude_scale = 1.0;
    double detuning = 0.0;  // GHz
    std::optional<ReflectionModel> channel;         // hardware line
    std::optional<ReflectionModel> predistortion;   // model used to predistort
};

// The 21 standard AllXY pairs in order.
const std::vector<std::array<const char*, 2>>& allxy_pairs();
// Ideal excited populations: 5 x 0, 12 x 0.5, 4 x 1.
const std::vector<double>& allxy_ideal();
std::vector<double> allxy_trace(const SingleQubitGateSet& gates);

}  // namespace fxcr
