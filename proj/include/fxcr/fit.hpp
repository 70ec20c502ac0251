// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "fxcr/types.hpp"

namespace fxcr {

using ResidualFn = std::function<void(const RVec& params, RVec& residuals)>;

struct LeastSquaresFit {
    RVec params;
    RMat covariance;  // s^2 (J^T J)^-1
    double cost = 0.0;  // sum of squared residuals
    bool converged = false;
};

// Unconstrained Levenberg-Marquardt with a forward-difference Jacobian.
LeastSquaresFit levenberg_marquardt(const ResidualFn& fn, const RVec& start, int n_residuals);

}  // namespace fxcr
