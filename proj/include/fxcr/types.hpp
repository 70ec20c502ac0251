// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fxcr {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Mat4 = Eigen::Matrix4cd;
using Mat2 = Eigen::Matrix2cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

// Failure categories. Each carries a human-readable message.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParameterError : Error {
    using Error::Error;
};
struct ConstructionError : Error {
    using Error::Error;
};
struct SingularityError : Error {
    using Error::Error;
};
struct ResolutionError : Error {
    using Error::Error;
};
struct DivergenceError : Error {
    using Error::Error;
};
struct InversionError : Error {
    using Error::Error;
};
struct CalibrationError : Error {
    using Error::Error;
};
struct ProtocolError : Error {
    using Error::Error;
};
struct FitError : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace fxcr
