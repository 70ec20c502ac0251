// Copyright 2026 The fxcr Authors
// SPDX-License-Identifier: Apache-2.0

#include "fxcr/fit.hpp"

#include <cmath>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace fxcr {

namespace {

struct Functor {
    using Scalar = double;
    using InputType = RVec;
    using ValueType = RVec;
    using JacobianType = RMat;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const ResidualFn* fn;
    int n_in;
    int n_out;

    int inputs() const { return n_in; }
    int values() const { return n_out; }
    int operator()(const RVec& x, RVec& r) const {
        (*fn)(x, r);
        return 0;
    }
};

}  // namespace

LeastSquaresFit levenberg_marquardt(const ResidualFn& fn, const RVec& start, int n_residuals) {
    Functor f{&fn, static_cast<int>(start.size()), n_residuals};
    Eigen::NumericalDiff<Functor> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<Functor>> lm(nd);
    lm.parameters.xtol = 1e-14;
    lm.parameters.ftol = 1e-14;
    lm.parameters.maxfev = 4000;

    LeastSquaresFit out;
    out.params = start;
    const auto status = lm.minimize(out.params);
    out.converged = status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                    status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation;

    RVec r(n_residuals);
    fn(out.params, r);
    out.cost = r.squaredNorm();
    for (int i = 0; i < r.size(); ++i)
        if (!std::isfinite(r(i))) out.converged = false;

    RMat jac(n_residuals, start.size());
    nd.df(out.params, jac);
    const int dof = std::max<int>(1, n_residuals - static_cast<int>(start.size()));
    const double s2 = out.cost / dof;
    RMat jtj = jac.transpose() * jac;
    out.covariance = s2 * jtj.completeOrthogonalDecomposition().pseudoInverse();
    return out;
}

}  // namespace fxcr
