/*
* Copyright (C) 2026 The epi-traj-opt Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#ifndef EPI_VERIFICATION_FINITE_DIFFERENCE_HPP
#define EPI_VERIFICATION_FINITE_DIFFERENCE_HPP

// Finite-difference oracles. Used only to check hand-written and
// dual-number derivatives; nothing on a solve path depends on this file.

#include "epi/model_traits.hpp"
#include "epi/transcription.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace epi::verification
{

/// |a - b| / max(1, |a|, |b|): relative for large entries, absolute for small ones.
inline double mixed_relative_error(double a, double b)
{
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

template <OdeModel M>
JacobianOf<M> central_difference_jacobian(const M& model, double t, const StateOf<M>& x, const ControlOf<M>& u,
                                          double step = 1e-6)
{
    JacobianOf<M> j;
    for (std::size_t c = 0; c < M::kStates; ++c) {
        auto xp = x, xm = x;
        xp[c] += step;
        xm[c] -= step;
        const auto fp = model.rhs(t, xp, u);
        const auto fm = model.rhs(t, xm, u);
        for (std::size_t r = 0; r < M::kStates; ++r) {
            j.dfdx(r, c) = (fp[r] - fm[r]) / (2.0 * step);
        }
    }
    for (std::size_t c = 0; c < M::kControls; ++c) {
        auto up = u, um = u;
        up[c] += step;
        um[c] -= step;
        const auto fp = model.rhs(t, x, up);
        const auto fm = model.rhs(t, x, um);
        for (std::size_t r = 0; r < M::kStates; ++r) {
            j.dfdu(r, c) = (fp[r] - fm[r]) / (2.0 * step);
        }
    }
    return j;
}

template <std::size_t S, std::size_t C>
double max_mixed_error(const ModelJacobian<S, C>& a, const ModelJacobian<S, C>& b)
{
    double err = 0.0;
    for (Eigen::Index r = 0; r < a.dfdx.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.dfdx.cols(); ++c) {
            err = std::max(err, mixed_relative_error(a.dfdx(r, c), b.dfdx(r, c)));
        }
        for (Eigen::Index c = 0; c < a.dfdu.cols(); ++c) {
            err = std::max(err, mixed_relative_error(a.dfdu(r, c), b.dfdu(r, c)));
        }
    }
    return err;
}

/// Dense central-difference Jacobian of the transcription defects.
template <OptimalControlModel M>
Eigen::MatrixXd central_difference_defect_jacobian(const EulerTranscription<M>& nlp, const Eigen::VectorXd& z,
                                                   double step = 1e-6)
{
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(nlp.n_eq()), static_cast<Eigen::Index>(nlp.n_vars()));
    Eigen::VectorXd zp = z;
    for (Eigen::Index v = 0; v < z.size(); ++v) {
        zp[v]                   = z[v] + step;
        const Eigen::VectorXd fp = nlp.constraints(zp);
        zp[v]                   = z[v] - step;
        const Eigen::VectorXd fm = nlp.constraints(zp);
        zp[v]                   = z[v];
        jac.col(v)              = (fp - fm) / (2.0 * step);
    }
    return jac;
}

/// Largest mixed error between triplets and a dense reference, including entries outside the pattern.
inline double max_mixed_error(const SparseTriplets& t, const Eigen::MatrixXd& dense)
{
    Eigen::MatrixXd assembled = Eigen::MatrixXd::Zero(dense.rows(), dense.cols());
    for (std::size_t e = 0; e < t.nnz(); ++e) {
        assembled(static_cast<Eigen::Index>(t.rows[e]), static_cast<Eigen::Index>(t.cols[e])) += t.values[e];
    }
    double err = 0.0;
    for (Eigen::Index r = 0; r < dense.rows(); ++r) {
        for (Eigen::Index c = 0; c < dense.cols(); ++c) {
            err = std::max(err, mixed_relative_error(assembled(r, c), dense(r, c)));
        }
    }
    return err;
}

} // namespace epi::verification

#endif // EPI_VERIFICATION_FINITE_DIFFERENCE_HPP
