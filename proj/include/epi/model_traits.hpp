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
#ifndef EPI_MODEL_TRAITS_HPP
#define EPI_MODEL_TRAITS_HPP

#include "epi/dual.hpp"

#include <Eigen/Core>

#include <array>
#include <concepts>
#include <cstddef>

namespace epi
{

template <std::size_t S, std::size_t C>
struct ModelJacobian {
    Eigen::Matrix<double, int(S), int(S)> dfdx = Eigen::Matrix<double, int(S), int(S)>::Zero();
    Eigen::Matrix<double, int(S), int(C)> dfdu = Eigen::Matrix<double, int(S), int(C)>::Zero();
};

/**
 * An autonomous-or-not ODE x' = f(t, x, u) with a fixed number of states and
 * piecewise-constant controls.
 *
 * The right-hand side is a template over the scalar type so that it can be
 * evaluated with Dual numbers; `jacobian` is the hand-written derivative.
 */
template <class M>
concept OdeModel = requires(const M& m, double t, const std::array<double, M::kStates>& x,
                            const std::array<double, M::kControls>& u) {
    { M::kStates } -> std::convertible_to<std::size_t>;
    { M::kControls } -> std::convertible_to<std::size_t>;
    { m.rhs(t, x, u) } -> std::same_as<std::array<double, M::kStates>>;
    { m.jacobian(t, x, u) } -> std::same_as<ModelJacobian<M::kStates, M::kControls>>;
};

/// An OdeModel whose running cost is carried as an extra state (Mayer form).
template <class M>
concept OptimalControlModel = OdeModel<M> && requires(const M& m) {
    { M::kCostState } -> std::convertible_to<std::size_t>;
    { m.control_lower_bounds() } -> std::same_as<std::array<double, M::kControls>>;
    { m.control_upper_bounds() } -> std::same_as<std::array<double, M::kControls>>;
};

template <OdeModel M>
using StateOf = std::array<double, M::kStates>;

template <OdeModel M>
using ControlOf = std::array<double, M::kControls>;

template <OdeModel M>
using JacobianOf = ModelJacobian<M::kStates, M::kControls>;

/// Jacobian of the model right-hand side by forward-mode dual numbers.
template <OdeModel M>
JacobianOf<M> dual_jacobian(const M& model, double t, const StateOf<M>& x, const ControlOf<M>& u)
{
    constexpr std::size_t S = M::kStates;
    constexpr std::size_t C = M::kControls;
    using D                 = Dual<S + C>;
    std::array<D, S> xd;
    std::array<D, C> ud;
    for (std::size_t i = 0; i < S; ++i) {
        xd[i] = D::make_variable(x[i], i);
    }
    for (std::size_t j = 0; j < C; ++j) {
        ud[j] = D::make_variable(u[j], S + j);
    }
    const auto f = model.template rhs<D>(t, xd, ud);
    JacobianOf<M> jac;
    for (std::size_t r = 0; r < S; ++r) {
        for (std::size_t i = 0; i < S; ++i) {
            jac.dfdx(r, i) = f[r].d[i];
        }
        for (std::size_t j = 0; j < C; ++j) {
            jac.dfdu(r, j) = f[r].d[S + j];
        }
    }
    return jac;
}

} // namespace epi

#endif // EPI_MODEL_TRAITS_HPP
