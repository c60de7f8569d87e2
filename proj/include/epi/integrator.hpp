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
#ifndef EPI_INTEGRATOR_HPP
#define EPI_INTEGRATOR_HPP

#include "epi/dengue_model.hpp"
#include "epi/errors.hpp"
#include "epi/model_traits.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace epi
{

/// Uniform grid t_i = t0 + i h, i = 0..n_steps.
struct TimeGrid {
    double t0           = 0.0;
    double h            = 0.25;
    std::size_t n_steps = 208;

    double time(std::size_t i) const
    {
        return t0 + static_cast<double>(i) * h;
    }
    double t_final() const
    {
        return time(n_steps);
    }

    /// Grid of step h covering [0, t_final]; h must divide t_final.
    static TimeGrid uniform(double t_final, double h)
    {
        if (!(h > 0.0) || !std::isfinite(h)) {
            throw ConfigError("grid step 'h' must be positive and finite");
        }
        if (!(t_final > 0.0) || !std::isfinite(t_final)) {
            throw ConfigError("'t_final' must be positive and finite");
        }
        const double ratio = t_final / h;
        const double n     = std::round(ratio);
        if (n < 1.0 || std::abs(n - ratio) > 1e-9 * std::max(1.0, ratio)) {
            throw ConfigError("grid step h=" + std::to_string(h) + " does not divide t_final=" +
                              std::to_string(t_final));
        }
        return {0.0, h, static_cast<std::size_t>(n)};
    }

    /// True when t0 + N h matches `t_final` up to a rounding-scaled tolerance.
    bool matches(double t_final) const
    {
        return std::abs(t_final - this->t_final()) <= 1e-9 * std::max(1.0, std::abs(t_final));
    }

    void validate() const
    {
        if (!(h > 0.0) || !std::isfinite(h) || !std::isfinite(t0)) {
            throw ConfigError("grid step 'h' must be positive and finite");
        }
        if (n_steps < 1) {
            throw ConfigError("grid must have at least one step");
        }
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

/// Zero-order-hold controls: values[i] acts on [t_i, t_{i+1}).
template <std::size_t C>
struct ControlSchedule {
    TimeGrid grid;
    std::vector<std::array<double, C>> values;

    static ControlSchedule constant(const TimeGrid& grid, const std::array<double, C>& u)
    {
        return {grid, std::vector<std::array<double, C>>(grid.n_steps, u)};
    }

    /// Control in force at time t (clamped to the grid).
    const std::array<double, C>& value_at(double t) const
    {
        const double pos = (t - grid.t0) / grid.h + 1e-9;
        const auto idx   = static_cast<std::ptrdiff_t>(std::floor(pos));
        const auto last  = static_cast<std::ptrdiff_t>(values.size()) - 1;
        return values[static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(idx, 0, last))];
    }

    /// Piecewise-constant resampling onto another grid (sampled at interval starts).
    ControlSchedule resampled(const TimeGrid& target) const
    {
        ControlSchedule out{target, {}};
        out.values.reserve(target.n_steps);
        for (std::size_t i = 0; i < target.n_steps; ++i) {
            out.values.push_back(value_at(target.time(i)));
        }
        return out;
    }

    void validate() const
    {
        grid.validate();
        if (values.size() != grid.n_steps) {
            throw ConfigError("control schedule has " + std::to_string(values.size()) + " values for " +
                              std::to_string(grid.n_steps) + " intervals");
        }
        for (const auto& u : values) {
            for (double v : u) {
                if (!std::isfinite(v)) {
                    throw DomainError("non-finite control value in schedule");
                }
            }
        }
    }
};

template <OdeModel M>
struct Trajectory {
    TimeGrid grid;
    std::vector<StateOf<M>> states;
    ControlSchedule<M::kControls> controls;
    /// Final value of the cost state; NaN for models without one.
    double total_cost = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::string> diagnostics;
};

struct IntegrationOptions {
    /// Any |state component| above this aborts the run.
    double divergence_threshold = 1e6;
};

template <OdeModel M>
struct SimulationResult {
    Trajectory<M> trajectory; ///< holds states up to and including the last finite one
    std::optional<std::size_t> diverged_at;
    std::string reason;
};

namespace detail
{

template <OdeModel M>
double final_cost(const StateOf<M>& s)
{
    if constexpr (requires { M::kCostState; }) {
        return s[M::kCostState];
    }
    else {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

template <std::size_t S>
std::optional<std::string> check_state(const std::array<double, S>& s, double threshold)
{
    for (std::size_t k = 0; k < S; ++k) {
        if (!std::isfinite(s[k])) {
            return "state component " + std::to_string(k + 1) + " is not finite";
        }
        if (std::abs(s[k]) > threshold) {
            return "state component " + std::to_string(k + 1) + " exceeds " + std::to_string(threshold);
        }
    }
    return std::nullopt;
}

template <std::size_t S>
std::array<double, S> axpy(const std::array<double, S>& x, double a, const std::array<double, S>& y)
{
    std::array<double, S> r;
    for (std::size_t k = 0; k < S; ++k) {
        r[k] = x[k] + a * y[k];
    }
    return r;
}

template <OdeModel M, class Step>
SimulationResult<M> integrate(const StateOf<M>& initial, const ControlSchedule<M::kControls>& schedule,
                              const IntegrationOptions& opts, Step&& step)
{
    schedule.validate();
    const auto& grid = schedule.grid;
    SimulationResult<M> res;
    res.trajectory.grid     = grid;
    res.trajectory.controls = schedule;
    auto& states            = res.trajectory.states;
    states.reserve(grid.n_steps + 1);
    states.push_back(initial);
    if (auto bad = check_state(initial, opts.divergence_threshold)) {
        res.diverged_at = 0;
        res.reason      = *bad;
        return res;
    }
    for (std::size_t i = 0; i < grid.n_steps; ++i) {
        auto next = step(grid.time(i), states.back(), schedule.values[i]);
        if (auto bad = check_state(next, opts.divergence_threshold)) {
            res.diverged_at = i + 1;
            res.reason      = *bad;
            res.trajectory.total_cost = final_cost<M>(states.back());
            return res;
        }
        states.push_back(next);
    }
    res.trajectory.total_cost = final_cost<M>(states.back());
    return res;
}

template <OdeModel M>
Trajectory<M> unwrap(SimulationResult<M>&& r)
{
    if (r.diverged_at) {
        throw DivergenceError(*r.diverged_at, r.reason);
    }
    return std::move(r.trajectory);
}

} // namespace detail

/// Explicit Euler: x_{i+1} = x_i + h f(t_i, x_i, u_i). Reports divergence instead of throwing.
template <OdeModel M>
SimulationResult<M> euler_run(const M& model, const StateOf<M>& initial, const ControlSchedule<M::kControls>& schedule,
                              const IntegrationOptions& opts = {})
{
    const double h = schedule.grid.h;
    return detail::integrate<M>(initial, schedule, opts, [&](double t, const StateOf<M>& x, const ControlOf<M>& u) {
        return detail::axpy(x, h, model.rhs(t, x, u));
    });
}

/// Classical 4th-order Runge-Kutta with `refine` substeps per control interval.
template <OdeModel M>
SimulationResult<M> rk4_run(const M& model, const StateOf<M>& initial, const ControlSchedule<M::kControls>& schedule,
                            std::size_t refine = 25, const IntegrationOptions& opts = {})
{
    if (refine < 1) {
        throw ConfigError("rk4 refine must be a positive integer");
    }
    const double dt = schedule.grid.h / static_cast<double>(refine);
    return detail::integrate<M>(initial, schedule, opts, [&](double t0, StateOf<M> x, const ControlOf<M>& u) {
        for (std::size_t r = 0; r < refine; ++r) {
            const double t = t0 + static_cast<double>(r) * dt;
            const auto k1  = model.rhs(t, x, u);
            const auto k2  = model.rhs(t + 0.5 * dt, detail::axpy(x, 0.5 * dt, k1), u);
            const auto k3  = model.rhs(t + 0.5 * dt, detail::axpy(x, 0.5 * dt, k2), u);
            const auto k4  = model.rhs(t + dt, detail::axpy(x, dt, k3), u);
            for (std::size_t k = 0; k < x.size(); ++k) {
                x[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            }
        }
        return x;
    });
}

/// Throws DivergenceError (with step index) when a state goes non-finite or out of range.
template <OdeModel M>
Trajectory<M> euler_simulate(const M& model, const StateOf<M>& initial, const ControlSchedule<M::kControls>& schedule,
                             const IntegrationOptions& opts = {})
{
    return detail::unwrap(euler_run(model, initial, schedule, opts));
}

template <OdeModel M>
Trajectory<M> rk4_simulate(const M& model, const StateOf<M>& initial, const ControlSchedule<M::kControls>& schedule,
                           std::size_t refine = 25, const IntegrationOptions& opts = {})
{
    return detail::unwrap(rk4_run(model, initial, schedule, refine, opts));
}

namespace detail
{
inline void check_dengue_inputs(const DengueModel::State& initial, const ControlSchedule<2>& schedule,
                                const ParameterSet& p)
{
    if (initial[DengueModel::kCost] != 0.0) {
        throw ConfigError("initial accumulated cost x5 must be 0");
    }
    if (!schedule.grid.matches(p.t_final)) {
        throw ConfigError("control grid ends at t=" + std::to_string(schedule.grid.t_final()) +
                          " but t_final=" + std::to_string(p.t_final));
    }
}
} // namespace detail

inline Trajectory<DengueModel> euler_simulate(const DengueModel::State& initial, const ControlSchedule<2>& schedule,
                                              const ParameterSet& p)
{
    detail::check_dengue_inputs(initial, schedule, p);
    return euler_simulate(DengueModel(p), initial, schedule);
}

inline Trajectory<DengueModel> rk4_simulate(const DengueModel::State& initial, const ControlSchedule<2>& schedule,
                                            const ParameterSet& p, std::size_t refine = 25)
{
    detail::check_dengue_inputs(initial, schedule, p);
    return rk4_simulate(DengueModel(p), initial, schedule, refine);
}

enum class Scheme { euler, rk4 };

struct ConvergenceStudy {
    std::vector<double> steps;
    std::vector<double> errors; ///< max-norm final-state error per step
    double order = std::numeric_limits<double>::quiet_NaN(); ///< least-squares slope of log(error) vs log(h)
    std::vector<std::string> warnings;
};

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y)
{
    const std::size_t n = std::min(x.size(), y.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double dn = static_cast<double>(n);
    return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

/**
 * Empirical global order of `scheme` on [0, t_final], measured against a
 * given reference final state. The schedule is resampled onto each grid.
 * Divergent runs are dropped with a warning.
 */
template <OdeModel M>
ConvergenceStudy convergence_order(const M& model, const StateOf<M>& initial,
                                   const ControlSchedule<M::kControls>& schedule, double t_final,
                                   std::span<const double> steps, Scheme scheme, const StateOf<M>& reference)
{
    if (steps.size() < 3) {
        throw ConfigError("convergence_order needs at least three step sizes");
    }
    ConvergenceStudy study;
    for (double h : steps) {
        const auto grid = TimeGrid::uniform(t_final, h);
        const auto sched = schedule.resampled(grid);
        auto run = scheme == Scheme::euler ? euler_run(model, initial, sched) : rk4_run(model, initial, sched, 1);
        if (run.diverged_at) {
            study.warnings.push_back("h=" + std::to_string(h) + " diverged: " + run.reason);
            continue;
        }
        const auto& x = run.trajectory.states.back();
        double err    = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k) {
            err = std::max(err, std::abs(x[k] - reference[k]));
        }
        study.steps.push_back(h);
        study.errors.push_back(err);
    }
    if (study.steps.size() >= 2) {
        study.order = log_log_slope(study.steps, study.errors);
    }
    else {
        study.warnings.emplace_back("fewer than two usable runs; order undefined");
    }
    return study;
}

/// As above, with an rk4 reference at step min(steps) / 32.
template <OdeModel M>
ConvergenceStudy convergence_order(const M& model, const StateOf<M>& initial,
                                   const ControlSchedule<M::kControls>& schedule, double t_final,
                                   std::span<const double> steps, Scheme scheme)
{
    if (steps.empty()) {
        throw ConfigError("convergence_order needs at least three step sizes");
    }
    const double h_min   = *std::min_element(steps.begin(), steps.end());
    const auto ref_grid  = TimeGrid::uniform(t_final, h_min);
    const auto reference = rk4_simulate(model, initial, schedule.resampled(ref_grid), 32);
    return convergence_order(model, initial, schedule, t_final, steps, scheme, reference.states.back());
}

} // namespace epi

#endif // EPI_INTEGRATOR_HPP
