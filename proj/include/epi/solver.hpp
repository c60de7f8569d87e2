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
#ifndef EPI_SOLVER_HPP
#define EPI_SOLVER_HPP

#include "epi/box_lbfgs.hpp"
#include "epi/errors.hpp"
#include "epi/integrator.hpp"
#include "epi/transcription.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace epi
{

struct SolverConfig {
    double tol_kkt          = 1e-8;
    double tol_feas         = 1e-8;
    std::size_t max_outer   = 50;
    std::size_t max_inner   = 500;
    double penalty_init     = 10.0;
    double penalty_growth   = 10.0;
    /// Penalty grows when the defect norm shrinks by less than this factor per outer iteration.
    double required_feas_reduction = 4.0;
    std::size_t lbfgs_memory = 10;
    double armijo            = 1e-4;
    /// Run the inner quasi-Newton iteration in condensed coordinates when the problem offers them.
    bool condensed_inner = true;
    std::uint64_t seed       = 0;

    void validate() const
    {
        if (!(tol_kkt > 0.0) || !(tol_feas > 0.0)) {
            throw ConfigError("solver tolerances must be positive");
        }
        if (max_outer < 1 || max_inner < 1 || lbfgs_memory < 1) {
            throw ConfigError("solver iteration caps must be at least 1");
        }
        if (!(penalty_init > 0.0) || !(penalty_growth > 1.0) || !(required_feas_reduction > 1.0)) {
            throw ConfigError("penalty_init must be positive and penalty_growth greater than 1");
        }
        if (!(armijo > 0.0 && armijo < 0.5)) {
            throw ConfigError("armijo parameter must lie in (0, 0.5)");
        }
    }
};

enum class SolveStatus { converged, iteration_cap, divergence };

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::converged:
        return "converged";
    case SolveStatus::iteration_cap:
        return "iteration-cap";
    case SolveStatus::divergence:
        return "divergence";
    }
    return "unknown";
}

struct IterationRecord {
    std::size_t outer = 0;
    std::size_t inner = 0; ///< inner iterations spent in this outer iteration
    double merit      = 0.0;
    double feas       = 0.0;
    double kkt        = 0.0;
    double penalty    = 0.0;

    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct SolveReport {
    SolveStatus status            = SolveStatus::iteration_cap;
    double objective              = std::numeric_limits<double>::quiet_NaN();
    double kkt_residual           = std::numeric_limits<double>::infinity();
    double feasibility_residual   = std::numeric_limits<double>::infinity();
    double complementarity        = std::numeric_limits<double>::infinity();
    std::size_t outer_iterations  = 0;
    std::size_t inner_iterations  = 0;
    std::size_t evaluations       = 0;
    double wall_time_seconds      = 0.0;
    double max_inner_ascent       = 0.0; ///< largest merit increase over accepted inner steps
    std::vector<IterationRecord> history;
    std::vector<std::string> warnings;
};

/// Equality- and bound-constrained NLP: min f(z) s.t. c(z) = 0, lower <= z <= upper.
template <class P>
concept NlpProblem = requires(const P& p, const Eigen::VectorXd& z) {
    { p.n_vars() } -> std::convertible_to<std::size_t>;
    { p.n_eq() } -> std::convertible_to<std::size_t>;
    { p.lower_bounds() } -> std::convertible_to<const Eigen::VectorXd&>;
    { p.upper_bounds() } -> std::convertible_to<const Eigen::VectorXd&>;
    { p.objective(z) } -> std::convertible_to<double>;
    { p.objective_gradient(z) } -> std::convertible_to<Eigen::VectorXd>;
    { p.constraints(z) } -> std::convertible_to<Eigen::VectorXd>;
    { p.jacobian_transpose_times(z, z) } -> std::convertible_to<Eigen::VectorXd>;
};

/// An NlpProblem offering condensed coordinates in which the defects are explicit variables.
template <class P>
concept CondensableNlp = NlpProblem<P> && requires(const P& p, const Eigen::VectorXd& z) {
    { p.to_condensed(z) } -> std::convertible_to<Eigen::VectorXd>;
    { p.from_condensed(z) } -> std::convertible_to<Eigen::VectorXd>;
    { p.condensed_gradient(z, z) } -> std::convertible_to<Eigen::VectorXd>;
};

static_assert(CondensableNlp<EulerTranscription<DengueModel>>);

struct KktResiduals {
    double stationarity    = 0.0;
    double feasibility     = 0.0;
    double complementarity = 0.0;
};

/**
 * First-order residuals at (z, multipliers) in the max-norm.
 *
 * With g = grad f + J^T multipliers, stationarity is the projected gradient of
 * the Lagrangian; the implied bound multipliers are max(g, 0) at the lower and
 * max(-g, 0) at the upper bound, and complementarity is
 * max_i max(min(z - l, max(g, 0)), min(u - z, max(-g, 0))).
 */
template <NlpProblem P>
KktResiduals kkt_residuals(const P& nlp, const Eigen::VectorXd& z, const Eigen::VectorXd& multipliers)
{
    if (static_cast<std::size_t>(z.size()) != nlp.n_vars() ||
        static_cast<std::size_t>(multipliers.size()) != nlp.n_eq()) {
        throw DomainError("kkt_residuals: dimension mismatch");
    }
    const Eigen::VectorXd g = nlp.objective_gradient(z) + nlp.jacobian_transpose_times(z, multipliers);
    const auto& lo          = nlp.lower_bounds();
    const auto& hi          = nlp.upper_bounds();
    KktResiduals r;
    r.stationarity = projected_gradient(z, g, lo, hi).template lpNorm<Eigen::Infinity>();
    r.feasibility  = nlp.n_eq() == 0 ? 0.0 : nlp.constraints(z).template lpNorm<Eigen::Infinity>();
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (lo[i] == hi[i]) {
            continue;
        }
        const double lower_term = std::min(z[i] - lo[i], std::max(g[i], 0.0));
        const double upper_term = std::min(hi[i] - z[i], std::max(-g[i], 0.0));
        r.complementarity       = std::max({r.complementarity, std::abs(lower_term), std::abs(upper_term)});
    }
    return r;
}

struct NlpSolution {
    Eigen::VectorXd z;
    Eigen::VectorXd multipliers;
    SolveReport report;
};

namespace detail
{
inline double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline void warn_on_scaling(const Eigen::VectorXd& z, std::vector<std::string>& warnings)
{
    const double big = z.lpNorm<Eigen::Infinity>();
    if (big > 1e3) {
        warnings.push_back("decision variable magnitude " + std::to_string(big) + " exceeds 1e3; check scaling");
    }
}
} // namespace detail

/**
 * Augmented-Lagrangian solve of an NlpProblem.
 *
 * Outer loop: minimize
 *   L_A(z) = f(z) + lambda^T c(z) + (penalty / 2) ||c(z)||^2
 * over the box with projected L-BFGS, then lambda <- lambda + penalty c(z).
 * The penalty is multiplied by `penalty_growth` whenever the defect norm did
 * not shrink by `required_feas_reduction`. After the multiplier update the
 * Lagrangian gradient equals the inner projected gradient, so converged
 * means inner tolerance <= tol_kkt and ||c||_inf <= tol_feas.
 */
template <NlpProblem P>
NlpSolution solve_nlp(const P& nlp, const Eigen::VectorXd& z0, const SolverConfig& cfg)
{
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    if (static_cast<std::size_t>(z0.size()) != nlp.n_vars()) {
        throw DomainError("initial guess has wrong length");
    }
    const auto& lo = nlp.lower_bounds();
    const auto& hi = nlp.upper_bounds();

    NlpSolution sol;
    sol.z           = project_onto_box(z0, lo, hi);
    sol.multipliers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nlp.n_eq()));
    auto& rep       = sol.report;

    double penalty    = cfg.penalty_init;
    double inner_tol  = std::max(cfg.tol_kkt, 1e-3);
    Eigen::VectorXd c = nlp.constraints(sol.z);
    double best_feas  = std::numeric_limits<double>::infinity();
    if (!c.allFinite()) {
        rep.status = SolveStatus::divergence;
        rep.warnings.emplace_back("non-finite constraints at the initial guess");
        rep.wall_time_seconds = detail::seconds_since(start);
        return sol;
    }

    Eigen::VectorXd lambda = sol.multipliers;
    auto merit = [&](const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
        const Eigen::VectorXd cz = nlp.constraints(z);
        if (!cz.allFinite()) {
            return std::numeric_limits<double>::infinity();
        }
        const Eigen::VectorXd w = lambda + penalty * cz;
        grad                    = nlp.objective_gradient(z) + nlp.jacobian_transpose_times(z, w);
        return nlp.objective(z) + lambda.dot(cz) + 0.5 * penalty * cz.squaredNorm();
    };

    bool condensed = false;
    if constexpr (CondensableNlp<P>) {
        condensed = cfg.condensed_inner;
    }
    // Inner iterate in the coordinates the quasi-Newton method works in.
    auto to_inner = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        if constexpr (CondensableNlp<P>) {
            if (condensed) {
                return nlp.to_condensed(z);
            }
        }
        return z;
    };
    auto from_inner = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        if constexpr (CondensableNlp<P>) {
            if (condensed) {
                return nlp.from_condensed(v);
            }
        }
        return v;
    };
    auto inner_merit = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
        if constexpr (CondensableNlp<P>) {
            if (condensed) {
                const Eigen::VectorXd z = nlp.from_condensed(v);
                if (!z.allFinite() || z.template lpNorm<Eigen::Infinity>() > 1e6) {
                    return std::numeric_limits<double>::infinity();
                }
                Eigen::VectorXd gz;
                const double val = merit(z, gz);
                if (std::isfinite(val)) {
                    grad = nlp.condensed_gradient(z, gz);
                }
                return val;
            }
        }
        return merit(v, grad);
    };

    BoxLbfgsOptions inner_opts;
    inner_opts.max_iterations = cfg.max_inner;
    inner_opts.memory         = cfg.lbfgs_memory;
    inner_opts.armijo         = cfg.armijo;

    for (std::size_t outer = 1; outer <= cfg.max_outer; ++outer) {
        inner_opts.tol_pg = inner_tol;
        auto inner        = minimize_box_lbfgs(inner_merit, to_inner(sol.z), lo, hi, inner_opts);
        rep.inner_iterations += inner.iterations;
        rep.evaluations += inner.evaluations;
        rep.max_inner_ascent = std::max(rep.max_inner_ascent, inner.max_ascent);
        rep.outer_iterations = outer;
        if (inner.status == BoxLbfgsStatus::divergence || !inner.x.allFinite()) {
            rep.status = SolveStatus::divergence;
            rep.warnings.emplace_back("non-finite merit function during inner solve");
            break;
        }
        sol.z = from_inner(inner.x);
        c     = nlp.constraints(sol.z);
        const double feas = c.template lpNorm<Eigen::Infinity>();
        lambda += penalty * c;
        sol.multipliers = lambda;

        const auto kkt = kkt_residuals(nlp, sol.z, lambda);
        rep.history.push_back({outer, inner.iterations, inner.value, feas, kkt.stationarity, penalty});
        rep.kkt_residual         = kkt.stationarity;
        rep.feasibility_residual = kkt.feasibility;
        rep.complementarity      = kkt.complementarity;

        if (feas <= cfg.tol_feas && kkt.stationarity <= cfg.tol_kkt) {
            rep.status = SolveStatus::converged;
            break;
        }
        if (feas > cfg.tol_feas && feas > best_feas / cfg.required_feas_reduction) {
            penalty *= cfg.penalty_growth;
        }
        best_feas = std::min(best_feas, feas);
        inner_tol = std::max(cfg.tol_kkt, std::min(0.1 * inner_tol, feas));
    }

    rep.objective = nlp.objective(sol.z);
    detail::warn_on_scaling(sol.z, rep.warnings);
    rep.wall_time_seconds = detail::seconds_since(start);
    return sol;
}

/// Quadratic penalty weight * (x_k(N) - target)^2 added to the shooting objective.
struct TerminalPenalty {
    std::size_t state = 0;
    double target     = 0.0;
    double weight     = 0.0;
};

struct ShootingOptions {
    std::vector<TerminalPenalty> terminal_penalties;
    IntegrationOptions integration;
};

struct ShootingEvaluation {
    double value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd gradient; ///< d value / d u, interval-major, control-minor
    bool finite = false;
};

/**
 * Reduced objective x_cost(N) + terminal penalties for a control schedule,
 * with its gradient by the discrete adjoint of the Euler recursion:
 *   adj_N = d value / d x(N)
 *   grad u(i) = h B_i^T adj_{i+1},  adj_i = adj_{i+1} + h A_i^T adj_{i+1}.
 */
template <OptimalControlModel M>
ShootingEvaluation shooting_objective(const M& model, const StateOf<M>& initial,
                                      const ControlSchedule<M::kControls>& schedule,
                                      const ShootingOptions& opts = {})
{
    constexpr std::size_t S = M::kStates;
    constexpr std::size_t C = M::kControls;
    ShootingEvaluation ev;
    const auto run = euler_run(model, initial, schedule, opts.integration);
    const std::size_t n = schedule.grid.n_steps;
    ev.gradient         = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n * C));
    if (run.diverged_at) {
        return ev;
    }
    const auto& xs = run.trajectory.states;
    const double h = schedule.grid.h;

    Eigen::Matrix<double, int(S), 1> adj = Eigen::Matrix<double, int(S), 1>::Zero();
    ev.value = xs[n][M::kCostState];
    adj[static_cast<Eigen::Index>(M::kCostState)] = 1.0;
    for (const auto& tp : opts.terminal_penalties) {
        const double r = xs[n][tp.state] - tp.target;
        ev.value += tp.weight * r * r;
        adj[static_cast<Eigen::Index>(tp.state)] += 2.0 * tp.weight * r;
    }
    for (std::size_t i = n; i-- > 0;) {
        const auto jac = model.jacobian(schedule.grid.time(i), xs[i], schedule.values[i]);
        const Eigen::Matrix<double, int(C), 1> gu = h * (jac.dfdu.transpose() * adj);
        for (std::size_t j = 0; j < C; ++j) {
            ev.gradient[static_cast<Eigen::Index>(i * C + j)] = gu[static_cast<Eigen::Index>(j)];
        }
        adj += h * (jac.dfdx.transpose() * adj);
    }
    ev.finite = std::isfinite(ev.value) && ev.gradient.allFinite();
    return ev;
}

template <OptimalControlModel M>
struct ShootingSolution {
    ControlSchedule<M::kControls> controls;
    Trajectory<M> trajectory;
    SolveReport report;
};

/**
 * Single-shooting solve: states eliminated by Euler simulation, controls
 * optimized by projected L-BFGS within the model's control bounds. The
 * iteration budget is max_outer * max_inner quasi-Newton steps.
 */
template <OptimalControlModel M>
ShootingSolution<M> solve_shooting(const M& model, const TimeGrid& grid, const StateOf<M>& initial,
                                   const ControlSchedule<M::kControls>& u0, const SolverConfig& cfg,
                                   const ShootingOptions& opts = {})
{
    constexpr std::size_t C = M::kControls;
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    if (!(u0.grid == grid)) {
        throw ConfigError("initial control schedule is not on the solve grid");
    }
    u0.validate();
    const std::size_t n = grid.n_steps;
    const auto n_ctl    = static_cast<Eigen::Index>(n * C);

    Eigen::VectorXd lo(n_ctl), hi(n_ctl), v0(n_ctl);
    const auto clo = model.control_lower_bounds();
    const auto chi = model.control_upper_bounds();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < C; ++j) {
            const auto idx = static_cast<Eigen::Index>(i * C + j);
            lo[idx]        = clo[j];
            hi[idx]        = chi[j];
            v0[idx]        = u0.values[i][j];
        }
    }

    ControlSchedule<C> work{grid, u0.values};
    auto unpack = [&](const Eigen::VectorXd& v) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                work.values[i][j] = v[static_cast<Eigen::Index>(i * C + j)];
            }
        }
    };
    auto fg = [&](const Eigen::VectorXd& v, Eigen::VectorXd& grad) {
        unpack(v);
        auto ev = shooting_objective(model, initial, work, opts);
        grad    = std::move(ev.gradient);
        return ev.finite ? ev.value : std::numeric_limits<double>::infinity();
    };

    BoxLbfgsOptions inner;
    inner.tol_pg         = cfg.tol_kkt;
    inner.max_iterations = cfg.max_outer * cfg.max_inner;
    inner.memory         = cfg.lbfgs_memory;
    inner.armijo         = cfg.armijo;
    const auto r         = minimize_box_lbfgs(fg, v0, lo, hi, inner);

    ShootingSolution<M> sol;
    unpack(r.x);
    sol.controls   = work;
    sol.trajectory = euler_simulate(model, initial, work, opts.integration);

    auto& rep            = sol.report;
    rep.objective        = r.value;
    rep.kkt_residual     = r.pg_norm;
    rep.feasibility_residual = 0.0;
    rep.complementarity  = 0.0;
    for (Eigen::Index i = 0; i < r.x.size(); ++i) {
        if (lo[i] != hi[i]) {
            rep.complementarity = std::max({rep.complementarity,
                                            std::abs(std::min(r.x[i] - lo[i], std::max(r.gradient[i], 0.0))),
                                            std::abs(std::min(hi[i] - r.x[i], std::max(-r.gradient[i], 0.0)))});
        }
    }
    rep.outer_iterations = 1;
    rep.inner_iterations = r.iterations;
    rep.evaluations      = r.evaluations;
    rep.history.push_back({1, r.iterations, r.value, 0.0, r.pg_norm, 0.0});
    switch (r.status) {
    case BoxLbfgsStatus::converged:
        rep.status = SolveStatus::converged;
        break;
    case BoxLbfgsStatus::divergence:
        rep.status = SolveStatus::divergence;
        break;
    case BoxLbfgsStatus::line_search_failure:
        rep.status = SolveStatus::iteration_cap;
        rep.warnings.emplace_back("line search stalled before reaching tol_kkt");
        break;
    case BoxLbfgsStatus::iteration_cap:
        rep.status = SolveStatus::iteration_cap;
        break;
    }
    detail::warn_on_scaling(r.x, rep.warnings);
    rep.wall_time_seconds = detail::seconds_since(start);
    return sol;
}

/// Dengue spelling: model and grid consistency taken from the parameter set.
inline ShootingSolution<DengueModel> solve_shooting(const ParameterSet& p, const TimeGrid& grid,
                                                    const DengueModel::State& initial,
                                                    const ControlSchedule<2>& u0, const SolverConfig& cfg,
                                                    bool nonnegative_controls = true)
{
    detail::check_dengue_inputs(initial, u0, p);
    return solve_shooting(DengueModel(p, nonnegative_controls), grid, initial, u0, cfg);
}

/// Uniform random schedule in [lo, hi] for every control, from a seeded Mersenne twister.
template <std::size_t C>
ControlSchedule<C> random_schedule(const TimeGrid& grid, double lo, double hi, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(lo, hi);
    ControlSchedule<C> s{grid, std::vector<std::array<double, C>>(grid.n_steps)};
    for (auto& u : s.values) {
        for (auto& v : u) {
            v = dist(rng);
        }
    }
    return s;
}

struct MultiStartResult {
    std::vector<double> objectives;
    std::vector<SolveStatus> statuses;
    double max_relative_spread = std::numeric_limits<double>::quiet_NaN();
};

/// Shooting solves from `starts` random schedules in [lo, hi]; start k uses seed cfg.seed + k.
template <OptimalControlModel M>
MultiStartResult multistart_shooting(const M& model, const TimeGrid& grid, const StateOf<M>& initial,
                                     const SolverConfig& cfg, std::size_t starts, double lo = 0.0, double hi = 0.5)
{
    MultiStartResult out;
    for (std::size_t k = 0; k < starts; ++k) {
        const auto u0 = random_schedule<M::kControls>(grid, lo, hi, cfg.seed + k);
        const auto s  = solve_shooting(model, grid, initial, u0, cfg);
        out.objectives.push_back(s.report.objective);
        out.statuses.push_back(s.report.status);
    }
    if (!out.objectives.empty()) {
        const auto [mn, mx] = std::minmax_element(out.objectives.begin(), out.objectives.end());
        out.max_relative_spread = (*mx - *mn) / std::max(std::abs(*mn), std::numeric_limits<double>::min());
    }
    return out;
}

} // namespace epi

#endif // EPI_SOLVER_HPP
