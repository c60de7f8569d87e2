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
#ifndef EPI_TRANSCRIPTION_HPP
#define EPI_TRANSCRIPTION_HPP

#include "epi/errors.hpp"
#include "epi/integrator.hpp"
#include "epi/model_traits.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace epi
{

/// Constraint Jacobian in triplet (coordinate) form.
struct SparseTriplets {
    std::vector<std::size_t> rows;
    std::vector<std::size_t> cols;
    std::vector<double> values;

    std::size_t nnz() const
    {
        return values.size();
    }
};

/// Where a flat decision-vector entry lives in the discretized problem.
struct VariableRef {
    enum class Kind { state, control } kind;
    std::size_t node; ///< grid node (state) or interval (control)
    std::size_t component;

    friend bool operator==(const VariableRef&, const VariableRef&) = default;
};

struct TranscriptionReport {
    std::size_t n_vars                = 0;
    std::size_t n_eq                  = 0;
    std::size_t n_nonlinear_vars      = 0;
    std::size_t n_nonlinear_eq        = 0;
    std::size_t n_fixed_vars          = 0;
    std::size_t n_bounded_vars        = 0;
    std::size_t jacobian_nnz          = 0;
    TimeGrid grid;
};

/// Dimensions published for the h = 1/4, 52-week problem after an external presolve pass.
struct PresolvedDimensions {
    std::size_t n_vars           = 1455;
    std::size_t n_nonlinear_vars = 1243;
    std::size_t n_eq             = 1039;
    std::size_t n_nonlinear_eq   = 828;
};

/**
 * Euler direct transcription of an optimal control problem in Mayer form.
 *
 * Decision vector layout (interleaved, node-major):
 *   [x(0), u(0), x(1), u(1), ..., x(N-1), u(N-1), x(N)]
 * so n_vars = S (N + 1) + C N. Defect (i, k) sits at row i S + k and reads
 *   x_k(i+1) - x_k(i) - h f_k(t_i, x(i), u(i)).
 * The objective is the cost state at node N. Initial states are fixed through
 * equal lower/upper bounds.
 */
template <OptimalControlModel M>
class EulerTranscription
{
public:
    static constexpr std::size_t S = M::kStates;
    static constexpr std::size_t C = M::kControls;
    using State                    = StateOf<M>;
    using Control                  = ControlOf<M>;

    struct Options {
        std::optional<Control> control_lower;
        std::optional<Control> control_upper;
        /// (state index, value) pairs fixed at node N through bounds.
        std::vector<std::pair<std::size_t, double>> terminal_fixed;
    };

    EulerTranscription(M model, TimeGrid grid, State initial, Options opts = {})
        : m_model(std::move(model))
        , m_grid(grid)
        , m_initial(initial)
    {
        m_grid.validate();
        for (double v : m_initial) {
            if (!std::isfinite(v)) {
                throw ConfigError("initial state must be finite");
            }
        }
        build_bounds(opts);
        build_pattern();
    }

    const M& model() const
    {
        return m_model;
    }
    const TimeGrid& grid() const
    {
        return m_grid;
    }
    const State& initial_state() const
    {
        return m_initial;
    }

    std::size_t n_vars() const
    {
        return S * (m_grid.n_steps + 1) + C * m_grid.n_steps;
    }
    std::size_t n_eq() const
    {
        return S * m_grid.n_steps;
    }

    std::size_t state_index(std::size_t node, std::size_t k) const
    {
        return node * (S + C) + k;
    }
    std::size_t control_index(std::size_t interval, std::size_t j) const
    {
        return interval * (S + C) + S + j;
    }
    std::size_t defect_index(std::size_t interval, std::size_t k) const
    {
        return interval * S + k;
    }
    std::size_t objective_index() const
    {
        return state_index(m_grid.n_steps, M::kCostState);
    }

    VariableRef variable(std::size_t flat) const
    {
        if (flat >= n_vars()) {
            throw DomainError("variable index out of range");
        }
        const std::size_t node = flat / (S + C);
        const std::size_t off  = flat % (S + C);
        if (off < S) {
            return {VariableRef::Kind::state, node, off};
        }
        return {VariableRef::Kind::control, node, off - S};
    }

    const Eigen::VectorXd& lower_bounds() const
    {
        return m_lower;
    }
    const Eigen::VectorXd& upper_bounds() const
    {
        return m_upper;
    }

    double objective(const Eigen::VectorXd& z) const
    {
        check_size(z);
        return z[objective_index()];
    }

    /// Unit indicator of the final cost state.
    Eigen::VectorXd objective_gradient(const Eigen::VectorXd& z) const
    {
        check_size(z);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_vars()));
        g[objective_index()] = 1.0;
        return g;
    }

    /// Euler defects in node-major, state-minor order.
    Eigen::VectorXd constraints(const Eigen::VectorXd& z) const
    {
        check_size(z);
        Eigen::VectorXd c(static_cast<Eigen::Index>(n_eq()));
        const double h = m_grid.h;
        for (std::size_t i = 0; i < m_grid.n_steps; ++i) {
            const State x  = state_at(z, i);
            const State xn = state_at(z, i + 1);
            const auto f   = m_model.rhs(m_grid.time(i), x, control_at(z, i));
            for (std::size_t k = 0; k < S; ++k) {
                c[defect_index(i, k)] = xn[k] - x[k] - h * f[k];
            }
        }
        return c;
    }

    /// Fixed sparsity pattern (rows, cols) shared by every jacobian_values() call.
    const SparseTriplets& jacobian_pattern() const
    {
        return m_pattern;
    }

    /// Jacobian values in the order of jacobian_pattern().
    Eigen::VectorXd jacobian_values(const Eigen::VectorXd& z) const
    {
        check_size(z);
        Eigen::VectorXd vals(static_cast<Eigen::Index>(m_pattern.nnz()));
        const double h = m_grid.h;
        std::size_t e  = 0;
        for (std::size_t i = 0; i < m_grid.n_steps; ++i) {
            const auto jac = m_model.jacobian(m_grid.time(i), state_at(z, i), control_at(z, i));
            for (std::size_t k = 0; k < S; ++k) {
                for (std::size_t j : m_row_state_cols[k]) {
                    vals[static_cast<Eigen::Index>(e++)] = -(j == k ? 1.0 : 0.0) - h * jac.dfdx(k, j);
                }
                for (std::size_t j : m_row_control_cols[k]) {
                    vals[static_cast<Eigen::Index>(e++)] = -h * jac.dfdu(k, j);
                }
                vals[static_cast<Eigen::Index>(e++)] = 1.0;
            }
        }
        return vals;
    }

    SparseTriplets constraint_jacobian(const Eigen::VectorXd& z) const
    {
        SparseTriplets t = m_pattern;
        const auto vals  = jacobian_values(z);
        t.values.assign(vals.data(), vals.data() + vals.size());
        return t;
    }

    /// J(z)^T v without forming J.
    Eigen::VectorXd jacobian_transpose_times(const Eigen::VectorXd& z, const Eigen::VectorXd& v) const
    {
        check_size(z);
        if (static_cast<std::size_t>(v.size()) != n_eq()) {
            throw DomainError("multiplier vector has wrong length");
        }
        Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_vars()));
        const double h      = m_grid.h;
        for (std::size_t i = 0; i < m_grid.n_steps; ++i) {
            const auto jac = m_model.jacobian(m_grid.time(i), state_at(z, i), control_at(z, i));
            Eigen::Matrix<double, int(S), 1> w;
            for (std::size_t k = 0; k < S; ++k) {
                w[static_cast<Eigen::Index>(k)] = v[static_cast<Eigen::Index>(defect_index(i, k))];
            }
            const Eigen::Matrix<double, int(S), 1> gx = -w - h * (jac.dfdx.transpose() * w);
            const Eigen::Matrix<double, int(C), 1> gu = -h * (jac.dfdu.transpose() * w);
            for (std::size_t k = 0; k < S; ++k) {
                out[static_cast<Eigen::Index>(state_index(i, k))] += gx[static_cast<Eigen::Index>(k)];
                out[static_cast<Eigen::Index>(state_index(i + 1, k))] += w[static_cast<Eigen::Index>(k)];
            }
            for (std::size_t j = 0; j < C; ++j) {
                out[static_cast<Eigen::Index>(control_index(i, j))] += gu[static_cast<Eigen::Index>(j)];
            }
        }
        return out;
    }

    /**
     * Condensed coordinates share the layout and bounds of z, but each state
     * slot at node i+1 without finite bounds holds the defect of interval i
     * instead of the state itself. States are recovered by the recursion
     *   x(i+1) = x(i) + h f(t_i, x(i), u(i)) + e(i),
     * so the penalty part of an augmented Lagrangian becomes separable. Bounded
     * state slots (the fixed initial state, fixed terminal states) keep their value.
     */
    Eigen::VectorXd to_condensed(const Eigen::VectorXd& z) const
    {
        const Eigen::VectorXd c = constraints(z);
        Eigen::VectorXd v       = z;
        for (std::size_t i = 0; i < m_grid.n_steps; ++i) {
            for (std::size_t k = 0; k < S; ++k) {
                if (!m_state_bounded[(i + 1) * S + k]) {
                    v[static_cast<Eigen::Index>(state_index(i + 1, k))] = c[static_cast<Eigen::Index>(defect_index(i, k))];
                }
            }
        }
        return v;
    }

    Eigen::VectorXd from_condensed(const Eigen::VectorXd& v) const
    {
        check_size(v);
        Eigen::VectorXd z = v;
        const double h    = m_grid.h;
        for (std::size_t i = 0; i < m_grid.n_steps; ++i) {
            const State x = state_at(z, i);
            const auto f  = m_model.rhs(m_grid.time(i), x, control_at(z, i));
            for (std::size_t k = 0; k < S; ++k) {
                if (!m_state_bounded[(i + 1) * S + k]) {
                    const auto idx = static_cast<Eigen::Index>(state_index(i + 1, k));
                    z[idx]         = x[k] + h * f[k] + v[idx];
                }
            }
        }
        return z;
    }

    /// Gradient with respect to condensed coordinates, given z = from_condensed(v) and dL/dz.
    Eigen::VectorXd condensed_gradient(const Eigen::VectorXd& z, const Eigen::VectorXd& grad_z) const
    {
        check_size(z);
        Eigen::VectorXd gv = grad_z;
        const double h     = m_grid.h;
        Eigen::Matrix<double, int(S), 1> adj;
        for (std::size_t i = m_grid.n_steps; i-- > 0;) {
            // adjoint of x(i+1) restricted to the slots produced by the recursion
            for (std::size_t k = 0; k < S; ++k) {
                const auto idx = static_cast<Eigen::Index>(state_index(i + 1, k));
                adj[static_cast<Eigen::Index>(k)] = m_state_bounded[(i + 1) * S + k] ? 0.0 : gv[idx];
            }
            const auto jac = m_model.jacobian(m_grid.time(i), state_at(z, i), control_at(z, i));
            const Eigen::Matrix<double, int(S), 1> gx = adj + h * (jac.dfdx.transpose() * adj);
            const Eigen::Matrix<double, int(C), 1> gu = h * (jac.dfdu.transpose() * adj);
            for (std::size_t k = 0; k < S; ++k) {
                gv[static_cast<Eigen::Index>(state_index(i, k))] += gx[static_cast<Eigen::Index>(k)];
            }
            for (std::size_t j = 0; j < C; ++j) {
                gv[static_cast<Eigen::Index>(control_index(i, j))] += gu[static_cast<Eigen::Index>(j)];
            }
        }
        return gv;
    }

    /// Flattens a trajectory on this grid into a decision vector.
    Eigen::VectorXd pack(const Trajectory<M>& traj) const
    {
        if (traj.states.size() != m_grid.n_steps + 1 || traj.controls.values.size() != m_grid.n_steps) {
            throw DomainError("trajectory does not match the transcription grid");
        }
        Eigen::VectorXd z(static_cast<Eigen::Index>(n_vars()));
        for (std::size_t i = 0; i <= m_grid.n_steps; ++i) {
            for (std::size_t k = 0; k < S; ++k) {
                z[static_cast<Eigen::Index>(state_index(i, k))] = traj.states[i][k];
            }
            if (i < m_grid.n_steps) {
                for (std::size_t j = 0; j < C; ++j) {
                    z[static_cast<Eigen::Index>(control_index(i, j))] = traj.controls.values[i][j];
                }
            }
        }
        return z;
    }

    /// Un-flattens z. Defects above `tol_feas` are attached as a diagnostic, not thrown.
    Trajectory<M> extract(const Eigen::VectorXd& z, double tol_feas = 1e-8) const
    {
        check_size(z);
        Trajectory<M> traj;
        traj.grid          = m_grid;
        traj.controls.grid = m_grid;
        for (std::size_t i = 0; i <= m_grid.n_steps; ++i) {
            traj.states.push_back(state_at(z, i));
            if (i < m_grid.n_steps) {
                traj.controls.values.push_back(control_at(z, i));
            }
        }
        traj.total_cost       = z[objective_index()];
        const double max_defect = constraints(z).template lpNorm<Eigen::Infinity>();
        if (!(max_defect <= tol_feas)) {
            traj.diagnostics.push_back("infeasible decision vector: max defect " + std::to_string(max_defect));
        }
        return traj;
    }

    /// Packed zero-control Euler trajectory: feasible by construction.
    Eigen::VectorXd zero_control_guess() const
    {
        Control zero{};
        for (std::size_t j = 0; j < C; ++j) {
            zero[j] = std::clamp(0.0, m_control_lower[j], m_control_upper[j]);
        }
        return pack(euler_simulate(m_model, m_initial, ControlSchedule<C>::constant(m_grid, zero)));
    }

    TranscriptionReport report() const
    {
        TranscriptionReport r;
        r.n_vars       = n_vars();
        r.n_eq         = n_eq();
        r.grid         = m_grid;
        r.jacobian_nnz = m_pattern.nnz();
        const std::size_t n = m_grid.n_steps;
        std::size_t nl_state_cols = 0, nl_control_cols = 0, nl_rows = 0;
        for (std::size_t k = 0; k < S; ++k) {
            nl_state_cols += m_nonlinear_state[k] ? 1 : 0;
            nl_rows += m_nonlinear_row[k] ? 1 : 0;
        }
        for (std::size_t j = 0; j < C; ++j) {
            nl_control_cols += m_nonlinear_control[j] ? 1 : 0;
        }
        // States at node N enter their defect linearly only.
        r.n_nonlinear_vars = n * (nl_state_cols + nl_control_cols);
        r.n_nonlinear_eq   = n * nl_rows;
        for (Eigen::Index v = 0; v < m_lower.size(); ++v) {
            if (m_lower[v] == m_upper[v]) {
                ++r.n_fixed_vars;
            }
            else if (std::isfinite(m_lower[v]) || std::isfinite(m_upper[v])) {
                ++r.n_bounded_vars;
            }
        }
        return r;
    }

    State state_at(const Eigen::VectorXd& z, std::size_t node) const
    {
        State x;
        const std::size_t base = state_index(node, 0);
        for (std::size_t k = 0; k < S; ++k) {
            x[k] = z[static_cast<Eigen::Index>(base + k)];
        }
        return x;
    }

    Control control_at(const Eigen::VectorXd& z, std::size_t interval) const
    {
        Control u;
        const std::size_t base = control_index(interval, 0);
        for (std::size_t j = 0; j < C; ++j) {
            u[j] = z[static_cast<Eigen::Index>(base + j)];
        }
        return u;
    }

private:
    void check_size(const Eigen::VectorXd& z) const
    {
        if (static_cast<std::size_t>(z.size()) != n_vars()) {
            throw DomainError("decision vector has length " + std::to_string(z.size()) + ", expected " +
                              std::to_string(n_vars()));
        }
    }

    void build_bounds(const Options& opts)
    {
        const double inf = std::numeric_limits<double>::infinity();
        m_control_lower  = opts.control_lower.value_or(m_model.control_lower_bounds());
        m_control_upper  = opts.control_upper.value_or(m_model.control_upper_bounds());
        for (std::size_t j = 0; j < C; ++j) {
            if (m_control_lower[j] > m_control_upper[j]) {
                throw ConfigError("control lower bound exceeds upper bound");
            }
        }
        m_lower = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_vars()), -inf);
        m_upper = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_vars()), inf);
        for (std::size_t k = 0; k < S; ++k) {
            const auto idx = static_cast<Eigen::Index>(state_index(0, k));
            m_lower[idx] = m_upper[idx] = m_initial[k];
        }
        for (std::size_t i = 0; i < m_grid.n_steps; ++i) {
            for (std::size_t j = 0; j < C; ++j) {
                const auto idx = static_cast<Eigen::Index>(control_index(i, j));
                m_lower[idx]   = m_control_lower[j];
                m_upper[idx]   = m_control_upper[j];
            }
        }
        for (const auto& [k, value] : opts.terminal_fixed) {
            if (k >= S || !std::isfinite(value)) {
                throw ConfigError("invalid terminal state fix");
            }
            const auto idx = static_cast<Eigen::Index>(state_index(m_grid.n_steps, k));
            m_lower[idx] = m_upper[idx] = value;
        }
        m_state_bounded.assign(S * (m_grid.n_steps + 1), false);
        for (std::size_t i = 0; i <= m_grid.n_steps; ++i) {
            for (std::size_t k = 0; k < S; ++k) {
                const auto idx = static_cast<Eigen::Index>(state_index(i, k));
                m_state_bounded[i * S + k] = std::isfinite(m_lower[idx]) || std::isfinite(m_upper[idx]);
            }
        }
    }

    /// Structural pattern and nonlinearity of the model Jacobian, probed at a few fixed points.
    void build_pattern()
    {
        constexpr std::array<double, 3> probe_scale{0.37, 0.81, 1.23};
        std::array<JacobianOf<M>, probe_scale.size()> probes;
        const double t = m_grid.t0 + 0.5 * m_grid.h;
        for (std::size_t p = 0; p < probe_scale.size(); ++p) {
            State x;
            Control u;
            for (std::size_t k = 0; k < S; ++k) {
                x[k] = probe_scale[p] * (1.0 + 0.173 * static_cast<double>(k));
            }
            for (std::size_t j = 0; j < C; ++j) {
                u[j] = probe_scale[(p + 1) % probe_scale.size()] * (0.5 + 0.291 * static_cast<double>(j));
            }
            probes[p] = m_model.jacobian(t, x, u);
        }
        m_nonlinear_row.fill(false);
        m_nonlinear_state.fill(false);
        m_nonlinear_control.fill(false);
        for (std::size_t k = 0; k < S; ++k) {
            m_row_state_cols[k].clear();
            m_row_control_cols[k].clear();
            for (std::size_t j = 0; j < S; ++j) {
                bool nonzero = j == k, varies = false;
                for (const auto& pr : probes) {
                    nonzero = nonzero || pr.dfdx(k, j) != 0.0;
                    varies  = varies || pr.dfdx(k, j) != probes[0].dfdx(k, j);
                }
                if (nonzero) {
                    m_row_state_cols[k].push_back(j);
                }
                if (varies) {
                    m_nonlinear_row[k]   = true;
                    m_nonlinear_state[j] = true;
                }
            }
            for (std::size_t j = 0; j < C; ++j) {
                bool nonzero = false, varies = false;
                for (const auto& pr : probes) {
                    nonzero = nonzero || pr.dfdu(k, j) != 0.0;
                    varies  = varies || pr.dfdu(k, j) != probes[0].dfdu(k, j);
                }
                if (nonzero) {
                    m_row_control_cols[k].push_back(j);
                }
                if (varies) {
                    m_nonlinear_row[k]     = true;
                    m_nonlinear_control[j] = true;
                }
            }
        }
        m_pattern = {};
        for (std::size_t i = 0; i < m_grid.n_steps; ++i) {
            for (std::size_t k = 0; k < S; ++k) {
                const std::size_t row = defect_index(i, k);
                for (std::size_t j : m_row_state_cols[k]) {
                    m_pattern.rows.push_back(row);
                    m_pattern.cols.push_back(state_index(i, j));
                }
                for (std::size_t j : m_row_control_cols[k]) {
                    m_pattern.rows.push_back(row);
                    m_pattern.cols.push_back(control_index(i, j));
                }
                m_pattern.rows.push_back(row);
                m_pattern.cols.push_back(state_index(i + 1, k));
            }
        }
        m_pattern.values.assign(m_pattern.rows.size(), 0.0);
    }

    M m_model;
    TimeGrid m_grid;
    State m_initial;
    Control m_control_lower{};
    Control m_control_upper{};
    Eigen::VectorXd m_lower;
    Eigen::VectorXd m_upper;
    std::vector<bool> m_state_bounded;
    SparseTriplets m_pattern;
    std::array<std::vector<std::size_t>, S> m_row_state_cols;
    std::array<std::vector<std::size_t>, S> m_row_control_cols;
    std::array<bool, S> m_nonlinear_row{};
    std::array<bool, S> m_nonlinear_state{};
    std::array<bool, C> m_nonlinear_control{};
};

/// Dengue transcription with the grid and consistency checks taken from the parameter set.
inline EulerTranscription<DengueModel> transcribe(const ParameterSet& p, const TimeGrid& grid,
                                                  const DengueModel::State& initial, bool nonnegative_controls = true)
{
    if (!grid.matches(p.t_final)) {
        throw ConfigError("grid ends at t=" + std::to_string(grid.t_final()) + " but t_final=" +
                          std::to_string(p.t_final));
    }
    if (initial[DengueModel::kCost] != 0.0) {
        throw ConfigError("initial accumulated cost x5 must be 0");
    }
    return EulerTranscription<DengueModel>(DengueModel(p, nonnegative_controls), grid, initial);
}

/// Free-function spelling of EulerTranscription::constraints.
template <OptimalControlModel M>
Eigen::VectorXd evaluate_defects(const EulerTranscription<M>& nlp, const Eigen::VectorXd& z)
{
    return nlp.constraints(z);
}

template <OptimalControlModel M>
SparseTriplets constraint_jacobian(const EulerTranscription<M>& nlp, const Eigen::VectorXd& z)
{
    return nlp.constraint_jacobian(z);
}

template <OptimalControlModel M>
Trajectory<M> extract_trajectory(const EulerTranscription<M>& nlp, const Eigen::VectorXd& z, double tol_feas = 1e-8)
{
    return nlp.extract(z, tol_feas);
}

} // namespace epi

#endif // EPI_TRANSCRIPTION_HPP
