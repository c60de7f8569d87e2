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
#ifndef EPI_BOX_LBFGS_HPP
#define EPI_BOX_LBFGS_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>

namespace epi
{

/// Clamp x into [lower, upper] componentwise.
inline Eigen::VectorXd project_onto_box(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                                        const Eigen::VectorXd& upper)
{
    return x.cwiseMax(lower).cwiseMin(upper);
}

/**
 * Projected gradient of a box-constrained problem: components pushing out of
 * an active bound are zeroed, fixed variables (lower == upper) contribute nothing.
 */
inline Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper)
{
    Eigen::VectorXd pg = g;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (lower[i] == upper[i]) {
            pg[i] = 0.0;
        }
        else if (x[i] <= lower[i]) {
            pg[i] = std::min(g[i], 0.0);
        }
        else if (x[i] >= upper[i]) {
            pg[i] = std::max(g[i], 0.0);
        }
    }
    return pg;
}

struct BoxLbfgsOptions {
    double tol_pg              = 1e-8; ///< stop when ||projected gradient||_inf <= tol_pg
    std::size_t max_iterations = 500;
    std::size_t memory         = 10;
    double armijo              = 1e-4; ///< sufficient-decrease parameter
    std::size_t max_backtracks = 60;
};

enum class BoxLbfgsStatus { converged, iteration_cap, line_search_failure, divergence };

struct BoxLbfgsResult {
    Eigen::VectorXd x;
    Eigen::VectorXd gradient;
    double value           = std::numeric_limits<double>::quiet_NaN();
    double pg_norm         = std::numeric_limits<double>::infinity();
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    double max_ascent       = 0.0; ///< largest increase of f over an accepted step (floating noise only)
    BoxLbfgsStatus status  = BoxLbfgsStatus::iteration_cap;
};

/**
 * Limited-memory quasi-Newton minimization over a box.
 *
 * Each iteration identifies the variables held at a bound by the gradient,
 * applies the two-loop recursion to the remaining (free) components, and
 * backtracks along the projected path P(x + a d) until the Armijo condition
 * holds. Non-finite function values are treated as failed trial points.
 *
 * `fg(x, g)` returns f(x) and writes the gradient into g.
 */
template <class ValueAndGradient>
BoxLbfgsResult minimize_box_lbfgs(ValueAndGradient&& fg, const Eigen::VectorXd& x0, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper, const BoxLbfgsOptions& opts)
{
    const Eigen::Index n = x0.size();
    BoxLbfgsResult res;
    res.x        = project_onto_box(x0, lower, upper);
    res.gradient = Eigen::VectorXd::Zero(n);
    res.value    = fg(res.x, res.gradient);
    ++res.evaluations;
    if (!std::isfinite(res.value) || !res.gradient.allFinite()) {
        res.status = BoxLbfgsStatus::divergence;
        return res;
    }

    struct Pair {
        Eigen::VectorXd s, y;
        double rho;
    };
    std::deque<Pair> mem;
    std::vector<double> alpha_buf;
    Eigen::VectorXd g_new(n), x_trial(n), free_mask(n);
    std::size_t failed_searches = 0;

    for (;;) {
        res.pg_norm = projected_gradient(res.x, res.gradient, lower, upper).lpNorm<Eigen::Infinity>();
        if (res.pg_norm <= opts.tol_pg) {
            res.status = BoxLbfgsStatus::converged;
            return res;
        }
        if (res.iterations >= opts.max_iterations) {
            res.status = BoxLbfgsStatus::iteration_cap;
            return res;
        }

        for (Eigen::Index i = 0; i < n; ++i) {
            const bool held = lower[i] == upper[i] || (res.x[i] <= lower[i] && res.gradient[i] > 0.0) ||
                              (res.x[i] >= upper[i] && res.gradient[i] < 0.0);
            free_mask[i] = held ? 0.0 : 1.0;
        }

        // Two-loop recursion on the free components.
        Eigen::VectorXd q = res.gradient.cwiseProduct(free_mask);
        alpha_buf.assign(mem.size(), 0.0);
        for (std::size_t m = mem.size(); m-- > 0;) {
            alpha_buf[m] = mem[m].rho * mem[m].s.cwiseProduct(free_mask).dot(q);
            q -= alpha_buf[m] * mem[m].y.cwiseProduct(free_mask);
        }
        if (!mem.empty()) {
            const auto& last = mem.back();
            q *= last.s.dot(last.y) / last.y.squaredNorm();
        }
        else {
            q /= std::max(1.0, q.lpNorm<Eigen::Infinity>());
        }
        for (std::size_t m = 0; m < mem.size(); ++m) {
            const double beta = mem[m].rho * mem[m].y.cwiseProduct(free_mask).dot(q);
            q += (alpha_buf[m] - beta) * mem[m].s.cwiseProduct(free_mask);
        }
        Eigen::VectorXd d = -q.cwiseProduct(free_mask);
        if (!(res.gradient.dot(d) < 0.0)) {
            mem.clear();
            d = -res.gradient.cwiseProduct(free_mask);
            d /= std::max(1.0, d.lpNorm<Eigen::Infinity>());
        }

        // Backtracking on the projected path.
        double step      = 1.0;
        bool accepted    = false;
        double f_trial   = 0.0;
        const double tol = 16.0 * std::numeric_limits<double>::epsilon() * std::abs(res.value);
        for (std::size_t bt = 0; bt <= opts.max_backtracks; ++bt) {
            x_trial = project_onto_box(res.x + step * d, lower, upper);
            f_trial = fg(x_trial, g_new);
            ++res.evaluations;
            const double decrease = res.gradient.dot(x_trial - res.x);
            if (std::isfinite(f_trial) && g_new.allFinite() &&
                f_trial <= res.value + opts.armijo * decrease + tol && decrease < 0.0) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        ++res.iterations;
        if (!accepted) {
            if (mem.empty() || ++failed_searches >= 2) {
                res.status = BoxLbfgsStatus::line_search_failure;
                return res;
            }
            mem.clear();
            continue;
        }
        failed_searches = 0;

        Eigen::VectorXd s = x_trial - res.x;
        Eigen::VectorXd y = g_new - res.gradient;
        const double sy   = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
            if (mem.size() == opts.memory) {
                mem.pop_front();
            }
            mem.push_back({std::move(s), std::move(y), 1.0 / sy});
        }
        res.max_ascent = std::max(res.max_ascent, f_trial - res.value);
        res.x          = x_trial;
        res.gradient   = g_new;
        res.value      = f_trial;
    }
}

} // namespace epi

#endif // EPI_BOX_LBFGS_HPP
