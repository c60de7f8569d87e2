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
#include "epi/box_lbfgs.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using epi::BoxLbfgsOptions;
using epi::BoxLbfgsStatus;

namespace
{
const double inf = std::numeric_limits<double>::infinity();

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g)
{
    g.setZero(x.size());
    double f = 0.0;
    for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
        const double a = x[i + 1] - x[i] * x[i];
        const double b = 1.0 - x[i];
        f += 100.0 * a * a + b * b;
        g[i] += -400.0 * x[i] * a - 2.0 * b;
        g[i + 1] += 200.0 * a;
    }
    return f;
}
} // namespace

TEST(BoxLbfgs, UnconstrainedRosenbrock)
{
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(10, -1.2);
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(10, -inf);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(10, inf);
    BoxLbfgsOptions opts;
    opts.max_iterations = 2000;
    const auto r = epi::minimize_box_lbfgs(rosenbrock, x0, lo, hi, opts);
    EXPECT_EQ(r.status, BoxLbfgsStatus::converged);
    EXPECT_LE((r.x - Eigen::VectorXd::Ones(10)).lpNorm<Eigen::Infinity>(), 1e-6);
    EXPECT_LE(r.max_ascent, 1e-12);
}

TEST(BoxLbfgs, ActiveBoundsOnAQuadratic)
{
    // min sum (x_i - t_i)^2 with t outside the box on some coordinates
    const Eigen::Vector4d t(-1.0, 0.5, 3.0, 0.2);
    auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = 2.0 * (x - t);
        return (x - t).squaredNorm();
    };
    const Eigen::VectorXd lo = Eigen::Vector4d(0.0, 0.0, 0.0, 0.2);
    const Eigen::VectorXd hi = Eigen::Vector4d(1.0, 1.0, 2.0, 0.2);
    const auto r = epi::minimize_box_lbfgs(fg, Eigen::VectorXd(Eigen::Vector4d(0.5, 0.5, 0.5, 0.2)), lo, hi, {});
    EXPECT_EQ(r.status, BoxLbfgsStatus::converged);
    EXPECT_NEAR(r.x[0], 0.0, 1e-12);
    EXPECT_NEAR(r.x[1], 0.5, 1e-8);
    EXPECT_NEAR(r.x[2], 2.0, 1e-12);
    EXPECT_EQ(r.x[3], 0.2);
}

TEST(BoxLbfgs, ProjectedGradientSemantics)
{
    const Eigen::Vector3d x(0.0, 0.5, 1.0);
    const Eigen::Vector3d g(1.0, 1.0, -1.0);
    const Eigen::Vector3d lo(0.0, 0.0, 0.0);
    const Eigen::Vector3d hi(1.0, 1.0, 1.0);
    const auto pg = epi::projected_gradient(x, g, lo, hi);
    EXPECT_EQ(pg[0], 0.0);
    EXPECT_EQ(pg[1], 1.0);
    EXPECT_EQ(pg[2], 0.0);
    const auto fixed = epi::projected_gradient(Eigen::VectorXd(Eigen::Vector3d(0.5, 0.5, 0.5)), Eigen::VectorXd(g),
                                               Eigen::VectorXd(Eigen::Vector3d(0.5, 0.0, 0.0)),
                                               Eigen::VectorXd(Eigen::Vector3d(0.5, 1.0, 1.0)));
    EXPECT_EQ(fixed[0], 0.0);
    const auto p = epi::project_onto_box(Eigen::VectorXd(Eigen::Vector3d(-1.0, 0.3, 7.0)), Eigen::VectorXd(lo),
                                         Eigen::VectorXd(hi));
    EXPECT_EQ(p, Eigen::VectorXd(Eigen::Vector3d(0.0, 0.3, 1.0)));
}

TEST(BoxLbfgs, IterationCapReturnsBestIterate)
{
    const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(10, -1.2);
    const Eigen::VectorXd lo = Eigen::VectorXd::Constant(10, -inf);
    const Eigen::VectorXd hi = Eigen::VectorXd::Constant(10, inf);
    BoxLbfgsOptions opts;
    opts.max_iterations = 5;
    Eigen::VectorXd g;
    const double f0 = rosenbrock(x0, g);
    const auto r    = epi::minimize_box_lbfgs(rosenbrock, x0, lo, hi, opts);
    EXPECT_EQ(r.status, BoxLbfgsStatus::iteration_cap);
    EXPECT_EQ(r.iterations, 5u);
    EXPECT_LT(r.value, f0);
}

TEST(BoxLbfgs, NonFiniteStartIsDivergence)
{
    auto fg = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g = x;
        return std::log(-1.0);
    };
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(2);
    const auto r            = epi::minimize_box_lbfgs(fg, z, Eigen::VectorXd::Constant(2, -inf),
                                                      Eigen::VectorXd::Constant(2, inf), {});
    EXPECT_EQ(r.status, BoxLbfgsStatus::divergence);
}

TEST(BoxLbfgs, NonFiniteTrialPointsAreRejected)
{
    // f = x - log(x): minimum at x = 1, undefined for x <= 0
    auto fg = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
        g.resize(1);
        g[0] = 1.0 - 1.0 / x[0];
        return x[0] > 0.0 ? x[0] - std::log(x[0]) : std::numeric_limits<double>::quiet_NaN();
    };
    const auto r = epi::minimize_box_lbfgs(fg, Eigen::VectorXd::Constant(1, 0.05), Eigen::VectorXd::Constant(1, -inf),
                                           Eigen::VectorXd::Constant(1, inf), {});
    EXPECT_EQ(r.status, BoxLbfgsStatus::converged);
    EXPECT_NEAR(r.x[0], 1.0, 1e-7);
}
