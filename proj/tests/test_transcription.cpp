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
#include "epi/models/test_models.hpp"
#include "epi/transcription.hpp"
#include "epi/verification/finite_difference.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <string>

using epi::ControlSchedule;
using epi::DengueModel;
using epi::EulerTranscription;
using epi::ParameterSet;
using epi::TimeGrid;

namespace
{
const DengueModel::State x0 = DengueModel::default_initial_state();

EulerTranscription<DengueModel> default_nlp()
{
    const ParameterSet p;
    return epi::transcribe(p, TimeGrid::uniform(p.t_final, 0.25), x0);
}

ControlSchedule<2> random_controls(const TimeGrid& g, std::uint64_t seed, double hi)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, hi);
    auto s = ControlSchedule<2>::constant(g, {0.0, 0.0});
    for (auto& u : s.values) {
        u = {dist(rng), dist(rng)};
    }
    return s;
}

Eigen::VectorXd random_point(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (auto& v : z) {
        v = unit(rng);
    }
    return z;
}
} // namespace

TEST(Transcription, Dimensions)
{
    const auto nlp = default_nlp();
    EXPECT_EQ(nlp.n_vars(), 1461u);
    EXPECT_EQ(nlp.n_eq(), 1040u);
    ParameterSet p;
    p.t_final      = 0.25;
    const auto one = epi::transcribe(p, TimeGrid::uniform(0.25, 0.25), x0);
    EXPECT_EQ(one.n_vars(), 12u);
    EXPECT_EQ(one.n_eq(), 5u);
}

TEST(Transcription, ReportCounts)
{
    const auto r = default_nlp().report();
    EXPECT_EQ(r.n_vars, 1461u);
    EXPECT_EQ(r.n_eq, 1040u);
    EXPECT_EQ(r.n_fixed_vars, 5u);
    EXPECT_EQ(r.n_bounded_vars, 2u * 208u);
    EXPECT_EQ(r.n_nonlinear_vars, 6u * 208u);
    EXPECT_EQ(r.n_nonlinear_eq, 4u * 208u);
    const epi::PresolvedDimensions published;
    EXPECT_LE(r.n_vars - published.n_vars, 6u);
    EXPECT_LE(r.n_eq - published.n_eq, 6u);
}

TEST(Transcription, IndexMapIsABijection)
{
    const auto nlp = default_nlp();
    std::set<std::size_t> seen;
    for (std::size_t i = 0; i <= 208; ++i) {
        for (std::size_t k = 0; k < 5; ++k) {
            const auto idx = nlp.state_index(i, k);
            const auto ref = nlp.variable(idx);
            EXPECT_EQ(ref.kind, epi::VariableRef::Kind::state);
            EXPECT_EQ(ref.node, i);
            EXPECT_EQ(ref.component, k);
            seen.insert(idx);
        }
        for (std::size_t j = 0; i < 208 && j < 2; ++j) {
            const auto idx = nlp.control_index(i, j);
            const auto ref = nlp.variable(idx);
            EXPECT_EQ(ref.kind, epi::VariableRef::Kind::control);
            EXPECT_EQ(ref.node, i);
            EXPECT_EQ(ref.component, j);
            seen.insert(idx);
        }
    }
    EXPECT_EQ(seen.size(), nlp.n_vars());
    EXPECT_EQ(*seen.rbegin(), nlp.n_vars() - 1);
    EXPECT_EQ(nlp.objective_index(), nlp.state_index(208, 4));
}

TEST(Transcription, BoundsFixInitialStateAndControlSign)
{
    const auto nlp = default_nlp();
    for (std::size_t k = 0; k < 5; ++k) {
        EXPECT_EQ(nlp.lower_bounds()[nlp.state_index(0, k)], x0[k]);
        EXPECT_EQ(nlp.upper_bounds()[nlp.state_index(0, k)], x0[k]);
        EXPECT_TRUE(std::isinf(nlp.lower_bounds()[nlp.state_index(3, k)]));
    }
    EXPECT_EQ(nlp.lower_bounds()[nlp.control_index(7, 1)], 0.0);
    EXPECT_TRUE(std::isinf(nlp.upper_bounds()[nlp.control_index(7, 1)]));
    const ParameterSet p;
    const auto free = epi::transcribe(p, TimeGrid::uniform(p.t_final, 0.25), x0, false);
    EXPECT_TRUE(std::isinf(free.lower_bounds()[free.control_index(7, 1)]));
}

TEST(Transcription, PackedSimulationsHaveZeroDefects)
{
    const auto nlp = default_nlp();
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto traj = epi::euler_simulate(x0, random_controls(nlp.grid(), seed, 0.05), ParameterSet{});
        EXPECT_LE(epi::evaluate_defects(nlp, nlp.pack(traj)).lpNorm<Eigen::Infinity>(), 1e-12);
    }
}

TEST(Transcription, DefectsMatchIndependentRecomputation)
{
    const auto nlp = default_nlp();
    const ParameterSet p;
    const auto z = random_point(nlp.n_vars(), 17);
    const auto c = nlp.constraints(z);
    for (std::size_t i = 0; i < 208; ++i) {
        DengueModel::State xi, xn;
        for (std::size_t k = 0; k < 5; ++k) {
            xi[k] = z[static_cast<Eigen::Index>(i * 7 + k)];
            xn[k] = z[static_cast<Eigen::Index>((i + 1) * 7 + k)];
        }
        const DengueModel::Control u{z[static_cast<Eigen::Index>(i * 7 + 5)], z[static_cast<Eigen::Index>(i * 7 + 6)]};
        const auto f = epi::dynamics(0.25 * static_cast<double>(i), xi, u, p);
        for (std::size_t k = 0; k < 5; ++k) {
            EXPECT_NEAR(c[static_cast<Eigen::Index>(i * 5 + k)], xn[k] - xi[k] - 0.25 * f[k], 1e-15);
        }
    }
}

TEST(Transcription, PerturbationIsLocal)
{
    const auto nlp  = default_nlp();
    const auto z    = nlp.zero_control_guess();
    const auto base = nlp.constraints(z);
    const auto pattern = nlp.jacobian_pattern();
    for (std::size_t node : {1u, 50u, 207u}) {
        for (std::size_t k = 0; k < 5; ++k) {
            const auto col = nlp.state_index(node, k);
            auto zp        = z;
            zp[static_cast<Eigen::Index>(col)] += 1e-3;
            const Eigen::VectorXd diff = nlp.constraints(zp) - base;
            std::set<std::size_t> structural;
            for (std::size_t e = 0; e < pattern.nnz(); ++e) {
                if (pattern.cols[e] == col) {
                    structural.insert(pattern.rows[e]);
                }
            }
            std::size_t changed = 0;
            for (Eigen::Index r = 0; r < diff.size(); ++r) {
                if (diff[r] != 0.0) {
                    ++changed;
                    EXPECT_TRUE(structural.count(static_cast<std::size_t>(r))) << "row " << r << " col " << col;
                }
            }
            EXPECT_GE(changed, 1u);
            EXPECT_LE(changed, 6u);
        }
    }
}

TEST(Transcription, JacobianKnownEntries)
{
    const auto nlp = default_nlp();
    const auto z   = random_point(nlp.n_vars(), 4);
    const auto jac = epi::constraint_jacobian(nlp, z);
    auto entry     = [&](std::size_t r, std::size_t c) {
        double v = 0.0;
        for (std::size_t e = 0; e < jac.nnz(); ++e) {
            if (jac.rows[e] == r && jac.cols[e] == c) {
                v += jac.values[e];
            }
        }
        return v;
    };
    for (std::size_t i : {0u, 100u, 207u}) {
        EXPECT_DOUBLE_EQ(entry(nlp.defect_index(i, 0), nlp.control_index(i, 0)), 0.25);
        EXPECT_DOUBLE_EQ(entry(nlp.defect_index(i, 1), nlp.control_index(i, 0)), 0.25);
        EXPECT_DOUBLE_EQ(entry(nlp.defect_index(i, 3), nlp.control_index(i, 1)), -0.25);
        for (std::size_t k = 0; k < 5; ++k) {
            EXPECT_DOUBLE_EQ(entry(nlp.defect_index(i, k), nlp.state_index(i + 1, k)), 1.0);
        }
    }
}

TEST(Transcription, JacobianMatchesFiniteDifferences)
{
    ParameterSet p;
    p.t_final      = 5.0;
    const auto nlp = epi::transcribe(p, TimeGrid::uniform(5.0, 0.25), x0);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto z  = random_point(nlp.n_vars(), 100 + seed);
        const auto fd = epi::verification::central_difference_defect_jacobian(nlp, z, 1e-6);
        EXPECT_LE(epi::verification::max_mixed_error(nlp.constraint_jacobian(z), fd), 1e-6);
    }
}

TEST(Transcription, PatternIsStable)
{
    const auto nlp = default_nlp();
    auto hash      = [](const epi::SparseTriplets& t) {
        std::size_t h = t.nnz();
        for (std::size_t e = 0; e < t.nnz(); ++e) {
            h = h * 1000003u ^ std::hash<std::size_t>{}(t.rows[e] * 2000u + t.cols[e]);
        }
        return h;
    };
    const auto h0 = hash(nlp.jacobian_pattern());
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto jac = nlp.constraint_jacobian(random_point(nlp.n_vars(), seed));
        ASSERT_EQ(hash(jac), h0);
    }
}

TEST(Transcription, TransposeProductMatchesTriplets)
{
    const auto nlp = default_nlp();
    const auto z   = random_point(nlp.n_vars(), 8);
    const auto v   = random_point(nlp.n_eq(), 9);
    const auto jac = nlp.constraint_jacobian(z);
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nlp.n_vars()));
    for (std::size_t e = 0; e < jac.nnz(); ++e) {
        ref[static_cast<Eigen::Index>(jac.cols[e])] += jac.values[e] * v[static_cast<Eigen::Index>(jac.rows[e])];
    }
    EXPECT_LE((nlp.jacobian_transpose_times(z, v) - ref).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(Transcription, ObjectiveReadsFinalCostOnly)
{
    const auto nlp = default_nlp();
    const auto z   = random_point(nlp.n_vars(), 2);
    EXPECT_EQ(nlp.objective(z), z[static_cast<Eigen::Index>(nlp.objective_index())]);
    const auto g = nlp.objective_gradient(z);
    EXPECT_EQ(g.cwiseAbs().sum(), 1.0);
    EXPECT_EQ(g[static_cast<Eigen::Index>(nlp.objective_index())], 1.0);
}

TEST(Transcription, PackExtractRoundTrip)
{
    const auto nlp  = default_nlp();
    const auto traj = epi::euler_simulate(x0, random_controls(nlp.grid(), 3, 0.05), ParameterSet{});
    const auto back = epi::extract_trajectory(nlp, nlp.pack(traj));
    EXPECT_EQ(back.states, traj.states);
    EXPECT_EQ(back.controls.values, traj.controls.values);
    EXPECT_TRUE(back.diagnostics.empty());

    const auto zero = nlp.extract(nlp.zero_control_guess());
    EXPECT_EQ(zero.total_cost,
              epi::euler_simulate(x0, ControlSchedule<2>::constant(nlp.grid(), {0.0, 0.0}), ParameterSet{}).total_cost);
}

TEST(Transcription, InfeasiblePointIsFlaggedNotThrown)
{
    const auto nlp = default_nlp();
    const auto t   = nlp.extract(random_point(nlp.n_vars(), 1));
    ASSERT_EQ(t.diagnostics.size(), 1u);
    EXPECT_NE(t.diagnostics[0].find("infeasible"), std::string::npos);
}

TEST(Transcription, CondensedCoordinatesRoundTrip)
{
    const auto nlp = default_nlp();
    const auto z   = random_point(nlp.n_vars(), 12);
    auto zb        = z;
    for (std::size_t k = 0; k < 5; ++k) {
        zb[static_cast<Eigen::Index>(nlp.state_index(0, k))] = x0[k];
    }
    const auto back = nlp.from_condensed(nlp.to_condensed(zb));
    EXPECT_LE((back - zb).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Transcription, CondensedGradientMatchesFiniteDifferences)
{
    ParameterSet p;
    p.t_final      = 3.0;
    const auto nlp = epi::transcribe(p, TimeGrid::uniform(3.0, 0.25), x0);
    const auto w   = random_point(nlp.n_vars(), 21);
    // phi(v) = w . from_condensed(v)
    const Eigen::VectorXd v0 = nlp.to_condensed(nlp.zero_control_guess()) + 0.01 * random_point(nlp.n_vars(), 22);
    const auto z0            = nlp.from_condensed(v0);
    const auto g             = nlp.condensed_gradient(z0, w);
    for (Eigen::Index i = 0; i < v0.size(); ++i) {
        if (nlp.lower_bounds()[i] == nlp.upper_bounds()[i]) {
            continue;
        }
        auto vp = v0, vm = v0;
        vp[i] += 1e-6;
        vm[i] -= 1e-6;
        const double fd = (w.dot(nlp.from_condensed(vp)) - w.dot(nlp.from_condensed(vm))) / 2e-6;
        EXPECT_NEAR(g[i], fd, 1e-6 * std::max(1.0, std::abs(fd))) << "slot " << i;
    }
}

TEST(Transcription, RejectsInconsistentInputs)
{
    const ParameterSet p;
    EXPECT_THROW(epi::transcribe(p, TimeGrid::uniform(26.0, 0.25), x0), epi::ConfigError);
    auto bad = x0;
    bad[4]   = 1.0;
    EXPECT_THROW(epi::transcribe(p, TimeGrid::uniform(52.0, 0.25), bad), epi::ConfigError);
}

TEST(Transcription, GenericModelTerminalFix)
{
    epi::EulerTranscription<epi::models::MinimumEnergy>::Options opts;
    opts.terminal_fixed = {{0, 0.0}};
    const epi::EulerTranscription<epi::models::MinimumEnergy> nlp({}, TimeGrid::uniform(1.0, 0.01), {1.0, 0.0}, opts);
    EXPECT_EQ(nlp.n_vars(), 2u * 101u + 100u);
    EXPECT_EQ(nlp.lower_bounds()[nlp.state_index(100, 0)], 0.0);
    EXPECT_EQ(nlp.upper_bounds()[nlp.state_index(100, 0)], 0.0);
}
