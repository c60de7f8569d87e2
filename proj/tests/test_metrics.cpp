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
#include "epi/metrics.hpp"
#include "epi/models/test_models.hpp"

#include <gtest/gtest.h>

#include <cmath>

using epi::ControlSchedule;
using epi::DengueModel;
using epi::TimeGrid;
using epi::Trajectory;

namespace
{
Trajectory<epi::models::LinearDecay> scalar_trajectory(std::vector<double> xs, double h)
{
    Trajectory<epi::models::LinearDecay> t;
    t.grid = TimeGrid{0.0, h, xs.size() - 1};
    for (double x : xs) {
        t.states.push_back({x});
    }
    t.controls = ControlSchedule<1>::constant(t.grid, {0.0});
    return t;
}
} // namespace

TEST(Metrics, CrossingIsLinearlyInterpolated)
{
    const auto t = scalar_trajectory({1.0, 0.8, 0.4, 0.0}, 0.5);
    EXPECT_DOUBLE_EQ(*epi::first_crossing_below(t, 0, 0.6), 0.75);
    EXPECT_DOUBLE_EQ(*epi::first_crossing_below(t, 0, 2.0), 0.0);
    EXPECT_FALSE(epi::first_crossing_below(t, 0, -1.0).has_value());
}

TEST(Metrics, DecreaseOnset)
{
    EXPECT_DOUBLE_EQ(*epi::decrease_onset(scalar_trajectory({0.0, 1.0, 3.0, 2.0, 2.0, 1.0}, 1.0), 0), 2.0);
    EXPECT_DOUBLE_EQ(*epi::decrease_onset(scalar_trajectory({3.0, 2.0, 1.0}, 1.0), 0), 0.0);
    EXPECT_FALSE(epi::decrease_onset(scalar_trajectory({3.0, 2.0, 2.5}, 1.0), 0).has_value());
}

TEST(Metrics, ControlShare)
{
    const auto g = TimeGrid::uniform(4.0, 1.0);
    ControlSchedule<2> s{g, {{{2.0, 0.0}}, {{1.0, 0.0}}, {{1.0, 0.0}}, {{0.0, 0.0}}}};
    EXPECT_DOUBLE_EQ(epi::control_fraction_before(s, 0, 1.0), 0.5);
    EXPECT_DOUBLE_EQ(epi::control_fraction_before(s, 0, 2.0), 0.75);
    EXPECT_TRUE(std::isnan(epi::control_fraction_before(s, 1, 2.0)));
}

TEST(Metrics, Peak)
{
    const auto [v, t] = epi::state_peak(scalar_trajectory({0.1, 0.5, 0.3}, 0.25), 0);
    EXPECT_DOUBLE_EQ(v, 0.5);
    EXPECT_DOUBLE_EQ(t, 0.25);
}

TEST(Metrics, UncontrolledSummary)
{
    const epi::ParameterSet p;
    const auto g    = TimeGrid::uniform(p.t_final, 0.25);
    const auto traj = epi::euler_simulate(DengueModel::default_initial_state(), ControlSchedule<2>::constant(g, {0, 0}), p);
    const auto j    = epi::simulation_summary(traj, p);
    EXPECT_EQ(j["total_cost"].get<double>(), traj.states.back()[4]);
    EXPECT_EQ(j["final_state"]["x5"].get<double>(), traj.total_cost);
    EXPECT_EQ(j["n_nodes"].get<std::size_t>(), 209u);
    EXPECT_EQ(j["peak_x3"].get<double>(), epi::state_peak(traj, 2).first);
    EXPECT_EQ(j["peak_x3_week"].get<double>(), epi::state_peak(traj, 2).second);
    EXPECT_TRUE(j["model_intent_violations"].empty());

    const auto m = epi::to_json(epi::dengue_milestones(traj));
    EXPECT_TRUE(m["x1_below_1pct_week"].is_null());
    EXPECT_TRUE(m["u1_share_weeks_0_8"].is_null());
    EXPECT_EQ(m["total_cost"].get<double>(), traj.total_cost);
}

TEST(Metrics, SummaryReportsModelIntentViolations)
{
    epi::ParameterSet p;
    p.t_final       = 1.0;
    const auto g    = TimeGrid::uniform(1.0, 0.25);
    // heavy insecticide drives x2 negative
    const auto traj = epi::euler_simulate(DengueModel::default_initial_state(), ControlSchedule<2>::constant(g, {1.0, 0.0}), p);
    const auto j    = epi::simulation_summary(traj, p);
    ASSERT_TRUE(j["model_intent_violations"].contains("x2 < 0"));
    EXPECT_GT(j["model_intent_violations"]["x2 < 0"]["count"].get<int>(), 0);
}
