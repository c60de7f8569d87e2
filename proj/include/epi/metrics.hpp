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
#ifndef EPI_METRICS_HPP
#define EPI_METRICS_HPP

#include "epi/dengue_model.hpp"
#include "epi/integrator.hpp"
#include "epi/json_io.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <utility>

namespace epi
{

/**
 * First time state k drops below `threshold`, linearly interpolated between
 * grid nodes. Returns t0 when the state starts below the threshold and
 * nullopt when it never gets there.
 */
template <OdeModel M>
std::optional<double> first_crossing_below(const Trajectory<M>& traj, std::size_t k, double threshold)
{
    const auto& xs = traj.states;
    if (xs.empty()) {
        return std::nullopt;
    }
    if (xs[0][k] < threshold) {
        return traj.grid.time(0);
    }
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double a = xs[i][k];
        const double b = xs[i + 1][k];
        if (b < threshold) {
            const double frac = (a - threshold) / (a - b);
            return traj.grid.time(i) + frac * traj.grid.h;
        }
    }
    return std::nullopt;
}

/// Earliest node time from which state k never increases again; nullopt if it rises on the last step.
template <OdeModel M>
std::optional<double> decrease_onset(const Trajectory<M>& traj, std::size_t k)
{
    const auto& xs = traj.states;
    if (xs.size() < 2) {
        return std::nullopt;
    }
    std::size_t m = xs.size() - 1;
    while (m > 0 && xs[m][k] <= xs[m - 1][k]) {
        --m;
    }
    if (m == xs.size() - 1) {
        return std::nullopt;
    }
    return traj.grid.time(m);
}

/// Share of the integral of control j accumulated on intervals ending at or before `t_cut`.
template <std::size_t C>
double control_fraction_before(const ControlSchedule<C>& s, std::size_t j, double t_cut)
{
    double early = 0.0, total = 0.0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const double mass = s.grid.h * s.values[i][j];
        total += mass;
        if (s.grid.time(i + 1) <= t_cut + 1e-12) {
            early += mass;
        }
    }
    return total > 0.0 ? early / total : std::numeric_limits<double>::quiet_NaN();
}

/// (peak value, time of peak) of state k over the grid nodes.
template <OdeModel M>
std::pair<double, double> state_peak(const Trajectory<M>& traj, std::size_t k)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < traj.states.size(); ++i) {
        if (traj.states[i][k] > traj.states[best][k]) {
            best = i;
        }
    }
    return {traj.states[best][k], traj.grid.time(best)};
}

/// Epidemic milestones reported for a Dengue trajectory.
struct DengueMilestones {
    double total_cost = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> carriers_below_1pct_week;
    std::optional<double> mosquitoes_below_1pct_week;
    std::optional<double> infected_decrease_week;
    double insecticide_share_first_8_weeks = std::numeric_limits<double>::quiet_NaN();
};

inline DengueMilestones dengue_milestones(const Trajectory<DengueModel>& traj)
{
    DengueMilestones m;
    const auto& x0 = traj.states.front();
    m.total_cost   = traj.total_cost;
    m.carriers_below_1pct_week   = first_crossing_below(traj, DengueModel::kCarriers, 0.01 * x0[DengueModel::kCarriers]);
    m.mosquitoes_below_1pct_week =
        first_crossing_below(traj, DengueModel::kMosquitoes, 0.01 * x0[DengueModel::kMosquitoes]);
    m.infected_decrease_week = decrease_onset(traj, DengueModel::kInfected);
    m.insecticide_share_first_8_weeks = control_fraction_before(traj.controls, DengueModel::kInsecticide, 8.0);
    return m;
}

inline json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

inline json to_json(const DengueMilestones& m)
{
    return {{"total_cost", number_or_null(m.total_cost)},
            {"x2_below_1pct_week", optional_json(m.carriers_below_1pct_week)},
            {"x1_below_1pct_week", optional_json(m.mosquitoes_below_1pct_week)},
            {"x3_decrease_week", optional_json(m.infected_decrease_week)},
            {"u1_share_weeks_0_8", number_or_null(m.insecticide_share_first_8_weeks)}};
}

/// Final state, total cost and x3 peak of a simulated trajectory, plus model-intent diagnostics.
inline json simulation_summary(const Trajectory<DengueModel>& traj, const ParameterSet& p)
{
    json final_state = json::object();
    const auto& xf   = traj.states.back();
    for (std::size_t k = 0; k < DengueModel::kStates; ++k) {
        final_state[std::string(DengueModel::state_names[k])] = xf[k];
    }
    const auto [peak, peak_week] = state_peak(traj, DengueModel::kInfected);
    // violation -> {count, first_t}
    json diagnostics = json::object();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        for (const auto& v : model_intent_violations(traj.states[i], p)) {
            if (!diagnostics.contains(v)) {
                diagnostics[v] = {{"count", 0}, {"first_t", traj.grid.time(i)}};
            }
            diagnostics[v]["count"] = diagnostics[v]["count"].get<std::size_t>() + 1;
        }
    }
    json notes = traj.diagnostics;
    return {{"final_state", final_state},
            {"total_cost", number_or_null(traj.total_cost)},
            {"peak_x3", peak},
            {"peak_x3_week", peak_week},
            {"n_nodes", traj.states.size()},
            {"model_intent_violations", std::move(diagnostics)},
            {"notes", std::move(notes)}};
}

} // namespace epi

#endif // EPI_METRICS_HPP
