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
#include "epi/epi.hpp"

#include <cstdio>
#include <iostream>

int main()
{
    const epi::ParameterSet params;
    const auto grid    = epi::TimeGrid::uniform(params.t_final, 0.25);
    const auto initial = epi::DengueModel::default_initial_state();
    const epi::DengueModel model(params);

    const auto nlp = epi::transcribe(params, grid, initial);
    const auto rep = nlp.report();
    std::printf("variables %zu, equality constraints %zu\n", rep.n_vars, rep.n_eq);

    const auto sol       = epi::solve_nlp(nlp, nlp.zero_control_guess(), epi::SolverConfig{});
    const auto optimized = nlp.extract(sol.z);
    const auto baseline =
        epi::euler_simulate(model, initial, epi::ControlSchedule<2>::constant(grid, {0.0, 0.0}));

    std::printf("status %s after %zu outer / %zu inner iterations\n", epi::to_string(sol.report.status),
                sol.report.outer_iterations, sol.report.inner_iterations);
    std::printf("total cost: zero control %.6g, optimized %.6g\n", baseline.total_cost, optimized.total_cost);

    std::printf("%6s %10s %10s %10s %10s %10s %10s\n", "week", "x1", "x2", "x3", "x4", "u1", "u2");
    for (std::size_t i = 0; i <= grid.n_steps; i += 16) {
        const auto& x = optimized.states[i];
        const auto& u = optimized.controls.values[std::min(i, grid.n_steps - 1)];
        std::printf("%6.1f %10.5f %10.5f %10.5f %10.5f %10.5f %10.5f\n", grid.time(i), x[0], x[1], x[2], x[3], u[0],
                    u[1]);
    }
    std::cout << epi::to_json(epi::dengue_milestones(optimized)).dump(2) << "\n";
    return sol.report.status == epi::SolveStatus::converged ? 0 : 1;
}
