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
#ifndef EPI_TRAJECTORY_IO_HPP
#define EPI_TRAJECTORY_IO_HPP

#include "epi/dengue_model.hpp"
#include "epi/errors.hpp"
#include "epi/integrator.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace epi
{

/// %.17g, which round-trips any double.
inline std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Header `t,x1,...,u1,...`.
template <OdeModel M>
std::string trajectory_csv_header()
{
    std::string out = "t";
    for (std::size_t k = 0; k < M::kStates; ++k) {
        out += ",x" + std::to_string(k + 1);
    }
    for (std::size_t j = 0; j < M::kControls; ++j) {
        out += ",u" + std::to_string(j + 1);
    }
    return out;
}

/**
 * One row per grid node. Controls repeat the interval value; the final row
 * repeats the last control. Writes only the nodes present, so a partial
 * (diverged) trajectory yields a shorter file.
 */
template <OdeModel M>
void write_trajectory_csv(std::ostream& os, const Trajectory<M>& traj)
{
    os << trajectory_csv_header<M>() << '\n';
    const auto& vals = traj.controls.values;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        os << format_g17(traj.grid.time(i));
        for (double x : traj.states[i]) {
            os << ',' << format_g17(x);
        }
        const auto& u = vals.empty() ? ControlOf<M>{} : vals[std::min(i, vals.size() - 1)];
        for (double v : u) {
            os << ',' << format_g17(v);
        }
        os << '\n';
    }
}

/// Inverse of write_trajectory_csv for a complete trajectory.
template <OdeModel M>
Trajectory<M> read_trajectory_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != trajectory_csv_header<M>()) {
        throw DomainError("trajectory CSV header mismatch");
    }
    std::vector<double> times;
    Trajectory<M> traj;
    std::vector<ControlOf<M>> row_controls;
    constexpr std::size_t n_cols = 1 + M::kStates + M::kControls;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end      = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) {
                throw DomainError("unparsable CSV cell '" + cell + "'");
            }
            row.push_back(v);
        }
        if (row.size() != n_cols) {
            throw DomainError("trajectory CSV row has " + std::to_string(row.size()) + " columns");
        }
        times.push_back(row[0]);
        StateOf<M> s;
        ControlOf<M> u;
        for (std::size_t k = 0; k < M::kStates; ++k) {
            s[k] = row[1 + k];
        }
        for (std::size_t j = 0; j < M::kControls; ++j) {
            u[j] = row[1 + M::kStates + j];
        }
        traj.states.push_back(s);
        row_controls.push_back(u);
    }
    if (times.size() < 2) {
        throw DomainError("trajectory CSV needs at least two rows");
    }
    const std::size_t n = times.size() - 1;
    traj.grid           = {times.front(), (times.back() - times.front()) / static_cast<double>(n), n};
    row_controls.pop_back();
    traj.controls = {traj.grid, std::move(row_controls)};
    traj.total_cost = detail::final_cost<M>(traj.states.back());
    return traj;
}

} // namespace epi

#endif // EPI_TRAJECTORY_IO_HPP
