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
#ifndef EPI_JSON_IO_HPP
#define EPI_JSON_IO_HPP

#include "epi/dengue_model.hpp"
#include "epi/errors.hpp"
#include "epi/solver.hpp"
#include "epi/trajectory_io.hpp"
#include "epi/transcription.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace epi
{

using json = nlohmann::ordered_json;

/// Non-finite numbers become null; JSON has no infinity.
inline json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

inline json to_json(const ParameterSet& p)
{
    json j = json::object();
    for (const auto& f : parameter_fields) {
        j[std::string(f.name)] = p.*f.member;
    }
    return j;
}

/**
 * Reads a flat parameter object on top of `base`. Unknown keys and
 * non-numeric values are rejected; the result is validated.
 */
inline ParameterSet parameters_from_json(const json& j, ParameterSet base = {})
{
    if (!j.is_object()) {
        throw ConfigError("parameter set must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        const auto* field = std::find_if(parameter_fields.begin(), parameter_fields.end(),
                                         [&](const ParameterField& f) { return f.name == key; });
        if (field == parameter_fields.end()) {
            throw ConfigError("unknown parameter '" + key + "'");
        }
        if (!value.is_number()) {
            throw ConfigError("parameter '" + key + "' must be a number");
        }
        base.*(field->member) = value.get<double>();
    }
    base.validate();
    return base;
}

inline json to_json(const TimeGrid& g)
{
    return {{"t0", g.t0}, {"h", g.h}, {"n_steps", g.n_steps}};
}

inline json to_json(const TranscriptionReport& r)
{
    const PresolvedDimensions ref;
    auto diff = [](std::size_t a, std::size_t b) { return a > b ? a - b : b - a; };
    return {
        {"n_vars", r.n_vars},
        {"n_eq", r.n_eq},
        {"n_nonlinear_vars", r.n_nonlinear_vars},
        {"n_nonlinear_eq", r.n_nonlinear_eq},
        {"n_fixed_vars", r.n_fixed_vars},
        {"n_bounded_vars", r.n_bounded_vars},
        {"jacobian_nnz", r.jacobian_nnz},
        {"grid", to_json(r.grid)},
        {"reference_post_presolve",
         {{"n_vars", ref.n_vars},
          {"n_nonlinear_vars", ref.n_nonlinear_vars},
          {"n_eq", ref.n_eq},
          {"n_nonlinear_eq", ref.n_nonlinear_eq},
          {"n_vars_difference", diff(r.n_vars, ref.n_vars)},
          {"n_eq_difference", diff(r.n_eq, ref.n_eq)}}},
    };
}

inline json to_json(const IterationRecord& r)
{
    return {{"outer", r.outer},
            {"inner", r.inner},
            {"merit", number_or_null(r.merit)},
            {"feas", number_or_null(r.feas)},
            {"kkt", number_or_null(r.kkt)},
            {"penalty", number_or_null(r.penalty)}};
}

/// `include_timing = false` drops wall time so that repeated runs serialize identically.
inline json to_json(const SolveReport& r, bool include_timing = true)
{
    json j = {
        {"status", to_string(r.status)},
        {"objective", number_or_null(r.objective)},
        {"kkt_residual", number_or_null(r.kkt_residual)},
        {"feasibility_residual", number_or_null(r.feasibility_residual)},
        {"complementarity", number_or_null(r.complementarity)},
        {"outer_iterations", r.outer_iterations},
        {"inner_iterations", r.inner_iterations},
        {"evaluations", r.evaluations},
    };
    if (include_timing) {
        j["wall_time_seconds"] = r.wall_time_seconds;
    }
    j["warnings"] = r.warnings;
    json hist     = json::array();
    for (const auto& h : r.history) {
        hist.push_back(to_json(h));
    }
    j["history"] = std::move(hist);
    return j;
}

/// `outer,inner,merit,feas,kkt,penalty`
inline void write_history_csv(std::ostream& os, const SolveReport& r)
{
    os << "outer,inner,merit,feas,kkt,penalty\n";
    for (const auto& h : r.history) {
        os << h.outer << ',' << h.inner << ',' << format_g17(h.merit) << ',' << format_g17(h.feas) << ','
           << format_g17(h.kkt) << ',' << format_g17(h.penalty) << '\n';
    }
}

inline json to_json(const SolverConfig& c)
{
    return {{"tol_kkt", c.tol_kkt},
            {"tol_feas", c.tol_feas},
            {"max_outer", c.max_outer},
            {"max_inner", c.max_inner},
            {"penalty_init", c.penalty_init},
            {"penalty_growth", c.penalty_growth},
            {"lbfgs_memory", c.lbfgs_memory},
            {"seed", c.seed}};
}

inline SolverConfig solver_config_from_json(const json& j, SolverConfig base = {})
{
    if (!j.is_object()) {
        throw ConfigError("solver config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        auto as_double = [&] {
            if (!value.is_number()) {
                throw ConfigError("solver field '" + key + "' must be a number");
            }
            return value.get<double>();
        };
        auto as_count = [&] {
            if (!value.is_number_integer() || value.get<long long>() < 0) {
                throw ConfigError("solver field '" + key + "' must be a nonnegative integer");
            }
            return value.get<std::size_t>();
        };
        if (key == "tol_kkt") {
            base.tol_kkt = as_double();
        }
        else if (key == "tol_feas") {
            base.tol_feas = as_double();
        }
        else if (key == "max_outer") {
            base.max_outer = as_count();
        }
        else if (key == "max_inner") {
            base.max_inner = as_count();
        }
        else if (key == "penalty_init") {
            base.penalty_init = as_double();
        }
        else if (key == "penalty_growth") {
            base.penalty_growth = as_double();
        }
        else if (key == "lbfgs_memory") {
            base.lbfgs_memory = as_count();
        }
        else if (key == "seed") {
            base.seed = as_count();
        }
        else {
            throw ConfigError("unknown solver field '" + key + "'");
        }
    }
    base.validate();
    return base;
}

/**
 * Dimensions, bounds and index map of a transcription plus the defect
 * residuals at `z`, for cross-checking against external modeling tools.
 * Infinite bounds are written as null.
 */
template <OptimalControlModel M>
json nlp_dump(const EulerTranscription<M>& nlp, const Eigen::VectorXd& z)
{
    json vars = json::array();
    for (std::size_t v = 0; v < nlp.n_vars(); ++v) {
        const auto ref = nlp.variable(v);
        vars.push_back({{"index", v},
                        {"kind", ref.kind == VariableRef::Kind::state ? "state" : "control"},
                        {"node", ref.node},
                        {"component", ref.component},
                        {"lower", number_or_null(nlp.lower_bounds()[static_cast<Eigen::Index>(v)])},
                        {"upper", number_or_null(nlp.upper_bounds()[static_cast<Eigen::Index>(v)])},
                        {"value", number_or_null(z[static_cast<Eigen::Index>(v)])}});
    }
    const Eigen::VectorXd c = nlp.constraints(z);
    return {{"n_vars", nlp.n_vars()},
            {"n_eq", nlp.n_eq()},
            {"objective_index", nlp.objective_index()},
            {"grid", to_json(nlp.grid())},
            {"variables", std::move(vars)},
            {"residuals", std::vector<double>(c.data(), c.data() + c.size())}};
}

} // namespace epi

#endif // EPI_JSON_IO_HPP
