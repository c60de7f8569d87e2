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
#ifndef EPI_SCENARIO_HPP
#define EPI_SCENARIO_HPP

#include "epi/dengue_model.hpp"
#include "epi/errors.hpp"
#include "epi/integrator.hpp"
#include "epi/json_io.hpp"
#include "epi/solver.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>

namespace epi
{

enum class Mode { simulate, optimize, verify };

inline const char* to_string(Mode m)
{
    switch (m) {
    case Mode::simulate:
        return "simulate";
    case Mode::optimize:
        return "optimize";
    case Mode::verify:
        return "verify";
    }
    return "unknown";
}

inline Mode mode_from_string(std::string_view s)
{
    if (s == "simulate") {
        return Mode::simulate;
    }
    if (s == "optimize") {
        return Mode::optimize;
    }
    if (s == "verify") {
        return Mode::verify;
    }
    throw ConfigError("unknown mode '" + std::string(s) + "'");
}

/**
 * One run of the command-line tool. JSON layout:
 *
 *   {
 *     "mode": "optimize",
 *     "params": {"gamma_f": 0.4, ...},        // any ParameterSet fields
 *     "grid": {"h": 0.25, "t_final": 52},
 *     "initial": {"x1": 1.0, ...},            // x5 must stay 0
 *     "solver": {"tol_kkt": 1e-8, ...},
 *     "nonnegative_controls": true,
 *     "output_dir": "out"
 *   }
 *
 * Every section is optional; unknown keys are rejected.
 */
struct ScenarioConfig {
    std::optional<Mode> mode;
    ParameterSet params;
    double h                    = 0.25;
    DengueModel::State initial  = DengueModel::default_initial_state();
    SolverConfig solver;
    bool nonnegative_controls   = true;
    std::string output_dir      = ".";

    TimeGrid grid() const
    {
        return TimeGrid::uniform(params.t_final, h);
    }

    void validate() const
    {
        params.validate();
        solver.validate();
        (void)grid();
        for (std::size_t k = 0; k < initial.size(); ++k) {
            if (!std::isfinite(initial[k])) {
                throw ConfigError("initial state '" + std::string(DengueModel::state_names[k]) + "' is not finite");
            }
        }
        if (initial[DengueModel::kCost] != 0.0) {
            throw ConfigError("initial state 'x5' (accumulated cost) must be 0");
        }
    }
};

namespace detail
{
inline double parse_double(std::string_view text, std::string_view what)
{
    const std::string s(text);
    char* end      = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) {
        throw ConfigError("cannot parse '" + s + "' as a number for '" + std::string(what) + "'");
    }
    return v;
}

inline void reject_unknown(const json& j, std::initializer_list<std::string_view> known, std::string_view where)
{
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown key '" + key + "' in " + std::string(where));
        }
    }
}
} // namespace detail

inline ScenarioConfig scenario_from_json(const json& j)
{
    if (!j.is_object()) {
        throw ConfigError("scenario config must be a JSON object");
    }
    detail::reject_unknown(j, {"mode", "params", "grid", "initial", "solver", "nonnegative_controls", "output_dir"},
                           "scenario config");
    ScenarioConfig cfg;
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) {
            throw ConfigError("'mode' must be a string");
        }
        cfg.mode = mode_from_string(j["mode"].get<std::string>());
    }
    if (j.contains("params")) {
        cfg.params = parameters_from_json(j["params"]);
    }
    if (j.contains("grid")) {
        const auto& g = j["grid"];
        if (!g.is_object()) {
            throw ConfigError("'grid' must be an object");
        }
        detail::reject_unknown(g, {"h", "t_final"}, "grid");
        if (g.contains("h")) {
            if (!g["h"].is_number()) {
                throw ConfigError("'grid.h' must be a number");
            }
            cfg.h = g["h"].get<double>();
        }
        if (g.contains("t_final")) {
            if (!g["t_final"].is_number()) {
                throw ConfigError("'grid.t_final' must be a number");
            }
            const double tf = g["t_final"].get<double>();
            if (j.contains("params") && j["params"].contains("t_final") && j["params"]["t_final"] != g["t_final"]) {
                throw ConfigError("'grid.t_final' conflicts with 'params.t_final'");
            }
            cfg.params.t_final = tf;
        }
    }
    if (j.contains("initial")) {
        const auto& init = j["initial"];
        if (!init.is_object()) {
            throw ConfigError("'initial' must be an object");
        }
        detail::reject_unknown(init, {"x1", "x2", "x3", "x4", "x5"}, "initial");
        for (std::size_t k = 0; k < DengueModel::kStates; ++k) {
            const std::string name(DengueModel::state_names[k]);
            if (init.contains(name)) {
                if (!init[name].is_number()) {
                    throw ConfigError("initial state '" + name + "' must be a number");
                }
                cfg.initial[k] = init[name].get<double>();
            }
        }
    }
    if (j.contains("solver")) {
        cfg.solver = solver_config_from_json(j["solver"]);
    }
    if (j.contains("nonnegative_controls")) {
        if (!j["nonnegative_controls"].is_boolean()) {
            throw ConfigError("'nonnegative_controls' must be a boolean");
        }
        cfg.nonnegative_controls = j["nonnegative_controls"].get<bool>();
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) {
            throw ConfigError("'output_dir' must be a string");
        }
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    cfg.validate();
    return cfg;
}

inline ScenarioConfig load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

/// Applies `name=value` to a ParameterSet field and revalidates.
inline void apply_parameter_override(ScenarioConfig& cfg, std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("parameter override '" + std::string(assignment) + "' is not of the form name=value");
    }
    const auto name  = assignment.substr(0, eq);
    const auto* field = std::find_if(parameter_fields.begin(), parameter_fields.end(),
                                     [&](const ParameterField& f) { return f.name == name; });
    if (field == parameter_fields.end()) {
        throw ConfigError("unknown parameter '" + std::string(name) + "'");
    }
    cfg.params.*(field->member) = detail::parse_double(assignment.substr(eq + 1), name);
    cfg.params.validate();
}

/// EPI_SEED, when set, replaces the solver seed.
inline void apply_seed_from_environment(ScenarioConfig& cfg)
{
    if (const char* env = std::getenv("EPI_SEED"); env != nullptr && *env != '\0') {
        const std::string s(env);
        char* end          = nullptr;
        const auto parsed  = std::strtoull(s.c_str(), &end, 10);
        if (end != s.c_str() + s.size()) {
            throw ConfigError("EPI_SEED must be a nonnegative integer");
        }
        cfg.solver.seed = parsed;
    }
}

} // namespace epi

#endif // EPI_SCENARIO_HPP
