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
#include "epi/scenario.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using epi::json;
using epi::ScenarioConfig;

TEST(Scenario, DefaultsWhenEmpty)
{
    const auto cfg = epi::scenario_from_json(json::object());
    EXPECT_FALSE(cfg.mode.has_value());
    EXPECT_EQ(cfg.params, epi::ParameterSet{});
    EXPECT_EQ(cfg.grid().n_steps, 208u);
    EXPECT_TRUE(cfg.nonnegative_controls);
}

TEST(Scenario, FullConfig)
{
    const auto cfg = epi::scenario_from_json(json::parse(R"({
        "mode": "optimize",
        "params": {"gamma_f": 0.2},
        "grid": {"h": 0.5, "t_final": 26},
        "initial": {"x2": 0.1},
        "solver": {"max_outer": 7, "seed": 3},
        "nonnegative_controls": false,
        "output_dir": "runs/a"
    })"));
    EXPECT_EQ(*cfg.mode, epi::Mode::optimize);
    EXPECT_DOUBLE_EQ(cfg.params.gamma_f, 0.2);
    EXPECT_DOUBLE_EQ(cfg.params.t_final, 26.0);
    EXPECT_EQ(cfg.grid().n_steps, 52u);
    EXPECT_DOUBLE_EQ(cfg.initial[1], 0.1);
    EXPECT_DOUBLE_EQ(cfg.initial[0], 1.0);
    EXPECT_EQ(cfg.solver.max_outer, 7u);
    EXPECT_EQ(cfg.solver.seed, 3u);
    EXPECT_FALSE(cfg.nonnegative_controls);
    EXPECT_EQ(cfg.output_dir, "runs/a");
}

TEST(Scenario, RejectsInvalidInput)
{
    auto bad = [](const char* text) { return epi::scenario_from_json(json::parse(text)); };
    EXPECT_THROW(bad(R"({"colour": 1})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"mode": "plot"})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"grid": {"h": 0.3}})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"grid": {"t_final": 26}, "params": {"t_final": 52}})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"initial": {"x5": 0.2}})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"initial": {"x9": 0.2}})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"params": {"eta": -1}})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"solver": {"tol_kkt": -1}})"), epi::ConfigError);
    EXPECT_THROW(bad(R"({"solver": {"speed": 1}})"), epi::ConfigError);
    EXPECT_THROW(bad(R"([1, 2])"), epi::ConfigError);
}

TEST(Scenario, ParameterOverrides)
{
    ScenarioConfig cfg;
    epi::apply_parameter_override(cfg, "gamma_f=0.4");
    epi::apply_parameter_override(cfg, "beta=0.25");
    EXPECT_DOUBLE_EQ(cfg.params.beta, 0.25);
    EXPECT_THROW(epi::apply_parameter_override(cfg, "gamma_x=1"), epi::ConfigError);
    EXPECT_THROW(epi::apply_parameter_override(cfg, "beta"), epi::ConfigError);
    EXPECT_THROW(epi::apply_parameter_override(cfg, "beta=fast"), epi::ConfigError);
    EXPECT_THROW(epi::apply_parameter_override(cfg, "mu=2"), epi::ConfigError);
}

TEST(Scenario, SeedFromEnvironment)
{
    ScenarioConfig cfg;
    ::setenv("EPI_SEED", "42", 1);
    epi::apply_seed_from_environment(cfg);
    EXPECT_EQ(cfg.solver.seed, 42u);
    ::setenv("EPI_SEED", "x", 1);
    EXPECT_THROW(epi::apply_seed_from_environment(cfg), epi::ConfigError);
    ::unsetenv("EPI_SEED");
}

TEST(Scenario, LoadFromFile)
{
    const auto path = std::filesystem::temp_directory_path() / "epi_scenario_test.json";
    {
        std::ofstream os(path);
        os << R"({"mode": "simulate", "grid": {"h": 0.125}})";
    }
    const auto cfg = epi::load_scenario(path.string());
    EXPECT_EQ(*cfg.mode, epi::Mode::simulate);
    EXPECT_EQ(cfg.grid().n_steps, 416u);
    {
        std::ofstream os(path);
        os << "{not json";
    }
    EXPECT_THROW(epi::load_scenario(path.string()), epi::ConfigError);
    std::filesystem::remove(path);
    EXPECT_THROW(epi::load_scenario(path.string()), epi::ConfigError);
}
