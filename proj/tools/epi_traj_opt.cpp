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

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace
{

namespace fs = std::filesystem;

enum ExitCode { ok = 0, validation_error = 1, solver_failure = 2, verification_failure = 3 };

struct Cli {
    std::string command;
    std::string config_path;
    std::vector<std::string> params;
    std::string out_dir;
    double h = 0.0;
    bool free_controls = false;
    std::vector<std::string> skip;
    bool inject_fault = false;
    bool history_csv  = false;
    bool dump_nlp     = false;
};

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream os(path);
    if (!os) {
        throw epi::ConfigError("cannot write '" + path.string() + "'");
    }
    os << text;
}

void write_json(const fs::path& path, const epi::json& j)
{
    write_text(path, j.dump(2) + "\n");
}

template <class M>
void write_csv(const fs::path& path, const epi::Trajectory<M>& traj)
{
    std::ofstream os(path);
    if (!os) {
        throw epi::ConfigError("cannot write '" + path.string() + "'");
    }
    epi::write_trajectory_csv(os, traj);
}

epi::ScenarioConfig build_config(const Cli& cli)
{
    epi::ScenarioConfig cfg = cli.config_path.empty() ? epi::ScenarioConfig{} : epi::load_scenario(cli.config_path);
    const auto mode = epi::mode_from_string(cli.command);
    if (cfg.mode && *cfg.mode != mode) {
        throw epi::ConfigError(std::string("config 'mode' is '") + epi::to_string(*cfg.mode) +
                               "' but the command is '" + cli.command + "'");
    }
    cfg.mode = mode;
    for (const auto& p : cli.params) {
        epi::apply_parameter_override(cfg, p);
    }
    if (cli.h != 0.0) {
        cfg.h = cli.h;
    }
    if (cli.free_controls) {
        cfg.nonnegative_controls = false;
    }
    if (!cli.out_dir.empty()) {
        cfg.output_dir = cli.out_dir;
    }
    epi::apply_seed_from_environment(cfg);
    cfg.validate();
    for (const auto& s : cli.skip) {
        if (s != "slow") {
            throw epi::ConfigError("unknown --skip category '" + s + "' (expected 'slow')");
        }
    }
    return cfg;
}

int cmd_simulate(const epi::ScenarioConfig& cfg, const fs::path& out)
{
    const epi::DengueModel model(cfg.params, cfg.nonnegative_controls);
    const auto grid  = cfg.grid();
    const auto sched = epi::ControlSchedule<2>::constant(grid, {0.0, 0.0});
    const auto res   = epi::euler_run(model, cfg.initial, sched);
    write_csv(out / "trajectory.csv", res.trajectory);
    if (res.diverged_at) {
        std::cerr << "error: simulation diverged at step " << *res.diverged_at << ": " << res.reason
                  << " (partial trajectory written)\n";
        return solver_failure;
    }
    write_json(out / "summary.json", epi::simulation_summary(res.trajectory, cfg.params));
    std::cout << "simulate: total_cost " << epi::format_g17(res.trajectory.total_cost) << ", "
              << res.trajectory.states.size() << " nodes -> " << out.string() << "\n";
    return ok;
}

int cmd_optimize(const epi::ScenarioConfig& cfg, const Cli& cli, const fs::path& out)
{
    const epi::DengueModel model(cfg.params, cfg.nonnegative_controls);
    const auto grid = cfg.grid();
    const epi::EulerTranscription<epi::DengueModel> nlp(model, grid, cfg.initial);
    const auto z0  = nlp.zero_control_guess();
    const auto sol = epi::solve_nlp(nlp, z0, cfg.solver);

    epi::json report = epi::to_json(sol.report);
    report["transcription"] = epi::to_json(nlp.report());
    write_json(out / "report.json", report);
    if (cli.history_csv) {
        std::ofstream os(out / "history.csv");
        epi::write_history_csv(os, sol.report);
    }
    if (cli.dump_nlp) {
        write_json(out / "nlp.json", epi::nlp_dump(nlp, sol.z));
    }
    for (const auto& w : sol.report.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    if (sol.report.status == epi::SolveStatus::divergence) {
        std::cerr << "error: solver diverged (report.json retained)\n";
        return solver_failure;
    }

    const auto optimized = nlp.extract(sol.z, cfg.solver.tol_feas);
    write_csv(out / "trajectory.csv", optimized);
    const auto baseline = epi::euler_simulate(model, cfg.initial, epi::ControlSchedule<2>::constant(grid, {0.0, 0.0}));
    write_json(out / "comparison.json", {{"zero_control", epi::to_json(epi::dengue_milestones(baseline))},
                                         {"optimized", epi::to_json(epi::dengue_milestones(optimized))}});

    std::cout << "optimize: status " << epi::to_string(sol.report.status) << ", objective "
              << epi::format_g17(sol.report.objective) << ", kkt " << epi::format_g17(sol.report.kkt_residual)
              << ", feasibility " << epi::format_g17(sol.report.feasibility_residual) << " -> " << out.string()
              << "\n";
    if (sol.report.status != epi::SolveStatus::converged) {
        std::cerr << "error: solver stopped with status " << epi::to_string(sol.report.status)
                  << " (best iterate written)\n";
        return solver_failure;
    }
    return ok;
}

int cmd_verify(const epi::ScenarioConfig& cfg, const Cli& cli, const fs::path& out)
{
    epi::verification::AcceptanceOptions opts;
    opts.params                = cfg.params;
    opts.h                     = cfg.h;
    opts.initial               = cfg.initial;
    opts.solver                = cfg.solver;
    opts.nonnegative_controls  = cfg.nonnegative_controls;
    opts.skip_slow             = !cli.skip.empty();
    opts.inject_jacobian_fault = cli.inject_fault;

    const auto run = epi::verification::run_acceptance(opts);
    auto j         = epi::verification::to_json(run, cfg.solver.seed);
    epi::json attached = epi::json::array();
    if (run.optimized) {
        write_csv(out / "verify_optimized.csv", *run.optimized);
        attached.push_back("verify_optimized.csv");
    }
    if (run.shooting) {
        write_csv(out / "verify_shooting.csv", *run.shooting);
        attached.push_back("verify_shooting.csv");
    }
    if (run.baseline) {
        write_csv(out / "verify_zero_control.csv", *run.baseline);
        attached.push_back("verify_zero_control.csv");
    }
    j["trajectories"] = std::move(attached);
    write_json(out / "verify.json", j);

    for (const auto& c : run.criteria) {
        std::cout << "[" << epi::verification::to_string(c.status) << "] " << c.id << " " << c.name
                  << ": measured " << epi::format_g17(c.measured) << "\n";
    }
    return run.all_pass() ? ok : verification_failure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optimal control of a Dengue transmission model by direct transcription"};
    app.set_help_flag("--help", "print this help and exit");
    app.set_version_flag("--version", "epi-traj-opt 1.0.0");
    Cli cli;
    app.add_option("command", cli.command, "simulate | optimize | verify")
        ->required()
        ->check(CLI::IsMember({"simulate", "optimize", "verify"}));
    app.add_option("--config", cli.config_path, "scenario JSON file")->check(CLI::ExistingFile);
    app.add_option("--param", cli.params, "parameter override name=value (repeatable)");
    app.add_option("--out", cli.out_dir, "output directory");
    app.add_option("--h", cli.h, "Euler step size")->check(CLI::PositiveNumber);
    app.add_flag("--free-controls", cli.free_controls, "drop the u >= 0 bounds");
    app.add_option("--skip", cli.skip, "verify: skip a check category (slow)");
    app.add_flag("--inject-jacobian-fault", cli.inject_fault, "verify: perturb the analytic Jacobian");
    app.add_flag("--history-csv", cli.history_csv, "optimize: also write history.csv");
    app.add_flag("--dump-nlp", cli.dump_nlp, "optimize: also write nlp.json");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : validation_error;
    }

    try {
        const auto cfg = build_config(cli);
        const fs::path out(cfg.output_dir);
        fs::create_directories(out);
        switch (*cfg.mode) {
        case epi::Mode::simulate:
            return cmd_simulate(cfg, out);
        case epi::Mode::optimize:
            return cmd_optimize(cfg, cli, out);
        case epi::Mode::verify:
            return cmd_verify(cfg, cli, out);
        }
    }
    catch (const epi::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return solver_failure;
    }
    catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation_error;
    }
    catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return validation_error;
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return solver_failure;
    }
    return ok;
}
