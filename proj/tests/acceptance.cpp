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
#include <cstdlib>
#include <fstream>
#include <string>

namespace
{
std::string short_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}
} // namespace

// Prints one line per acceptance criterion; exits nonzero if any fails.
int main(int argc, char** argv)
{
    epi::verification::AcceptanceOptions opts;
    if (const char* env = std::getenv("EPI_SEED"); env != nullptr && *env != '\0') {
        opts.solver.seed = std::strtoull(env, nullptr, 10);
    }
    for (int i = 1; i < argc; ++i) {
        if (std::string(argv[i]) == "--skip-slow") {
            opts.skip_slow = true;
        }
    }

    const auto run = epi::verification::run_acceptance(opts);
    for (const auto& c : run.criteria) {
        const char* tag = c.status == epi::verification::CriterionStatus::pass  ? "PASS"
                          : c.status == epi::verification::CriterionStatus::fail ? "FAIL"
                                                                                  : "SKIP";
        std::string bound = std::string(to_string(c.comparison)) + " " + short_number(c.threshold);
        if (c.target) {
            bound = "target " + short_number(*c.target) + " +/- " + short_number(c.threshold);
        }
        std::printf("%s  criterion %-3s %s | measured %s, %s%s%s\n", tag, c.id.c_str(), c.name.c_str(),
                    short_number(c.measured).c_str(), bound.c_str(), c.detail.empty() ? "" : " | ",
                    c.detail.c_str());
    }
    if (run.optimized) {
        std::ofstream os("acceptance_optimized.csv");
        epi::write_trajectory_csv(os, *run.optimized);
    }
    if (run.baseline) {
        std::ofstream os("acceptance_zero_control.csv");
        epi::write_trajectory_csv(os, *run.baseline);
    }
    std::printf("%s\n", run.all_pass() ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
    return run.all_pass() ? 0 : 1;
}
