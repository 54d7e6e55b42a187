/*
 * Copyright 2026 The partsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "partsim/metrics.hpp"

namespace partsim {

enum class Command { cost, simulate, sweep, validate };

/// One CLI invocation, fully resolved from flags.
struct RunSpec {
    Command command = Command::simulate;
    std::string model_path;
    std::string machine_path;
    std::uint64_t partitions = 1;
    std::uint64_t images = 64;  // images per pass, shared by all partitions
    std::uint64_t passes = 4;
    StaggerPolicy stagger;      // uniform, seed 42
    ReusePolicy policy;         // fit-once, producer-consumer off, write always
    double dt = 0.0;            // 0 = auto
    double workspace_factor = 2.0;
    std::string trace_path;     // simulate: write trace CSV here when set
    std::string out_path;       // cost/sweep: write CSV here when set
    SweepMode mode = SweepMode::partitions;
    std::vector<std::uint64_t> values{1, 2, 4, 8, 16};
};

PartitionPlan plan_from(const RunSpec& spec);

/// Exit codes: 0 success, 1 infeasible, 2 input error.
int cmd_cost(const RunSpec& spec, std::ostream& out);
int cmd_simulate(const RunSpec& spec, std::ostream& out);
int cmd_sweep(const RunSpec& spec, std::ostream& out);
int cmd_validate(const RunSpec& spec, std::ostream& out);

/// Dispatches on spec.command and maps exceptions to exit codes.
int run_command(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace partsim
