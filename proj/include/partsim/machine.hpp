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

#include "partsim/common.hpp"
#include "partsim/workload.hpp"

namespace partsim {

/// Accelerator description: cores, per-core compute rate, memory system.
struct MachineConfig {
    std::uint64_t cores = 0;
    std::uint64_t flops_per_core = 0;  // ops/s
    std::uint64_t peak_bw = 0;         // bytes/s
    std::uint64_t llc_bytes = 0;
    std::uint64_t dram_bytes = 0;
    std::uint64_t element_size = 0;
};

/// Throws Error if any field is zero.
void validate_machine(const MachineConfig& machine);

/// Parses the `key=value` machine config format. All six keys are required,
/// duplicates and unknown keys are errors, `#` comments allowed.
MachineConfig parse_machine_config(std::istream& in);
MachineConfig load_machine_config(const std::string& path);

enum class StaggerMode { none, uniform, random };

struct StaggerPolicy {
    StaggerMode mode = StaggerMode::uniform;
    std::uint64_t seed = 42;  // used by random mode only
};

struct PartitionPlan {
    std::uint64_t n_partitions = 1;
    std::uint64_t images_per_pass_total = 64;
    std::uint64_t passes = 4;
    StaggerPolicy stagger;
};

/// Throws Error unless n_partitions divides both the core count and the
/// image count, with all fields positive.
void validate_plan(const PartitionPlan& plan, const MachineConfig& machine);

inline std::uint64_t batch_per_partition(const PartitionPlan& plan) {
    return plan.images_per_pass_total / plan.n_partitions;
}

struct CapacityReport {
    std::uint64_t weight_bytes_total = 0;
    std::uint64_t workspace_bytes_per_partition = 0;
    std::uint64_t dram_needed = 0;
    bool feasible = false;
};

/// Assembles a report from precomputed parts; dram_needed =
/// weight_bytes_total + n_partitions * workspace_bytes_per_partition.
CapacityReport capacity_from_parts(std::uint64_t weight_bytes_total,
                                   std::uint64_t n_partitions,
                                   std::uint64_t workspace_bytes_per_partition,
                                   std::uint64_t dram_bytes);

/// DRAM feasibility of a plan. One copy of the weights is shared read-only;
/// each partition additionally needs workspace_factor * (its activation
/// working set for the largest layer + a private framework replica of the
/// weights). workspace_factor is the single calibration knob (default 2).
CapacityReport check_capacity(const CnnModel& model, const MachineConfig& machine,
                              const PartitionPlan& plan, double workspace_factor = 2.0);

/// Aggregate compute rate of one partition: (cores / n_partitions) * flops_per_core.
std::uint64_t partition_compute(const MachineConfig& machine, const PartitionPlan& plan);

/// Raised when simulation is requested for a capacity-infeasible plan.
struct CapacityError : Error {
    CapacityError(const CapacityReport& r, std::uint64_t dram_bytes)
        : Error("plan infeasible: dram_needed=" + std::to_string(r.dram_needed) +
                " bytes exceeds dram_bytes=" + std::to_string(dram_bytes)),
          report(r) {}
    CapacityReport report;
};

}  // namespace partsim
