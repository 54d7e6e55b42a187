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
#include <vector>

#include "partsim/sim.hpp"

namespace partsim {

/// Number of equal-duration windows the bandwidth samples are grouped into
/// before computing the standard deviation. Hardware profilers sample at a
/// much coarser granularity than the simulation step; this is the declared
/// surrogate for that window. Mean bandwidth uses the raw samples.
inline constexpr std::size_t kBwStatWindows = 250;

struct SummaryStats {
    double mean_bw = 0.0;  // bytes/s, mean of raw samples
    double std_bw = 0.0;   // bytes/s, population std over window means
    double makespan = 0.0;
    double throughput = 0.0;  // images/s
    std::uint64_t images_total = 0;
};

/// Reduces a trace to its figures of merit. Throws Error on an empty trace.
SummaryStats summarize(const SimTrace& trace, std::uint64_t images_total);

enum class SweepMode { partitions, cores };

struct SweepRow {
    std::uint64_t sweep_value = 0;
    SummaryStats stats;
    double relative_performance = 0.0;  // baseline makespan / row makespan
    double std_reduction = 0.0;         // (std_base - std) / std_base
    double mean_gain = 0.0;             // (mean - mean_base) / mean_base
    bool feasible = true;
};

/// Runs one simulation per value and compares against the first row.
///
/// partitions mode: n_partitions takes each value; images and passes come
/// from the plan template, holding total work constant across rows.
/// cores mode: single partition, machine.cores overridden per value, with
/// images_per_pass_total = value so each core handles one image per pass;
/// relative_performance compares per-image throughput.
///
/// Capacity-infeasible values yield a row with feasible = false and zeroed
/// stats instead of aborting the sweep.
std::vector<SweepRow> sweep(const CnnModel& model, const MachineConfig& machine,
                            const PartitionPlan& plan_template, const ReusePolicy& policy,
                            const SimConfig& sim, SweepMode mode,
                            const std::vector<std::uint64_t>& values,
                            double workspace_factor = 2.0);

/// Sweep CSV: header
/// `sweep_value,mean_bw,std_bw,makespan,throughput,relative_performance,std_reduction,mean_gain,feasible`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace partsim
