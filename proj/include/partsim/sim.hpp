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
#include <span>
#include <vector>

#include "partsim/machine.hpp"
#include "partsim/traffic.hpp"

namespace partsim {

struct SimConfig {
    double dt = 0.0;                // seconds per step; 0 selects the default
    std::uint64_t min_steps = 10000;  // floor on steps per full run when dt is auto
    bool record_trace = false;      // keep the per-partition layer timeline
};

/// Result of a simulation run. Bandwidth samples are always recorded; the
/// per-partition layer timeline only when SimConfig.record_trace is set.
///
/// Each sample is the DRAM bytes moved during one dt step divided by dt,
/// clamped at peak_bw; bytes exceeding the clamp (layer-completion spill)
/// carry into the following step, so sum(samples)*dt equals total_bytes up
/// to the carry left at the final step.
struct SimTrace {
    double dt = 0.0;
    std::uint64_t n_partitions = 0;
    std::vector<double> bw_samples;           // aggregate bytes/s per step
    std::vector<std::int64_t> layer_timeline; // [step * n_partitions + p], -1 once finished
    double makespan = 0.0;   // seconds; finish time of the last partition
    double total_bytes = 0.0;
    double total_flops = 0.0;
    std::uint64_t contended_steps = 0;  // steps whose raw demand sum exceeded peak_bw
};

/// Max-min fair (water-filling) allocation of peak bandwidth across demands.
/// Under-subscription returns the demands unchanged; otherwise there is a
/// level L with alloc_i = min(demand_i, L) and sum(alloc) = peak.
std::vector<double> allocate_bandwidth(std::span<const double> demands, double peak);

/// Start-phase offsets within one estimated pass period.
/// none: all zero. uniform: (i/n) * estimate. random: deterministic draws
/// from the plan's seed, uniform in [0, estimate).
std::vector<double> stagger_offsets(const PartitionPlan& plan, double pass_time_estimate);

/// Time-stepped execution of all partitions against the shared bandwidth
/// budget. Stagger offsets are realized as phase rotation: a partition starts
/// at the layer reached `offset` seconds into an ideal pass and wraps the
/// skipped prefix at the end of its run, so total work per partition is
/// independent of stagger and no dead time is introduced.
SimTrace simulate(const CnnModel& model, const MachineConfig& machine,
                  const PartitionPlan& plan, const ReusePolicy& policy,
                  const SimConfig& sim, double workspace_factor = 2.0);

/// Trace CSV: `t,aggregate_bw,layer_p0,...` with t fixed-point (9 fractional
/// digits) and metadata carried in leading `#` comment lines. Requires a
/// trace recorded with record_trace = true.
void write_trace_csv(std::ostream& out, const SimTrace& trace);
SimTrace read_trace_csv(std::istream& in);

}  // namespace partsim
