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

#include "partsim/machine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>

namespace partsim {

namespace {

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

void validate_machine(const MachineConfig& machine) {
    if (machine.cores == 0 || machine.flops_per_core == 0 || machine.peak_bw == 0 ||
        machine.llc_bytes == 0 || machine.dram_bytes == 0 || machine.element_size == 0)
        throw Error("machine config: all fields must be > 0");
}

MachineConfig parse_machine_config(std::istream& in) {
    static const std::map<std::string, std::uint64_t MachineConfig::*> keys = {
        {"cores", &MachineConfig::cores},
        {"flops_per_core", &MachineConfig::flops_per_core},
        {"peak_bw", &MachineConfig::peak_bw},
        {"llc_bytes", &MachineConfig::llc_bytes},
        {"dram_bytes", &MachineConfig::dram_bytes},
        {"element_size", &MachineConfig::element_size},
    };
    MachineConfig machine;
    std::map<std::string, bool> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = strip(line);
        if (s.empty() || s.front() == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ParseError(line_no, "expected key=value");
        std::string key(strip(s.substr(0, eq)));
        std::string_view value = strip(s.substr(eq + 1));
        auto it = keys.find(key);
        if (it == keys.end()) throw ParseError(line_no, "unknown key '" + key + "'");
        if (seen[key]) throw ParseError(line_no, "duplicate key '" + key + "'");
        seen[key] = true;
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
        if (ec != std::errc{} || ptr != value.data() + value.size())
            throw ParseError(line_no, "value of '" + key + "' is not a decimal integer: '" +
                                          std::string(value) + "'");
        machine.*(it->second) = v;
    }
    for (const auto& [key, ptr] : keys)
        if (!seen[key]) throw ParseError(line_no, "missing key '" + key + "'");
    validate_machine(machine);
    return machine;
}

MachineConfig load_machine_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open machine config '" + path + "'");
    try {
        return parse_machine_config(in);
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

void validate_plan(const PartitionPlan& plan, const MachineConfig& machine) {
    if (plan.n_partitions == 0 || plan.images_per_pass_total == 0 || plan.passes == 0)
        throw Error("plan: n_partitions, images_per_pass_total, and passes must be > 0");
    if (machine.cores % plan.n_partitions != 0)
        throw Error("plan: n_partitions=" + std::to_string(plan.n_partitions) +
                    " does not divide cores=" + std::to_string(machine.cores));
    if (plan.images_per_pass_total % plan.n_partitions != 0)
        throw Error("plan: n_partitions=" + std::to_string(plan.n_partitions) +
                    " does not divide images_per_pass_total=" +
                    std::to_string(plan.images_per_pass_total));
}

CapacityReport capacity_from_parts(std::uint64_t weight_bytes_total,
                                   std::uint64_t n_partitions,
                                   std::uint64_t workspace_bytes_per_partition,
                                   std::uint64_t dram_bytes) {
    CapacityReport report;
    report.weight_bytes_total = weight_bytes_total;
    report.workspace_bytes_per_partition = workspace_bytes_per_partition;
    report.dram_needed = weight_bytes_total + n_partitions * workspace_bytes_per_partition;
    report.feasible = report.dram_needed <= dram_bytes;
    return report;
}

CapacityReport check_capacity(const CnnModel& model, const MachineConfig& machine,
                              const PartitionPlan& plan, double workspace_factor) {
    validate_plan(plan, machine);
    if (workspace_factor < 1.0) throw Error("workspace_factor must be >= 1");
    std::uint64_t weights = 0;
    std::uint64_t max_footprint = 0;
    for (const auto& layer : model.layers) {
        const LayerCost cost = layer_cost(layer, machine.element_size);
        weights += cost.weight_bytes;
        max_footprint = std::max(
            max_footprint, cost.in_act_bytes_per_image + cost.out_act_bytes_per_image);
    }
    // Each partition runs its own framework instance: private activation
    // buffers for its batch plus a replica of the weights, scaled by the
    // scratch factor. The shared read-only copy is counted once on top.
    const double per_partition =
        workspace_factor *
        (static_cast<double>(batch_per_partition(plan)) * static_cast<double>(max_footprint) +
         static_cast<double>(weights));
    const auto workspace = static_cast<std::uint64_t>(std::llround(per_partition));
    return capacity_from_parts(weights, plan.n_partitions, workspace, machine.dram_bytes);
}

std::uint64_t partition_compute(const MachineConfig& machine, const PartitionPlan& plan) {
    validate_plan(plan, machine);
    return (machine.cores / plan.n_partitions) * machine.flops_per_core;
}

}  // namespace partsim
