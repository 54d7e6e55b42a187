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

#include "partsim/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace partsim {

namespace {

std::string human_bytes(double v) {
    char buf[64];
    if (v >= 1e9)
        std::snprintf(buf, sizeof(buf), "%.2f GB", v / 1e9);
    else if (v >= 1e6)
        std::snprintf(buf, sizeof(buf), "%.2f MB", v / 1e6);
    else if (v >= 1e3)
        std::snprintf(buf, sizeof(buf), "%.2f KB", v / 1e3);
    else
        std::snprintf(buf, sizeof(buf), "%.0f B", v);
    return buf;
}

std::string human_rate(double bytes_per_s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.1f GB/s", bytes_per_s / 1e9);
    return buf;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    out << contents;
    if (!out) throw Error("failed writing '" + path + "'");
}

void print_capacity(std::ostream& out, const CapacityReport& r, const MachineConfig& machine) {
    out << "weight_bytes_total:            " << r.weight_bytes_total << " ("
        << human_bytes(static_cast<double>(r.weight_bytes_total)) << ")\n";
    out << "workspace_bytes_per_partition: " << r.workspace_bytes_per_partition << " ("
        << human_bytes(static_cast<double>(r.workspace_bytes_per_partition)) << ")\n";
    out << "dram_needed:                   " << r.dram_needed << " ("
        << human_bytes(static_cast<double>(r.dram_needed)) << ")\n";
    out << "dram_bytes:                    " << machine.dram_bytes << " ("
        << human_bytes(static_cast<double>(machine.dram_bytes)) << ")\n";
    out << "feasible:                      " << (r.feasible ? "yes" : "no") << "\n";
}

void print_summary(std::ostream& out, const SummaryStats& stats, const SimTrace& trace) {
    out << "makespan:    " << detail::format_double(stats.makespan) << " s\n";
    out << "mean_bw:     " << detail::format_double(stats.mean_bw) << " bytes/s ("
        << human_rate(stats.mean_bw) << ")\n";
    out << "std_bw:      " << detail::format_double(stats.std_bw) << " bytes/s ("
        << human_rate(stats.std_bw) << ")\n";
    out << "throughput:  " << detail::format_double(stats.throughput) << " images/s\n";
    out << "images:      " << stats.images_total << "\n";
    out << "total_bytes: " << detail::format_double(trace.total_bytes) << "\n";
    out << "total_flops: " << detail::format_double(trace.total_flops) << "\n";
    out << "steps:       " << trace.bw_samples.size() << " (dt "
        << detail::format_double(trace.dt) << " s, contended " << trace.contended_steps << ")\n";
}

}  // namespace

PartitionPlan plan_from(const RunSpec& spec) {
    PartitionPlan plan;
    plan.n_partitions = spec.partitions;
    plan.images_per_pass_total = spec.images;
    plan.passes = spec.passes;
    plan.stagger = spec.stagger;
    return plan;
}

int cmd_cost(const RunSpec& spec, std::ostream& out) {
    const CnnModel model = load_model(spec.model_path);
    const MachineConfig machine = load_machine_config(spec.machine_path);

    std::ostringstream csv;
    csv << "name,kind,flops_per_image,weight_bytes,in_act_bytes,out_act_bytes,arith_intensity\n";
    out << std::left << std::setw(20) << "name" << std::setw(9) << "kind" << std::right
        << std::setw(14) << "flops/img" << std::setw(13) << "weight_B" << std::setw(13)
        << "in_act_B" << std::setw(13) << "out_act_B" << std::setw(12) << "flops/byte" << "\n";
    for (const auto& layer : model.layers) {
        const LayerCost c = layer_cost(layer, machine.element_size);
        const double intensity =
            static_cast<double>(c.flops_per_image) /
            static_cast<double>(c.weight_bytes + c.in_act_bytes_per_image + c.out_act_bytes_per_image);
        out << std::left << std::setw(20) << layer.name << std::setw(9) << to_token(layer.kind)
            << std::right << std::setw(14) << c.flops_per_image << std::setw(13) << c.weight_bytes
            << std::setw(13) << c.in_act_bytes_per_image << std::setw(13)
            << c.out_act_bytes_per_image << std::setw(12) << std::fixed << std::setprecision(3)
            << intensity << "\n";
        out.unsetf(std::ios::fixed);
        csv << layer.name << ',' << to_token(layer.kind) << ',' << c.flops_per_image << ','
            << c.weight_bytes << ',' << c.in_act_bytes_per_image << ','
            << c.out_act_bytes_per_image << ',' << detail::format_double(intensity) << "\n";
    }
    try {
        const double ratio = weight_traffic_ratio(model, spec.images, machine.element_size);
        out << "\nweight_traffic_ratio(batch=" << spec.images
            << "): " << detail::format_double(ratio) << "\n";
    } catch (const Error& e) {
        out << "\nweight_traffic_ratio(batch=" << spec.images << "): undefined (" << e.what()
            << ")\n";
    }
    if (!spec.out_path.empty()) write_file(spec.out_path, csv.str());
    return 0;
}

int cmd_simulate(const RunSpec& spec, std::ostream& out) {
    const CnnModel model = load_model(spec.model_path);
    const MachineConfig machine = load_machine_config(spec.machine_path);
    const PartitionPlan plan = plan_from(spec);

    SimConfig sim;
    sim.dt = spec.dt;
    sim.record_trace = !spec.trace_path.empty();

    const SimTrace trace = simulate(model, machine, plan, spec.policy, sim, spec.workspace_factor);
    const SummaryStats stats = summarize(trace, plan.images_per_pass_total * plan.passes);
    print_summary(out, stats, trace);
    if (!spec.trace_path.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, trace);
        write_file(spec.trace_path, csv.str());
        out << "trace:       " << spec.trace_path << "\n";
    }
    return 0;
}

int cmd_sweep(const RunSpec& spec, std::ostream& out) {
    const CnnModel model = load_model(spec.model_path);
    const MachineConfig machine = load_machine_config(spec.machine_path);
    const PartitionPlan plan = plan_from(spec);

    SimConfig sim;
    sim.dt = spec.dt;

    const std::vector<SweepRow> rows = sweep(model, machine, plan, spec.policy, sim, spec.mode,
                                             spec.values, spec.workspace_factor);
    out << std::left << std::setw(12)
        << (spec.mode == SweepMode::partitions ? "partitions" : "cores") << std::right
        << std::setw(12) << "mean_bw" << std::setw(12) << "std_bw" << std::setw(14) << "makespan"
        << std::setw(12) << "imgs/s" << std::setw(10) << "rel" << std::setw(10) << "std_red"
        << std::setw(11) << "mean_gain" << std::setw(10) << "feasible" << "\n";
    for (const SweepRow& r : rows) {
        if (!r.feasible) {
            out << std::left << std::setw(12) << r.sweep_value << std::right << "  INFEASIBLE\n";
            continue;
        }
        char line[256];
        std::snprintf(line, sizeof(line),
                      "%-12llu%12.1f%12.1f%14.6f%12.1f%10.4f%10.4f%11.4f%10s",
                      static_cast<unsigned long long>(r.sweep_value), r.stats.mean_bw / 1e9,
                      r.stats.std_bw / 1e9, r.stats.makespan, r.stats.throughput,
                      r.relative_performance, r.std_reduction, r.mean_gain, "yes");
        out << line << "\n";
    }
    out << "(mean_bw and std_bw in GB/s)\n";
    if (!spec.out_path.empty()) {
        std::ostringstream csv;
        write_sweep_csv(csv, rows);
        write_file(spec.out_path, csv.str());
    }
    return 0;
}

int cmd_validate(const RunSpec& spec, std::ostream& out) {
    const CnnModel model = load_model(spec.model_path);
    const MachineConfig machine = load_machine_config(spec.machine_path);
    const PartitionPlan plan = plan_from(spec);

    const auto breaks = check_chain(model);
    out << "model: " << model.name << " (" << model.layers.size() << " layers)\n";
    if (breaks.empty()) {
        out << "layer chain: consistent\n";
    } else {
        out << "layer chain: " << breaks.size()
            << " discontinuities (expected at branch-merge boundaries):\n";
        for (const auto& b : breaks) out << "  [" << b.index << "] " << b.detail << "\n";
    }
    const CapacityReport report = check_capacity(model, machine, plan, spec.workspace_factor);
    print_capacity(out, report, machine);
    return report.feasible ? 0 : 1;
}

int run_command(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        switch (spec.command) {
            case Command::cost: return cmd_cost(spec, out);
            case Command::simulate: return cmd_simulate(spec, out);
            case Command::sweep: return cmd_sweep(spec, out);
            case Command::validate: return cmd_validate(spec, out);
        }
        return 2;
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace partsim
