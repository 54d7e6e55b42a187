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

#include "partsim/metrics.hpp"

#include <cmath>
#include <ostream>

namespace partsim {

namespace {

double mean_of(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    return sum / static_cast<double>(xs.size());
}

double population_std(const std::vector<double>& xs) {
    const double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(xs.size()));
}

}  // namespace

SummaryStats summarize(const SimTrace& trace, std::uint64_t images_total) {
    if (trace.bw_samples.empty()) throw Error("summarize: empty trace");
    if (trace.makespan <= 0.0) throw Error("summarize: non-positive makespan");
    SummaryStats stats;
    stats.images_total = images_total;
    stats.makespan = trace.makespan;
    stats.throughput = static_cast<double>(images_total) / trace.makespan;
    stats.mean_bw = mean_of(trace.bw_samples);

    // std over window means; see kBwStatWindows
    const std::size_t n = trace.bw_samples.size();
    const std::size_t window = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(n) /
                                                 static_cast<double>(kBwStatWindows))));
    std::vector<double> means;
    means.reserve(n / window + 1);
    for (std::size_t i = 0; i < n; i += window) {
        const std::size_t end = std::min(n, i + window);
        double sum = 0.0;
        for (std::size_t k = i; k < end; ++k) sum += trace.bw_samples[k];
        means.push_back(sum / static_cast<double>(end - i));
    }
    stats.std_bw = population_std(means);
    return stats;
}

std::vector<SweepRow> sweep(const CnnModel& model, const MachineConfig& machine,
                            const PartitionPlan& plan_template, const ReusePolicy& policy,
                            const SimConfig& sim, SweepMode mode,
                            const std::vector<std::uint64_t>& values,
                            double workspace_factor) {
    if (values.empty()) throw Error("sweep: values must be non-empty");
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    std::size_t baseline_index = values.size();  // first feasible row anchors comparisons
    for (std::uint64_t value : values) {
        MachineConfig m = machine;
        PartitionPlan plan = plan_template;
        if (mode == SweepMode::partitions) {
            plan.n_partitions = value;
        } else {
            m.cores = value;
            plan.n_partitions = 1;
            plan.images_per_pass_total = value;  // one image per core per weight load
        }
        SweepRow row;
        row.sweep_value = value;
        const CapacityReport capacity = check_capacity(model, m, plan, workspace_factor);
        if (!capacity.feasible) {
            row.feasible = false;
            rows.push_back(row);
            continue;
        }
        const SimTrace trace = simulate(model, m, plan, policy, sim, workspace_factor);
        row.stats = summarize(trace, plan.images_per_pass_total * plan.passes);
        rows.push_back(row);
        SweepRow& r = rows.back();
        if (baseline_index == values.size()) {
            baseline_index = rows.size() - 1;
            r.relative_performance = 1.0;
            r.std_reduction = 0.0;
            r.mean_gain = 0.0;
            continue;
        }
        const SummaryStats& base = rows[baseline_index].stats;
        if (mode == SweepMode::partitions)
            r.relative_performance = base.makespan / r.stats.makespan;
        else
            r.relative_performance = r.stats.throughput / base.throughput;
        r.std_reduction = base.std_bw > 0.0 ? (base.std_bw - r.stats.std_bw) / base.std_bw : 0.0;
        r.mean_gain = base.mean_bw > 0.0 ? (r.stats.mean_bw - base.mean_bw) / base.mean_bw : 0.0;
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "sweep_value,mean_bw,std_bw,makespan,throughput,relative_performance,"
           "std_reduction,mean_gain,feasible\n";
    for (const SweepRow& r : rows) {
        out << r.sweep_value << ',' << detail::format_double(r.stats.mean_bw) << ','
            << detail::format_double(r.stats.std_bw) << ','
            << detail::format_double(r.stats.makespan) << ','
            << detail::format_double(r.stats.throughput) << ','
            << detail::format_double(r.relative_performance) << ','
            << detail::format_double(r.std_reduction) << ','
            << detail::format_double(r.mean_gain) << ',' << (r.feasible ? 1 : 0) << "\n";
    }
}

}  // namespace partsim
