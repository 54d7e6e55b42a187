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

#include "partsim/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>

namespace partsim {

namespace {

// One compute partition walking the cyclic layer sequence. Stagger rotates
// the start phase; the skipped prefix of the first pass is executed at the
// end, so every layer is processed exactly `passes` times in total.
struct PartitionState {
    std::uint64_t partition_id = 0;
    std::size_t layer_index = 0;      // cursor into the pass traffic sequence
    double fraction_done = 0.0;       // of the current layer
    double start_offset = 0.0;        // seconds of phase rotation
    double start_fraction = 0.0;      // phase within the start layer
    std::uint64_t segments_done = 0;
    std::uint64_t segments_total = 0;
    double units_done = 0.0;          // completed work in layer-batch units
    bool finished = false;
    double finish_time = 0.0;

    std::uint64_t pass_index(std::size_t n_layers) const {
        return static_cast<std::uint64_t>((units_done + 1e-9) / static_cast<double>(n_layers));
    }
};

constexpr double kInvTwoPow53 = 1.0 / 9007199254740992.0;  // 2^-53

}  // namespace

std::vector<double> allocate_bandwidth(std::span<const double> demands, double peak) {
    if (peak <= 0.0) throw Error("allocate_bandwidth: peak must be > 0");
    double total = 0.0;
    for (double d : demands) {
        if (d < 0.0) throw Error("allocate_bandwidth: demands must be >= 0");
        total += d;
    }
    std::vector<double> alloc(demands.begin(), demands.end());
    if (total <= peak) return alloc;

    std::vector<std::size_t> order(demands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return demands[a] < demands[b]; });
    double remaining = peak;
    std::size_t left = demands.size();
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const double level = remaining / static_cast<double>(left);
        const std::size_t i = order[pos];
        if (demands[i] <= level) {
            alloc[i] = demands[i];
            remaining -= demands[i];
            --left;
        } else {
            for (std::size_t p = pos; p < order.size(); ++p) alloc[order[p]] = level;
            break;
        }
    }
    return alloc;
}

std::vector<double> stagger_offsets(const PartitionPlan& plan, double pass_time_estimate) {
    if (pass_time_estimate <= 0.0) throw Error("stagger_offsets: pass_time_estimate must be > 0");
    const std::uint64_t n = plan.n_partitions;
    std::vector<double> offsets(n, 0.0);
    switch (plan.stagger.mode) {
        case StaggerMode::none:
            break;
        case StaggerMode::uniform:
            for (std::uint64_t i = 0; i < n; ++i)
                offsets[i] = (static_cast<double>(i) / static_cast<double>(n)) * pass_time_estimate;
            break;
        case StaggerMode::random: {
            // drawn from raw engine output so the sequence is identical across platforms
            std::mt19937_64 gen(plan.stagger.seed);
            for (std::uint64_t i = 0; i < n; ++i)
                offsets[i] = pass_time_estimate *
                             (static_cast<double>(gen() >> 11) * kInvTwoPow53);
            break;
        }
    }
    return offsets;
}

SimTrace simulate(const CnnModel& model, const MachineConfig& machine,
                  const PartitionPlan& plan, const ReusePolicy& policy,
                  const SimConfig& sim, double workspace_factor) {
    validate_plan(plan, machine);
    if (sim.dt < 0.0) throw Error("simulate: dt must be > 0");
    const CapacityReport capacity = check_capacity(model, machine, plan, workspace_factor);
    if (!capacity.feasible) throw CapacityError(capacity, machine.dram_bytes);

    const std::vector<LayerTraffic> traffic = pass_traffic(model, machine, plan, policy);
    const std::size_t n_layers = traffic.size();
    const std::uint64_t n = plan.n_partitions;
    const double compute = static_cast<double>(partition_compute(machine, plan));
    const double peak = static_cast<double>(machine.peak_bw);

    std::vector<double> flops(n_layers), bytes(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        flops[l] = static_cast<double>(traffic[l].flops_total);
        bytes[l] = static_cast<double>(traffic[l].bytes_total);
    }

    // phase axis: per-layer compute time, matching the pass time estimate
    std::vector<double> cumulative(n_layers + 1, 0.0);
    for (std::size_t l = 0; l < n_layers; ++l) cumulative[l + 1] = cumulative[l] + flops[l] / compute;
    const double pass_estimate = cumulative[n_layers];

    double dt = sim.dt;
    if (dt == 0.0) {
        const std::uint64_t min_steps = std::max<std::uint64_t>(1, sim.min_steps);
        dt = std::min(pass_estimate / 2000.0,
                      static_cast<double>(plan.passes) * pass_estimate /
                          static_cast<double>(min_steps));
    }

    const std::vector<double> offsets = stagger_offsets(plan, pass_estimate);
    const std::uint64_t segments_per_run = plan.passes * n_layers;

    std::vector<PartitionState> states(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        PartitionState& s = states[i];
        s.partition_id = i;
        s.start_offset = offsets[i];
        std::size_t l = 0;
        while (l + 1 < n_layers && cumulative[l + 1] <= offsets[i]) ++l;
        const double span = cumulative[l + 1] - cumulative[l];
        double frac = span > 0.0 ? (offsets[i] - cumulative[l]) / span : 0.0;
        frac = std::clamp(frac, 0.0, 1.0 - 1e-12);
        if (frac < 1e-15) frac = 0.0;
        s.layer_index = l;
        s.fraction_done = frac;
        s.start_fraction = frac;
        s.segments_total = segments_per_run + (frac > 0.0 ? 1 : 0);
    }

    SimTrace trace;
    trace.dt = dt;
    trace.n_partitions = n;

    std::vector<double> demands(n);
    double carry = 0.0;
    double t = 0.0;
    std::uint64_t step = 0;
    constexpr std::uint64_t kMaxSteps = 200'000'000;

    auto segment_end = [&](const PartitionState& s) {
        const bool last = s.segments_done + 1 == s.segments_total;
        return (last && s.start_fraction > 0.0) ? s.start_fraction : 1.0;
    };

    auto all_finished = [&] {
        return std::all_of(states.begin(), states.end(),
                           [](const PartitionState& s) { return s.finished; });
    };

    while (!all_finished()) {
        if (++step > kMaxSteps) throw Error("simulate: step limit exceeded");
        for (std::uint64_t i = 0; i < n; ++i) {
            const PartitionState& s = states[i];
            if (s.finished) {
                demands[i] = 0.0;
                continue;
            }
            const double B = bytes[s.layer_index];
            demands[i] = B > 0.0 ? compute * B / flops[s.layer_index] : 0.0;
        }
        const double demand_sum = std::accumulate(demands.begin(), demands.end(), 0.0);
        if (demand_sum > peak) ++trace.contended_steps;
        const std::vector<double> alloc = allocate_bandwidth(demands, peak);

        if (sim.record_trace) {
            for (std::uint64_t i = 0; i < n; ++i) {
                const PartitionState& s = states[i];
                trace.layer_timeline.push_back(
                    s.finished ? -1
                               : static_cast<std::int64_t>(s.pass_index(n_layers) * n_layers +
                                                           s.layer_index));
            }
        }

        double step_bytes = carry;
        for (std::uint64_t i = 0; i < n; ++i) {
            PartitionState& s = states[i];
            if (s.finished) continue;
            const double F = flops[s.layer_index];
            const double B = bytes[s.layer_index];
            const double rate = B > 0.0 ? std::min(compute, alloc[i] * F / B) : compute;
            const double end = segment_end(s);
            const double need = (end - s.fraction_done) * F / rate;
            if (need > dt) {
                const double df = rate * dt / F;
                s.fraction_done += df;
                step_bytes += df * B;
                trace.total_bytes += df * B;
                trace.total_flops += df * F;
                continue;
            }
            // segment completes inside this step
            const double df = end - s.fraction_done;
            step_bytes += df * B;
            trace.total_bytes += df * B;
            trace.total_flops += df * F;
            s.units_done += end - (s.segments_done == 0 ? s.start_fraction : 0.0);
            ++s.segments_done;
            s.layer_index = (s.layer_index + 1) % n_layers;
            s.fraction_done = 0.0;
            if (s.segments_done >= s.segments_total) {
                s.finished = true;
                s.finish_time = t + need;
                continue;
            }
            // single-level spill: surplus time advances the next layer at its
            // uncontended roofline rate, no re-arbitration within the step
            const double surplus = dt - need;
            const double F2 = flops[s.layer_index];
            const double B2 = bytes[s.layer_index];
            const double spill_rate = B2 > 0.0 ? std::min(compute, peak * F2 / B2) : compute;
            const double end2 = segment_end(s);
            const double df2 = std::min(spill_rate * surplus / F2, end2 - s.fraction_done);
            s.fraction_done += df2;
            step_bytes += df2 * B2;
            trace.total_bytes += df2 * B2;
            trace.total_flops += df2 * F2;
            if (s.fraction_done >= end2 - 1e-15) {
                s.units_done += end2;  // spill segments always start at fraction 0
                ++s.segments_done;
                s.layer_index = (s.layer_index + 1) % n_layers;
                s.fraction_done = 0.0;
                if (s.segments_done >= s.segments_total) {
                    s.finished = true;
                    s.finish_time = t + dt;
                }
            }
        }

        // sample clamped at peak; overflow bytes surface in later samples
        const double bw = step_bytes / dt;
        if (bw > peak) {
            trace.bw_samples.push_back(peak);
            carry = step_bytes - peak * dt;
        } else {
            trace.bw_samples.push_back(bw);
            carry = 0.0;
        }
        t += dt;
    }

    trace.makespan = 0.0;
    for (const PartitionState& s : states)
        trace.makespan = std::max(trace.makespan, s.finish_time);
    return trace;
}

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
    if (trace.layer_timeline.empty() && !trace.bw_samples.empty())
        throw Error("trace CSV requires a run with record_trace enabled");
    out << "# partsim trace v1\n";
    out << "# dt=" << detail::format_double(trace.dt) << "\n";
    out << "# n_partitions=" << trace.n_partitions << "\n";
    out << "# makespan=" << detail::format_double(trace.makespan) << "\n";
    out << "# total_bytes=" << detail::format_double(trace.total_bytes) << "\n";
    out << "# total_flops=" << detail::format_double(trace.total_flops) << "\n";
    out << "# contended_steps=" << trace.contended_steps << "\n";
    out << "t,aggregate_bw";
    for (std::uint64_t p = 0; p < trace.n_partitions; ++p) out << ",layer_p" << p;
    out << "\n";
    for (std::size_t k = 0; k < trace.bw_samples.size(); ++k) {
        out << detail::format_time(static_cast<double>(k) * trace.dt) << ","
            << detail::format_double(trace.bw_samples[k]);
        for (std::uint64_t p = 0; p < trace.n_partitions; ++p)
            out << "," << trace.layer_timeline[k * trace.n_partitions + p];
        out << "\n";
    }
}

SimTrace read_trace_csv(std::istream& in) {
    SimTrace trace;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    auto parse_double = [&](std::string_view v) {
        double x = 0.0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc{} || ptr != v.data() + v.size())
            throw ParseError(line_no, "bad number '" + std::string(v) + "'");
        return x;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
        if (s.empty()) continue;
        if (s.front() == '#') {
            const std::string_view body = s.substr(1);
            auto eq = body.find('=');
            if (eq == std::string_view::npos) continue;
            std::string_view key = body.substr(0, eq);
            while (!key.empty() && key.front() == ' ') key.remove_prefix(1);
            const std::string_view value = body.substr(eq + 1);
            if (key == "dt") trace.dt = parse_double(value);
            else if (key == "makespan") trace.makespan = parse_double(value);
            else if (key == "total_bytes") trace.total_bytes = parse_double(value);
            else if (key == "total_flops") trace.total_flops = parse_double(value);
            else if (key == "n_partitions") trace.n_partitions = static_cast<std::uint64_t>(parse_double(value));
            else if (key == "contended_steps") trace.contended_steps = static_cast<std::uint64_t>(parse_double(value));
            continue;
        }
        if (!header_seen) {
            if (s.rfind("t,aggregate_bw", 0) != 0)
                throw ParseError(line_no, "expected trace header");
            header_seen = true;
            continue;
        }
        std::size_t pos = s.find(',');
        if (pos == std::string_view::npos) throw ParseError(line_no, "expected at least two fields");
        std::string_view rest = s.substr(pos + 1);
        std::size_t next = rest.find(',');
        const std::string_view bw = next == std::string_view::npos ? rest : rest.substr(0, next);
        trace.bw_samples.push_back(parse_double(bw));
        while (next != std::string_view::npos) {
            rest = rest.substr(next + 1);
            next = rest.find(',');
            const std::string_view cell = next == std::string_view::npos ? rest : rest.substr(0, next);
            std::int64_t v = 0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw ParseError(line_no, "bad layer index '" + std::string(cell) + "'");
            trace.layer_timeline.push_back(v);
        }
    }
    if (!header_seen) throw ParseError(line_no, "missing trace header");
    return trace;
}

}  // namespace partsim
