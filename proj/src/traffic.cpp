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

#include "partsim/traffic.hpp"

namespace partsim {

LayerTraffic layer_traffic(const LayerSpec& layer, const LayerCost& cost,
                           std::uint64_t batch, std::uint64_t llc_share,
                           const ReusePolicy& policy,
                           std::optional<std::uint64_t> prev_out_footprint) {
    (void)layer;
    LayerTraffic t;
    t.flops_total = cost.flops_per_image * batch;

    const bool weights_fit =
        policy.weight_mode == WeightMode::fit_once && cost.weight_bytes <= llc_share;
    t.weight_bytes_component = weights_fit ? cost.weight_bytes : cost.weight_bytes * batch;

    std::uint64_t in_comp = batch * cost.in_act_bytes_per_image;
    if (policy.producer_consumer && prev_out_footprint && *prev_out_footprint <= llc_share)
        in_comp = 0;

    std::uint64_t out_comp = batch * cost.out_act_bytes_per_image;
    if (!policy.write_outputs_always && out_comp <= llc_share)
        out_comp = 0;

    t.activation_bytes_component = in_comp + out_comp;
    t.bytes_total = t.weight_bytes_component + t.activation_bytes_component;
    return t;
}

std::vector<LayerTraffic> pass_traffic(const CnnModel& model, const MachineConfig& machine,
                                       const PartitionPlan& plan, const ReusePolicy& policy) {
    validate_plan(plan, machine);
    const std::uint64_t batch = batch_per_partition(plan);
    const std::uint64_t llc_share = machine.llc_bytes / plan.n_partitions;
    std::vector<LayerTraffic> traffic;
    traffic.reserve(model.layers.size());
    std::optional<std::uint64_t> prev_out;  // layer 0 reads its inputs from DRAM
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const LayerCost cost = layer_cost(model.layers[i], machine.element_size);
        LayerTraffic t = layer_traffic(model.layers[i], cost, batch, llc_share, policy, prev_out);
        t.layer_index = i;
        traffic.push_back(t);
        prev_out = batch * cost.out_act_bytes_per_image;
    }
    return traffic;
}

}  // namespace partsim
