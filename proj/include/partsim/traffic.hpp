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
#include <optional>
#include <vector>

#include "partsim/machine.hpp"
#include "partsim/workload.hpp"

namespace partsim {

enum class WeightMode { fit_once, reload_per_image };

/// Cache-reuse rules that turn per-layer costs into DRAM traffic.
struct ReusePolicy {
    WeightMode weight_mode = WeightMode::fit_once;
    bool producer_consumer = false;    // skip input reads when the producer's output fits
    bool write_outputs_always = true;  // if false, outputs that fit in the LLC share stay cached
};

/// DRAM traffic of one layer for a whole partition batch.
struct LayerTraffic {
    std::size_t layer_index = 0;
    std::uint64_t flops_total = 0;
    std::uint64_t bytes_total = 0;
    std::uint64_t weight_bytes_component = 0;
    std::uint64_t activation_bytes_component = 0;
};

/// Traffic of a single layer. Weights are loaded once when they fit in
/// llc_share under fit_once, otherwise once per image. prev_out_footprint is
/// the previous layer's total output footprint (batch * out_act bytes);
/// nullopt means the inputs come from DRAM unconditionally (first layer).
LayerTraffic layer_traffic(const LayerSpec& layer, const LayerCost& cost,
                           std::uint64_t batch, std::uint64_t llc_share,
                           const ReusePolicy& policy,
                           std::optional<std::uint64_t> prev_out_footprint = std::nullopt);

/// Per-layer traffic of one partition executing one pass. The LLC is
/// space-partitioned equally: llc_share = machine.llc_bytes / n_partitions.
std::vector<LayerTraffic> pass_traffic(const CnnModel& model, const MachineConfig& machine,
                                       const PartitionPlan& plan, const ReusePolicy& policy);

}  // namespace partsim
