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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "partsim/common.hpp"

namespace partsim {

enum class LayerKind { conv, fc, pool, bn, relu, eltwise, split };

std::optional<LayerKind> layer_kind_from_token(std::string_view token);
std::string_view to_token(LayerKind kind);

/// One CNN layer. Output shapes are given explicitly; stride/padding are not modeled.
struct LayerSpec {
    std::string name;
    LayerKind kind = LayerKind::conv;
    std::uint32_t in_h = 1, in_w = 1, in_c = 1;
    std::uint32_t out_h = 1, out_w = 1, out_c = 1;
    std::uint32_t k_h = 0, k_w = 0;  // filter window; 0 for windowless kinds
};

/// Throws Error if the layer violates a structural invariant.
void validate_layer(const LayerSpec& layer);

struct CnnModel {
    std::string name;
    std::vector<LayerSpec> layers;
};

/// Analytical per-image cost of one layer.
struct LayerCost {
    std::uint64_t flops_per_image = 0;
    std::uint64_t weight_bytes = 0;
    std::uint64_t in_act_bytes_per_image = 0;
    std::uint64_t out_act_bytes_per_image = 0;
};

/// Parses the model CSV format (header line required, `#` comments allowed).
/// Every data row becomes exactly one LayerSpec, in file order.
CnnModel parse_model(std::istream& in, std::string model_name);

/// Convenience wrapper; the model name is the file stem.
CnnModel load_model(const std::string& path);

/// Kind-specific FLOP and byte footprints. eltwise reads two inputs,
/// split writes two outputs; both are reflected in the activation bytes.
LayerCost layer_cost(const LayerSpec& layer, std::uint64_t element_size);

/// Kernel-weight bytes over total DRAM bytes across conv and fc layers,
/// assuming each weight is loaded once per pass of `batch` images.
/// Throws Error when the model has no conv/fc layer.
double weight_traffic_ratio(const CnnModel& model, std::uint64_t batch,
                            std::uint64_t element_size);

/// A shape discontinuity between consecutive rows that is not explained by
/// branch fan-out (split), merge (eltwise), or a flatten-style reshape.
struct ChainBreak {
    std::size_t index = 0;  // index of the consuming layer
    std::string detail;
};

/// Checks shape consistency of the linearized layer sequence. Discontinuities
/// at branch-concatenation boundaries (e.g. inception merges) are reported,
/// not fatal; bundled model files document their expected break count.
std::vector<ChainBreak> check_chain(const CnnModel& model);

}  // namespace partsim
