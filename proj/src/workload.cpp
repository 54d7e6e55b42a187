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

#include "partsim/workload.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

namespace partsim {

namespace {

constexpr std::string_view kHeader = "name,kind,in_h,in_w,in_c,out_h,out_w,out_c,k_h,k_w";

bool has_window(LayerKind k) {
    return k == LayerKind::conv || k == LayerKind::fc || k == LayerKind::pool;
}

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(strip(line.substr(start)));
            break;
        }
        fields.push_back(strip(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

std::uint32_t parse_u32(std::string_view field, std::size_t line_no, std::string_view what) {
    std::uint32_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw ParseError(line_no, "field '" + std::string(what) + "' is not a non-negative integer: '" +
                                      std::string(field) + "'");
    return value;
}

std::uint64_t elements(std::uint32_t h, std::uint32_t w, std::uint32_t c) {
    return std::uint64_t{h} * w * c;
}

}  // namespace

std::optional<LayerKind> layer_kind_from_token(std::string_view token) {
    if (token == "conv") return LayerKind::conv;
    if (token == "fc") return LayerKind::fc;
    if (token == "pool") return LayerKind::pool;
    if (token == "bn") return LayerKind::bn;
    if (token == "relu") return LayerKind::relu;
    if (token == "eltwise") return LayerKind::eltwise;
    if (token == "split") return LayerKind::split;
    return std::nullopt;
}

std::string_view to_token(LayerKind kind) {
    switch (kind) {
        case LayerKind::conv: return "conv";
        case LayerKind::fc: return "fc";
        case LayerKind::pool: return "pool";
        case LayerKind::bn: return "bn";
        case LayerKind::relu: return "relu";
        case LayerKind::eltwise: return "eltwise";
        case LayerKind::split: return "split";
    }
    return "?";
}

void validate_layer(const LayerSpec& layer) {
    auto fail = [&](const std::string& why) {
        throw Error("layer '" + layer.name + "': " + why);
    };
    if (layer.in_h < 1 || layer.in_w < 1 || layer.in_c < 1 ||
        layer.out_h < 1 || layer.out_w < 1 || layer.out_c < 1)
        fail("all shape fields must be >= 1");
    if (has_window(layer.kind)) {
        if (layer.k_h < 1 || layer.k_w < 1)
            fail("kind '" + std::string(to_token(layer.kind)) + "' requires k_h,k_w >= 1");
    } else if (layer.k_h != 0 || layer.k_w != 0) {
        fail("kind '" + std::string(to_token(layer.kind)) + "' requires k_h = k_w = 0");
    }
    if (layer.kind == LayerKind::fc &&
        (layer.in_h != 1 || layer.in_w != 1 || layer.out_h != 1 || layer.out_w != 1))
        fail("fc requires in_h = in_w = out_h = out_w = 1");
    if ((layer.kind == LayerKind::pool || layer.kind == LayerKind::bn ||
         layer.kind == LayerKind::relu) &&
        layer.out_c != layer.in_c)
        fail("kind '" + std::string(to_token(layer.kind)) + "' requires out_c = in_c");
}

CnnModel parse_model(std::istream& in, std::string model_name) {
    CnnModel model;
    model.name = std::move(model_name);
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = strip(line);
        if (s.empty() || s.front() == '#') continue;
        if (!header_seen) {
            if (s != kHeader)
                throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
            header_seen = true;
            continue;
        }
        auto fields = split_csv(s);
        if (fields.size() != 10)
            throw ParseError(line_no, "expected 10 comma-separated fields, got " +
                                          std::to_string(fields.size()));
        LayerSpec layer;
        layer.name = std::string(fields[0]);
        if (layer.name.empty()) throw ParseError(line_no, "empty layer name");
        auto kind = layer_kind_from_token(fields[1]);
        if (!kind) throw ParseError(line_no, "unknown kind token '" + std::string(fields[1]) + "'");
        layer.kind = *kind;
        layer.in_h = parse_u32(fields[2], line_no, "in_h");
        layer.in_w = parse_u32(fields[3], line_no, "in_w");
        layer.in_c = parse_u32(fields[4], line_no, "in_c");
        layer.out_h = parse_u32(fields[5], line_no, "out_h");
        layer.out_w = parse_u32(fields[6], line_no, "out_w");
        layer.out_c = parse_u32(fields[7], line_no, "out_c");
        layer.k_h = parse_u32(fields[8], line_no, "k_h");
        layer.k_w = parse_u32(fields[9], line_no, "k_w");
        try {
            validate_layer(layer);
        } catch (const Error& e) {
            throw ParseError(line_no, e.what());
        }
        model.layers.push_back(std::move(layer));
    }
    if (!header_seen) throw ParseError(line_no, "missing header line");
    if (model.layers.empty()) throw ParseError(line_no, "model has no layers");
    return model;
}

CnnModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open model file '" + path + "'");
    try {
        return parse_model(in, std::filesystem::path(path).stem().string());
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

LayerCost layer_cost(const LayerSpec& layer, std::uint64_t element_size) {
    LayerCost cost;
    const std::uint64_t out_elems = elements(layer.out_h, layer.out_w, layer.out_c);
    switch (layer.kind) {
        case LayerKind::conv:
            cost.flops_per_image = 2 * out_elems * layer.in_c * layer.k_h * layer.k_w;
            cost.weight_bytes =
                std::uint64_t{layer.k_h} * layer.k_w * layer.in_c * layer.out_c * element_size;
            break;
        case LayerKind::fc:
            cost.flops_per_image = 2 * std::uint64_t{layer.in_c} * layer.out_c;
            cost.weight_bytes = std::uint64_t{layer.in_c} * layer.out_c * element_size;
            break;
        case LayerKind::pool:
            cost.flops_per_image = out_elems * layer.k_h * layer.k_w;
            break;
        case LayerKind::bn:
            cost.flops_per_image = 2 * out_elems;  // scale + shift
            cost.weight_bytes = 2 * std::uint64_t{layer.out_c} * element_size;
            break;
        case LayerKind::relu:
        case LayerKind::eltwise:
        case LayerKind::split:
            cost.flops_per_image = out_elems;
            break;
    }
    cost.in_act_bytes_per_image = elements(layer.in_h, layer.in_w, layer.in_c) * element_size;
    if (layer.kind == LayerKind::eltwise) cost.in_act_bytes_per_image *= 2;  // two operands
    cost.out_act_bytes_per_image = out_elems * element_size;
    if (layer.kind == LayerKind::split) cost.out_act_bytes_per_image *= 2;  // two copies
    return cost;
}

double weight_traffic_ratio(const CnnModel& model, std::uint64_t batch,
                            std::uint64_t element_size) {
    if (batch < 1) throw Error("batch must be >= 1");
    std::uint64_t weights = 0;
    std::uint64_t acts = 0;
    bool any = false;
    for (const auto& layer : model.layers) {
        if (layer.kind != LayerKind::conv && layer.kind != LayerKind::fc) continue;
        any = true;
        const LayerCost cost = layer_cost(layer, element_size);
        weights += cost.weight_bytes;
        acts += cost.in_act_bytes_per_image + cost.out_act_bytes_per_image;
    }
    if (!any)
        throw Error("model '" + model.name + "' has no conv/fc layer; weight traffic ratio undefined");
    return static_cast<double>(weights) /
           (static_cast<double>(weights) + static_cast<double>(batch) * static_cast<double>(acts));
}

std::vector<ChainBreak> check_chain(const CnnModel& model) {
    std::vector<ChainBreak> breaks;
    const LayerSpec* last_split = nullptr;
    for (std::size_t i = 0; i + 1 < model.layers.size(); ++i) {
        const LayerSpec& prev = model.layers[i];
        const LayerSpec& next = model.layers[i + 1];
        if (prev.kind == LayerKind::split) last_split = &prev;
        // fan-out and merge points feed consumers that are not the next row
        if (prev.kind == LayerKind::split || prev.kind == LayerKind::eltwise) continue;
        auto matches = [&](const LayerSpec& from) {
            if (from.out_h == next.in_h && from.out_w == next.in_w && from.out_c == next.in_c)
                return true;
            // flatten-style reshape (e.g. pooled maps into an fc layer)
            return elements(from.out_h, from.out_w, from.out_c) ==
                   elements(next.in_h, next.in_w, next.in_c);
        };
        if (matches(prev)) continue;
        // a branch restarting from the most recent fan-out point
        if (last_split && matches(*last_split)) continue;
        std::ostringstream why;
        why << prev.name << " (" << prev.out_h << "x" << prev.out_w << "x" << prev.out_c
            << ") -> " << next.name << " (" << next.in_h << "x" << next.in_w << "x" << next.in_c
            << ")";
        breaks.push_back(ChainBreak{i + 1, why.str()});
    }
    return breaks;
}

}  // namespace partsim
