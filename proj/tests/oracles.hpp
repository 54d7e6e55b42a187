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

// Test-only reference implementations, deliberately independent of the
// library's closed-form cost and allocation code paths.

#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "partsim/workload.hpp"

namespace oracles {

// Counts operations by walking every loop iteration a naive kernel would
// execute: two ops (multiply + accumulate) per kernel tap and output element
// for conv, one op per window element for pool, and so on.
inline std::uint64_t flops_bruteforce(const partsim::LayerSpec& l) {
    using partsim::LayerKind;
    std::uint64_t n = 0;
    switch (l.kind) {
        case LayerKind::conv:
            for (std::uint32_t oh = 0; oh < l.out_h; ++oh)
                for (std::uint32_t ow = 0; ow < l.out_w; ++ow)
                    for (std::uint32_t oc = 0; oc < l.out_c; ++oc)
                        for (std::uint32_t ic = 0; ic < l.in_c; ++ic)
                            for (std::uint32_t kh = 0; kh < l.k_h; ++kh)
                                for (std::uint32_t kw = 0; kw < l.k_w; ++kw) n += 2;
            break;
        case LayerKind::fc:
            for (std::uint32_t ic = 0; ic < l.in_c; ++ic)
                for (std::uint32_t oc = 0; oc < l.out_c; ++oc) n += 2;
            break;
        case LayerKind::pool:
            for (std::uint32_t oh = 0; oh < l.out_h; ++oh)
                for (std::uint32_t ow = 0; ow < l.out_w; ++ow)
                    for (std::uint32_t oc = 0; oc < l.out_c; ++oc)
                        for (std::uint32_t kh = 0; kh < l.k_h; ++kh)
                            for (std::uint32_t kw = 0; kw < l.k_w; ++kw) n += 1;
            break;
        case LayerKind::bn:
            for (std::uint32_t oh = 0; oh < l.out_h; ++oh)
                for (std::uint32_t ow = 0; ow < l.out_w; ++ow)
                    for (std::uint32_t oc = 0; oc < l.out_c; ++oc) n += 2;
            break;
        case LayerKind::relu:
        case LayerKind::eltwise:
        case LayerKind::split:
            for (std::uint32_t oh = 0; oh < l.out_h; ++oh)
                for (std::uint32_t ow = 0; ow < l.out_w; ++ow)
                    for (std::uint32_t oc = 0; oc < l.out_c; ++oc) n += 1;
            break;
    }
    return n;
}

// Water-filling by bisection on the level L with sum(min(d_i, L)) = peak.
inline std::vector<double> waterfill_bruteforce(std::span<const double> demands, double peak) {
    double total = 0.0;
    double max_d = 0.0;
    for (double d : demands) {
        total += d;
        max_d = std::max(max_d, d);
    }
    std::vector<double> alloc(demands.begin(), demands.end());
    if (total <= peak) return alloc;
    double lo = 0.0, hi = max_d;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        double s = 0.0;
        for (double d : demands) s += std::min(d, mid);
        (s > peak ? hi : lo) = mid;
    }
    const double level = 0.5 * (lo + hi);
    for (std::size_t i = 0; i < alloc.size(); ++i) alloc[i] = std::min(demands[i], level);
    return alloc;
}

}  // namespace oracles
