#include "sempri/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sempri {

namespace {

void check_unit_range(const SaliencyMap& map, const char* what) {
    for (double v : map.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw std::invalid_argument(std::string(what) + " map values must lie in [0,1]");
        }
    }
}

}  // namespace

FusionWeights compute_weights(const SaliencyMap& implicit_map) {
    check_unit_range(implicit_map, "implicit");
    FusionWeights w;
    w.alpha = pairwise_sum(implicit_map.values) /
              static_cast<double>(implicit_map.pixel_count());
    w.gamma = 1.0 - w.alpha;
    return w;
}

SaliencyMap blend(const SaliencyMap& explicit_map, const SaliencyMap& implicit_map,
                  const FusionWeights& weights) {
    if (explicit_map.height != implicit_map.height ||
        explicit_map.width != implicit_map.width) {
        throw DataError("explicit and implicit map dimensions differ");
    }
    SaliencyMap out;
    out.height = explicit_map.height;
    out.width = explicit_map.width;
    out.role = MapRole::Fused;
    out.values.resize(explicit_map.values.size());
    for (std::size_t p = 0; p < out.values.size(); ++p) {
        out.values[p] =
            weights.alpha * explicit_map.values[p] + weights.gamma * implicit_map.values[p];
    }
    return out;
}

SaliencyMap final_rescale(const SaliencyMap& map) {
    SaliencyMap out = map;
    const std::size_t n = out.values.size();
    if (n == 0) return out;

    double lo = out.values[0], hi = out.values[0];
    for (double v : out.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (hi > lo) {
        const double inv = 1.0 / (hi - lo);
        for (double& v : out.values) v = (v - lo) * inv;
    } else {
        std::fill(out.values.begin(), out.values.end(), 0.0);
        return out;
    }

    std::size_t above_half = 0;
    for (double v : out.values) {
        if (v >= 0.5) ++above_half;
    }
    if (static_cast<double>(above_half) < 0.1 * static_cast<double>(n)) {
        std::vector<double> sorted(out.values);
        std::sort(sorted.begin(), sorted.end());
        const double p90 = sorted[static_cast<std::size_t>(0.9 * static_cast<double>(n - 1))];
        if (p90 > 0.0) {
            const double g = std::log(0.5) / std::log(p90);
            for (double& v : out.values) v = std::pow(v, g);
        }
    }
    return out;
}

SaliencyMap fuse(const SaliencyMap& explicit_map, const SaliencyMap& implicit_map) {
    check_unit_range(explicit_map, "explicit");
    const FusionWeights weights = compute_weights(implicit_map);
    return final_rescale(blend(explicit_map, implicit_map, weights));
}

}  // namespace sempri
