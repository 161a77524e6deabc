#ifndef SEMPRI_FUSION_HPP
#define SEMPRI_FUSION_HPP

#include "sempri/core.hpp"

namespace sempri {

struct FusionWeights {
    double alpha = 0.0;  // mean of the implicit map
    double gamma = 1.0;  // 1 - alpha, exactly
};

// alpha = mean of the implicit map, gamma = 1 - alpha.
FusionWeights compute_weights(const SaliencyMap& implicit_map);

// Per-pixel affine blend alpha*explicit + gamma*implicit, no rescaling.
SaliencyMap blend(const SaliencyMap& explicit_map, const SaliencyMap& implicit_map,
                  const FusionWeights& weights);

// Min-max to [0,1] (constant maps -> zeros); then, if fewer than 10% of pixels
// reach 0.5, a monotone power-law v^g is applied with g chosen so the 90th
// percentile value maps to 0.5 (skipped when that percentile is 0).
SaliencyMap final_rescale(const SaliencyMap& map);

// Adaptive fusion: blend with computed weights, then final_rescale.
SaliencyMap fuse(const SaliencyMap& explicit_map, const SaliencyMap& implicit_map);

}  // namespace sempri

#endif
