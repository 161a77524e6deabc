#ifndef SEMPRI_SYNTH_HPP
#define SEMPRI_SYNTH_HPP

#include <cstdint>
#include <filesystem>

#include "sempri/core.hpp"

namespace sempri {

// Desk-scale verification data: scenes of 2-4 colored/textured shapes on a
// textured background. Each shape carries a synthetic class; classes in
// 1..(n_c-1)/2 are "preferred" and their shapes form the ground truth. Score
// tensors put weight 0.9 on the owning class and spread the rest uniformly.
struct SynthOptions {
    int count = 10;
    int width = 160;
    int height = 120;
    int num_classes = 21;
    std::uint64_t seed = 0;
};

struct SynthScene {
    ImageBuffer image;
    GroundTruthMask mask;
    SemanticScoreMap scores;
};

// The fixed class-preference rule deciding which shapes are salient.
bool is_preferred_class(int k, int num_classes);

SynthScene generate_scene(int width, int height, int num_classes, SplitMix64& rng);

// Writes img_NNNN.png / mask_NNNN.png / scores_NNNN.spst per scene plus a
// manifest.tsv; returns the manifest path. Fully seeded and reproducible.
std::filesystem::path generate_dataset(const SynthOptions& options,
                                       const std::filesystem::path& out_dir);

}  // namespace sempri

#endif
