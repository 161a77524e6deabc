#ifndef SEMPRI_IMPLICIT_HPP
#define SEMPRI_IMPLICIT_HPP

#include <vector>

#include "sempri/core.hpp"
#include "sempri/dataset_io.hpp"
#include "sempri/forest.hpp"
#include "sempri/region_features.hpp"
#include "sempri/superpixel.hpp"

namespace sempri {

enum class RegionLabelKind { Background = 0, Salient = 1, Ambiguous = 2 };

struct RegionLabel {
    std::int32_t region = 0;
    RegionLabelKind kind = RegionLabelKind::Ambiguous;
};

// Labels every region against the ground truth: salient when >= 80% of its
// pixels are GT-salient, background when >= 80% are GT-background, ambiguous
// (excluded from training) otherwise.
std::vector<RegionLabel> label_training_regions(const Segmentation& seg,
                                                const GroundTruthMask& mask);

struct RegionTrainingOptions {
    int superpixel_target = 200;
    double compactness = 10.0;
    int jobs = 1;
};

// Runs the per-image pipeline (SLIC -> features -> 80% labeling) over a train
// manifest and concatenates the non-ambiguous samples in manifest order.
std::vector<TrainingSample> build_training_set(const DatasetManifest& train,
                                               const TextonDictionary& dict,
                                               const RegionTrainingOptions& options);

// Paints every pixel of region q with the forest prediction for q's features,
// then min-max normalizes (constant maps -> zeros).
SaliencyMap implicit_saliency(const ImageBuffer& image, const SemanticScoreMap& scores,
                              const Segmentation& seg, const TextonDictionary& dict,
                              const RegressionForest& forest);

// Optional dump of the regional training set: a header row naming the feature
// layout, then one row per sample with all feature columns and the target.
void write_training_set_csv(const std::vector<TrainingSample>& samples, int num_classes,
                            const std::filesystem::path& path);

}  // namespace sempri

#endif
