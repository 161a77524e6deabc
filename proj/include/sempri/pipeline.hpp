#ifndef SEMPRI_PIPELINE_HPP
#define SEMPRI_PIPELINE_HPP

#include <filesystem>

#include "sempri/core.hpp"
#include "sempri/dataset_io.hpp"
#include "sempri/explicit_prior.hpp"
#include "sempri/forest.hpp"
#include "sempri/fusion.hpp"
#include "sempri/implicit.hpp"
#include "sempri/region_features.hpp"
#include "sempri/superpixel.hpp"

namespace sempri {

// Defaults: 21 semantic classes (20 named + "others"), 200 superpixels per
// image.
struct PipelineConfig {
    int num_classes = 21;
    int superpixel_target = 200;
    double compactness = 10.0;
    double epsilon = 1e-8;
    std::uint64_t seed = 42;
    int jobs = 0;  // 0 = logical cores
    ForestParams forest;
    std::filesystem::path prior_table_path = "priors.txt";
    std::filesystem::path texton_dict_path = "textons.txt";
    std::filesystem::path forest_path = "forest.sprf";
};

// JSON config file; absent keys keep their defaults.
PipelineConfig load_config(const std::filesystem::path& path);

struct TrainedArtifacts {
    ExplicitPriorTable priors;
    TextonDictionary dict;
    RegressionForest forest;
};

// Full training: explicit priors, texton dictionary, regional training set,
// forest. Logs sample counts, alpha statistics and seeds. A non-empty
// training_set_csv dumps the regional samples before the forest is grown.
TrainedArtifacts train_pipeline(const DatasetManifest& manifest, const PipelineConfig& config,
                                const std::filesystem::path& training_set_csv = {});

void save_artifacts(const TrainedArtifacts& artifacts, const PipelineConfig& config);
TrainedArtifacts load_artifacts(const PipelineConfig& config);

struct InferenceResult {
    Segmentation seg;
    SaliencyMap explicit_map;
    SaliencyMap implicit_map;
    SaliencyMap fused;
};

// Single-image inference from a decoded image and its score tensor.
InferenceResult infer_image(const ImageBuffer& image, const SemanticScoreMap& scores,
                            const TrainedArtifacts& artifacts, const PipelineConfig& config);

}  // namespace sempri

#endif
