#include "sempri/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sempri/semantics.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sempri {

namespace {

// Texton statistics saturate quickly; cap the dictionary corpus so training
// cost stays proportional to the sample budget, not the dataset size.
constexpr std::size_t kDictionaryImageCap = 200;
constexpr std::size_t kAlphaLogImageCap = 50;

}  // namespace

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing config file: " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError("invalid config JSON: " + std::string(e.what()));
    }

    PipelineConfig cfg;
    try {
        cfg.num_classes = j.value("num_classes", cfg.num_classes);
        cfg.superpixel_target = j.value("superpixel_target", cfg.superpixel_target);
        cfg.compactness = j.value("compactness", cfg.compactness);
        cfg.epsilon = j.value("epsilon", cfg.epsilon);
        cfg.seed = j.value("seed", cfg.seed);
        cfg.jobs = j.value("jobs", cfg.jobs);
        if (j.contains("forest")) {
            const json& f = j.at("forest");
            cfg.forest.tree_count = f.value("trees", cfg.forest.tree_count);
            cfg.forest.max_depth = f.value("max_depth", cfg.forest.max_depth);
            cfg.forest.min_leaf = f.value("min_leaf", cfg.forest.min_leaf);
            cfg.forest.features_per_split =
                f.value("features_per_split", cfg.forest.features_per_split);
        }
        if (j.contains("artifacts")) {
            const json& a = j.at("artifacts");
            cfg.prior_table_path = a.value("prior_table", cfg.prior_table_path.string());
            cfg.texton_dict_path = a.value("texton_dict", cfg.texton_dict_path.string());
            cfg.forest_path = a.value("forest", cfg.forest_path.string());
        }
    } catch (const json::exception& e) {
        throw DataError("invalid config value: " + std::string(e.what()));
    }
    if (cfg.num_classes < 2 || cfg.superpixel_target < 1 || cfg.epsilon <= 0.0) {
        throw DataError("config values out of range");
    }
    return cfg;
}

TrainedArtifacts train_pipeline(const DatasetManifest& manifest, const PipelineConfig& config,
                                const std::filesystem::path& training_set_csv) {
    if (manifest.entries.empty()) throw DataError("empty training manifest");
    log_info("training on " + std::to_string(manifest.size()) + " images (seed " +
             std::to_string(config.seed) + ")");

    TrainedArtifacts artifacts;
    artifacts.priors = train_explicit_priors(manifest, config.epsilon);
    if (artifacts.priors.num_classes != config.num_classes) {
        throw DataError("tensor class count " + std::to_string(artifacts.priors.num_classes) +
                        " does not match configured num_classes " +
                        std::to_string(config.num_classes));
    }

    std::vector<ImageBuffer> dict_images;
    const std::size_t dict_count = std::min(kDictionaryImageCap, manifest.size());
    dict_images.reserve(dict_count);
    for (std::size_t i = 0; i < dict_count; ++i) {
        dict_images.push_back(load_image(manifest.entries[i].image));
    }
    artifacts.dict = build_texton_dictionary(dict_images, config.seed);
    dict_images.clear();

    RegionTrainingOptions options;
    options.superpixel_target = config.superpixel_target;
    options.compactness = config.compactness;
    options.jobs = config.jobs;
    const std::vector<TrainingSample> samples = build_training_set(manifest, artifacts.dict,
                                                                   options);
    std::size_t salient = 0;
    for (const TrainingSample& s : samples) salient += s.target == 1.0 ? 1 : 0;
    log_info("regional training set: " + std::to_string(samples.size()) + " samples (" +
             std::to_string(salient) + " salient, " +
             std::to_string(samples.size() - salient) + " background)");
    if (!training_set_csv.empty()) {
        write_training_set_csv(samples, config.num_classes, training_set_csv);
        log_info("dumped training set to " + training_set_csv.string());
    }

    ForestParams params = config.forest;
    params.seed = config.seed;
    artifacts.forest = train_forest(samples, params, config.jobs);

    // Alpha statistics over a bounded prefix of the training set.
    const std::size_t alpha_count = std::min(kAlphaLogImageCap, manifest.size());
    double alpha_min = 1.0, alpha_max = 0.0, alpha_sum = 0.0;
    for (std::size_t i = 0; i < alpha_count; ++i) {
        const ManifestEntry& entry = manifest.entries[i];
        const ImageBuffer image = load_image(entry.image);
        const SemanticScoreMap scores = load_score_tensor(entry.tensor);
        const Segmentation seg =
            slic_segment(image, config.superpixel_target, config.compactness);
        const SaliencyMap implicit_map =
            implicit_saliency(image, scores, seg, artifacts.dict, artifacts.forest);
        const double alpha = compute_weights(implicit_map).alpha;
        alpha_min = std::min(alpha_min, alpha);
        alpha_max = std::max(alpha_max, alpha);
        alpha_sum += alpha;
    }
    std::ostringstream alpha_log;
    alpha_log << "alpha over " << alpha_count << " train images: min " << alpha_min << ", mean "
              << alpha_sum / static_cast<double>(alpha_count) << ", max " << alpha_max;
    log_info(alpha_log.str());
    return artifacts;
}

void save_artifacts(const TrainedArtifacts& artifacts, const PipelineConfig& config) {
    for (const fs::path* p :
         {&config.prior_table_path, &config.texton_dict_path, &config.forest_path}) {
        if (p->has_parent_path()) fs::create_directories(p->parent_path());
    }
    save_prior_table(artifacts.priors, config.prior_table_path);
    save_texton_dictionary(artifacts.dict, config.texton_dict_path);
    serialize_forest(artifacts.forest, config.forest_path);
}

TrainedArtifacts load_artifacts(const PipelineConfig& config) {
    TrainedArtifacts artifacts;
    artifacts.priors = load_prior_table(config.prior_table_path);
    artifacts.dict = load_texton_dictionary(config.texton_dict_path);
    artifacts.forest = load_forest(config.forest_path);
    const std::size_t expected = feature_dimension(artifacts.priors.num_classes);
    if (static_cast<std::size_t>(artifacts.forest.feature_dim) != expected) {
        throw DataError("forest feature dimension " +
                        std::to_string(artifacts.forest.feature_dim) +
                        " does not match prior table (expected " + std::to_string(expected) +
                        ")");
    }
    return artifacts;
}

InferenceResult infer_image(const ImageBuffer& image, const SemanticScoreMap& scores,
                            const TrainedArtifacts& artifacts, const PipelineConfig& config) {
    if (scores.height != image.height || scores.width != image.width) {
        throw DataError("score tensor size differs from image");
    }
    if (scores.num_classes != artifacts.priors.num_classes) {
        throw DataError("score tensor class count differs from trained priors");
    }
    InferenceResult result;
    result.seg = slic_segment(image, config.superpixel_target, config.compactness);
    const LabelMap labels = argmax_labels(scores);
    result.explicit_map = explicit_saliency(labels, artifacts.priors);
    result.implicit_map =
        implicit_saliency(image, scores, result.seg, artifacts.dict, artifacts.forest);
    result.fused = fuse(result.explicit_map, result.implicit_map);
    return result;
}

}  // namespace sempri
