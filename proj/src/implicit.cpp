#include "sempri/implicit.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sempri/semantics.hpp"

namespace sempri {

std::vector<RegionLabel> label_training_regions(const Segmentation& seg,
                                                const GroundTruthMask& mask) {
    if (seg.height != mask.height || seg.width != mask.width) {
        throw DataError("segmentation and mask dimensions differ");
    }
    std::vector<RegionLabel> out(seg.num_regions);
    for (int q = 0; q < seg.num_regions; ++q) {
        std::int64_t salient = 0;
        for (std::int32_t p : seg.region_pixels[q]) salient += mask.values[p];
        const double fraction =
            static_cast<double>(salient) / static_cast<double>(seg.region_size(q));
        out[q].region = q;
        if (fraction >= 0.8) {
            out[q].kind = RegionLabelKind::Salient;
        } else if (fraction <= 0.2) {
            out[q].kind = RegionLabelKind::Background;
        } else {
            out[q].kind = RegionLabelKind::Ambiguous;
        }
    }
    return out;
}

std::vector<TrainingSample> build_training_set(const DatasetManifest& train,
                                               const TextonDictionary& dict,
                                               const RegionTrainingOptions& options) {
    std::vector<std::vector<TrainingSample>> per_image(train.entries.size());
    parallel_for(train.entries.size(), options.jobs, [&](std::size_t i) {
        const ManifestEntry& entry = train.entries[i];
        if (!entry.has_mask()) {
            throw DataError("training entry lacks a mask: " + entry.image.string());
        }
        const ImageBuffer image = load_image(entry.image);
        const SemanticScoreMap scores = load_score_tensor(entry.tensor);
        if (scores.height != image.height || scores.width != image.width) {
            throw DataError("tensor size differs from image: " + entry.tensor.string());
        }
        const GroundTruthMask mask = load_mask(entry.mask, image.height, image.width);
        const LabelMap labels = argmax_labels(scores);
        const Segmentation seg =
            slic_segment(image, options.superpixel_target, options.compactness);

        const std::vector<RegionLabel> region_labels = label_training_regions(seg, mask);
        const std::vector<RegionFeatureVector> features =
            assemble_all_features(image, scores, labels, seg, dict);
        for (int q = 0; q < seg.num_regions; ++q) {
            if (region_labels[q].kind == RegionLabelKind::Ambiguous) continue;
            TrainingSample sample;
            sample.features = features[q].values;
            sample.target = region_labels[q].kind == RegionLabelKind::Salient ? 1.0 : 0.0;
            per_image[i].push_back(std::move(sample));
        }
    });

    std::vector<TrainingSample> samples;
    for (auto& image_samples : per_image) {
        for (auto& s : image_samples) samples.push_back(std::move(s));
    }
    return samples;
}

SaliencyMap implicit_saliency(const ImageBuffer& image, const SemanticScoreMap& scores,
                              const Segmentation& seg, const TextonDictionary& dict,
                              const RegressionForest& forest) {
    const LabelMap labels = argmax_labels(scores);
    const std::vector<RegionFeatureVector> features =
        assemble_all_features(image, scores, labels, seg, dict);

    SaliencyMap map;
    map.height = seg.height;
    map.width = seg.width;
    map.role = MapRole::Implicit;
    map.values.resize(seg.labels.size());

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::vector<double> region_value(seg.num_regions);
    for (int q = 0; q < seg.num_regions; ++q) {
        region_value[q] = predict(forest, features[q].values);
        lo = std::min(lo, region_value[q]);
        hi = std::max(hi, region_value[q]);
    }
    if (hi > lo) {
        const double inv = 1.0 / (hi - lo);
        for (double& v : region_value) v = (v - lo) * inv;
    } else {
        std::fill(region_value.begin(), region_value.end(), 0.0);
    }
    for (std::size_t p = 0; p < map.values.size(); ++p) {
        map.values[p] = region_value[seg.labels[p]];
    }
    return map;
}

void write_training_set_csv(const std::vector<TrainingSample>& samples, int num_classes,
                            const std::filesystem::path& path) {
    std::ostringstream out;
    out << "centroid_x,centroid_y,bbox_x_min,bbox_y_min,bbox_x_max,bbox_y_max,bbox_aspect,"
           "perimeter,area,neighbor_area,"
           "var_r,var_g,var_b,var_lab_l,var_lab_a,var_lab_b,mean_r,mean_g,mean_b,"
           "var_hue,var_sat,var_val";
    for (int i = 0; i < kTextonWords; ++i) out << ",texton_" << i;
    for (int c = 0; c < num_classes; ++c) out << ",sp1_" << c;
    for (int c = 0; c < num_classes; ++c) out << ",sp2_" << c;
    out << ",target\n";

    char buf[48];
    for (const TrainingSample& s : samples) {
        if (s.features.size() != feature_dimension(num_classes)) {
            throw std::invalid_argument("sample dimension does not match num_classes");
        }
        for (double v : s.features) {
            std::snprintf(buf, sizeof(buf), "%.9g,", v);
            out << buf;
        }
        out << (s.target == 1.0 ? "1" : "0") << "\n";
    }
    atomic_write_file(path, out.str());
}

}  // namespace sempri
