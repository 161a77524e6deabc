#ifndef SEMPRI_REGION_FEATURES_HPP
#define SEMPRI_REGION_FEATURES_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "sempri/core.hpp"
#include "sempri/superpixel.hpp"

namespace sempri {

// Fixed filter bank: 2 scales x 4 orientations of even/odd pairs (16) plus a
// Gaussian and a Laplacian-of-Gaussian blob, all on grayscale. Kernels are
// L1-normalized so responses of a [0,1] image stay in [-1,1].
inline constexpr int kTextonFilterCount = 18;
inline constexpr int kTextonWords = 15;

// 15 prototype vectors in 18-dim filter-response space, learned by k-means.
struct TextonDictionary {
    std::vector<double> centers;  // kTextonWords * kTextonFilterCount
    std::uint64_t seed = 0;

    const double* center(int i) const { return centers.data() + i * kTextonFilterCount; }
};

// Regional descriptor. Layout (n_c = class count):
//   [0..1]   mean normalized centroid (x, y), pixel-center convention
//   [2..5]   normalized bbox (x_min, y_min, x_max, y_max)
//   [6]      bbox aspect ratio (normalized width / normalized height)
//   [7]      normalized perimeter (boundary pixels / 2(h+w))
//   [8]      normalized area
//   [9]      normalized area of adjacent regions, clamped to 1
//   [10..12] RGB variances        [13..15] L*a*b* variances
//   [16..18] mean RGB             [19..21] HSV variances (hue circular)
//   [22..36] 15-bin texton histogram
//   [37..36+n_c]      sp_1: region class-label histogram
//   [37+n_c..36+2n_c] sp_2: region class mass / (h*w)
struct RegionFeatureVector {
    std::vector<double> values;
};

constexpr std::size_t kSemanticFeatureOffset = 37;

constexpr std::size_t feature_dimension(int num_classes) {
    return kSemanticFeatureOffset + 2 * static_cast<std::size_t>(num_classes);
}

std::array<double, 10> geometric_features(const Segmentation& seg, const RegionAdjacency& adj,
                                          int q);
// Convenience overload computing the adjacency itself.
std::array<double, 10> geometric_features(const Segmentation& seg, int q);

std::array<double, 12> color_features(const ImageBuffer& image, const Segmentation& seg, int q);

// k-means (k=15, k-means++ init, <=50 iterations) over at most 100k pixel
// responses subsampled from the corpus. Deterministic for a fixed seed.
TextonDictionary build_texton_dictionary(const std::vector<ImageBuffer>& images,
                                         std::uint64_t seed);

// Raw 18-filter responses, (pixel, filter) layout, replicate border.
std::vector<double> texton_filter_responses(const ImageBuffer& image);

// Per-pixel nearest dictionary word (lowest index on ties).
std::vector<std::int32_t> compute_texton_map(const ImageBuffer& image,
                                             const TextonDictionary& dict);

std::array<double, kTextonWords> texton_histogram(const std::vector<std::int32_t>& texton_map,
                                                  const Segmentation& seg, int q);
// Convenience overload computing the texton map itself.
std::array<double, kTextonWords> texton_histogram(const ImageBuffer& image,
                                                  const Segmentation& seg, int q,
                                                  const TextonDictionary& dict);

// sp_1: the region's class-label histogram (sums to 1).
std::vector<double> local_semantic_feature(const LabelMap& labels, const Segmentation& seg,
                                           int q);

// sp_2: per-class score mass inside the region, normalized by image area.
std::vector<double> global_semantic_feature(const SemanticScoreMap& scores,
                                            const Segmentation& seg, int q);

RegionFeatureVector assemble_features(const ImageBuffer& image, const SemanticScoreMap& scores,
                                      const LabelMap& labels, const Segmentation& seg, int q,
                                      const TextonDictionary& dict);

// Assembles descriptors for every region, sharing the per-image precomputation
// (adjacency, color conversions, texton map).
std::vector<RegionFeatureVector> assemble_all_features(const ImageBuffer& image,
                                                       const SemanticScoreMap& scores,
                                                       const LabelMap& labels,
                                                       const Segmentation& seg,
                                                       const TextonDictionary& dict);

// Text serialization: header `TXTN 1 15 18`, 15 rows of 18 values.
void save_texton_dictionary(const TextonDictionary& dict, const std::filesystem::path& path);
TextonDictionary load_texton_dictionary(const std::filesystem::path& path);

}  // namespace sempri

#endif
