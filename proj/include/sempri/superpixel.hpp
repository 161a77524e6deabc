#ifndef SEMPRI_SUPERPIXEL_HPP
#define SEMPRI_SUPERPIXEL_HPP

#include <cstdint>
#include <vector>

#include "sempri/core.hpp"

namespace sempri {

// Oversegmentation of an image into connected, non-overlapping regions.
// Labels are contiguous in [0, num_regions) and every region is 4-connected.
struct Segmentation {
    int height = 0;
    int width = 0;
    int num_regions = 0;
    std::vector<std::int32_t> labels;                       // size = height*width
    std::vector<std::vector<std::int32_t>> region_pixels;   // raster-order pixel indices

    std::int32_t at(int y, int x) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t region_size(int q) const { return region_pixels[q].size(); }
};

// Sorted 4-adjacency neighbor lists per region (symmetric, irreflexive).
using RegionAdjacency = std::vector<std::vector<std::int32_t>>;

// SLIC oversegmentation: k-means in L*a*b*+xy with grid seeding at step
// S = sqrt(h*w/target), 10 iterations, distance d_lab + (compactness/S)*d_xy,
// then orphan components merged into the largest adjacent region and labels
// renumbered in raster order of first appearance. Deterministic.
Segmentation slic_segment(const ImageBuffer& image, int target_regions = 200,
                          double compactness = 10.0);

RegionAdjacency region_adjacency(const Segmentation& seg);

// Builds a Segmentation from an arbitrary label map: enforces 4-connectivity by
// splitting disconnected label components and renumbers in raster order.
Segmentation segmentation_from_labels(const std::vector<std::int32_t>& labels, int height,
                                      int width);

}  // namespace sempri

#endif
