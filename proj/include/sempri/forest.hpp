#ifndef SEMPRI_FOREST_HPP
#define SEMPRI_FOREST_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "sempri/core.hpp"

namespace sempri {

struct TrainingSample {
    std::vector<double> features;
    double target = 0.0;  // 0 or 1
};

struct ForestParams {
    int tree_count = 200;
    int max_depth = 20;
    int min_leaf = 5;
    int features_per_split = 9;  // ceil(sqrt(79))
    std::uint64_t seed = 0;
};

// CART regression tree stored as a flat node array; node 0 is the root.
struct TreeNode {
    std::int32_t feature = -1;   // -1 marks a leaf
    double threshold = 0.0;      // x[feature] < threshold -> left
    double leaf_value = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;

    double predict(std::span<const double> x) const {
        std::int32_t i = 0;
        while (!nodes[i].is_leaf()) {
            i = x[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
        }
        return nodes[i].leaf_value;
    }
};

struct RegressionForest {
    ForestParams params;
    int feature_dim = 0;
    std::vector<Tree> trees;
};

// Grows params.tree_count trees on bootstrap resamples with variance-reduction
// splits over features_per_split random candidate features. Split thresholds
// are midpoints of consecutive sorted unique values; ties in reduction break
// to (lowest feature index, lowest threshold). Deterministic for a fixed seed;
// trees may be grown in parallel (per-tree seeds derived up front).
RegressionForest train_forest(const std::vector<TrainingSample>& samples,
                              const ForestParams& params, int jobs = 1);

// Mean of per-tree leaf values, clamped to [0,1].
double predict(const RegressionForest& forest, std::span<const double> features);

// Binary format: magic "SPRF", version, params block, preorder node streams.
void serialize_forest(const RegressionForest& forest, const std::filesystem::path& path);
RegressionForest load_forest(const std::filesystem::path& path);

}  // namespace sempri

#endif
