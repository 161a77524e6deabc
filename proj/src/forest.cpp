#include "sempri/forest.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

// forest files are little-endian on disk
static_assert(std::endian::native == std::endian::little);

namespace sempri {

namespace {

constexpr std::uint32_t kForestVersion = 1;

struct TreeBuilder {
    const std::vector<TrainingSample>& samples;
    const ForestParams& params;
    int feature_dim;
    SplitMix64 rng;
    Tree tree;
    std::vector<std::int32_t> feature_scratch;
    std::vector<std::pair<double, std::int32_t>> sort_scratch;

    TreeBuilder(const std::vector<TrainingSample>& s, const ForestParams& p, int dim,
                std::uint64_t seed)
        : samples(s), params(p), feature_dim(dim), rng(seed) {
        feature_scratch.resize(dim);
        for (int f = 0; f < dim; ++f) feature_scratch[f] = f;
    }

    std::int32_t build(std::vector<std::int32_t>& indices, int depth) {
        const std::int32_t idx = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();

        const std::size_t n = indices.size();
        double sum = 0.0, sum2 = 0.0;
        for (std::int32_t i : indices) {
            const double t = samples[i].target;
            sum += t;
            sum2 += t * t;
        }
        const double mean = sum / static_cast<double>(n);
        const double parent_sse = sum2 - sum * sum / static_cast<double>(n);

        auto make_leaf = [&] {
            tree.nodes[idx].feature = -1;
            tree.nodes[idx].leaf_value = mean;
            return idx;
        };
        if (depth >= params.max_depth || n < 2 * static_cast<std::size_t>(params.min_leaf) ||
            parent_sse <= 0.0) {
            return make_leaf();
        }

        // Candidate features: partial Fisher-Yates draw without replacement.
        const int m = params.features_per_split;
        for (int j = 0; j < m; ++j) {
            const int swap_with =
                j + static_cast<int>(rng.below(static_cast<std::uint64_t>(feature_dim - j)));
            std::swap(feature_scratch[j], feature_scratch[swap_with]);
        }

        double best_gain = 0.0;
        std::int32_t best_feature = -1;
        double best_threshold = 0.0;
        for (int j = 0; j < m; ++j) {
            const std::int32_t f = feature_scratch[j];
            sort_scratch.clear();
            for (std::int32_t i : indices) sort_scratch.emplace_back(samples[i].features[f], i);
            std::sort(sort_scratch.begin(), sort_scratch.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            double left_sum = 0.0, left_sum2 = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double t = samples[sort_scratch[i].second].target;
                left_sum += t;
                left_sum2 += t * t;
                if (sort_scratch[i].first == sort_scratch[i + 1].first) continue;
                const std::size_t nl = i + 1;
                const std::size_t nr = n - nl;
                if (nl < static_cast<std::size_t>(params.min_leaf) ||
                    nr < static_cast<std::size_t>(params.min_leaf)) {
                    continue;
                }
                const double right_sum = sum - left_sum;
                const double right_sum2 = sum2 - left_sum2;
                const double child_sse =
                    (left_sum2 - left_sum * left_sum / static_cast<double>(nl)) +
                    (right_sum2 - right_sum * right_sum / static_cast<double>(nr));
                const double gain = parent_sse - child_sse;
                const double threshold =
                    (sort_scratch[i].first + sort_scratch[i + 1].first) / 2.0;
                const bool better =
                    gain > best_gain ||
                    (gain == best_gain && best_feature >= 0 &&
                     (f < best_feature || (f == best_feature && threshold < best_threshold)));
                if (gain > 0.0 && better) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = threshold;
                }
            }
        }
        if (best_feature < 0) return make_leaf();

        std::vector<std::int32_t> left, right;
        left.reserve(n);
        right.reserve(n);
        for (std::int32_t i : indices) {
            (samples[i].features[best_feature] < best_threshold ? left : right).push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        tree.nodes[idx].feature = best_feature;
        tree.nodes[idx].threshold = best_threshold;
        const std::int32_t l = build(left, depth + 1);
        const std::int32_t r = build(right, depth + 1);
        tree.nodes[idx].left = l;
        tree.nodes[idx].right = r;
        return idx;
    }
};

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::filesystem::path& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in.gcount() != sizeof(T)) throw DataError("corrupt forest file: " + path.string());
    return v;
}

void write_subtree(std::ostream& out, const Tree& tree, std::int32_t idx) {
    const TreeNode& node = tree.nodes[idx];
    if (node.is_leaf()) {
        write_pod<std::uint8_t>(out, 1);
        write_pod(out, node.leaf_value);
    } else {
        write_pod<std::uint8_t>(out, 0);
        write_pod(out, static_cast<std::uint32_t>(node.feature));
        write_pod(out, node.threshold);
        write_subtree(out, tree, node.left);
        write_subtree(out, tree, node.right);
    }
}

std::int32_t read_subtree(std::istream& in, Tree& tree, int feature_dim, int depth,
                          const std::filesystem::path& path) {
    if (depth > 64) throw DataError("corrupt forest file (tree too deep): " + path.string());
    const std::uint8_t tag = read_pod<std::uint8_t>(in, path);
    const std::int32_t idx = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    if (tag == 1) {
        tree.nodes[idx].feature = -1;
        tree.nodes[idx].leaf_value = read_pod<double>(in, path);
    } else if (tag == 0) {
        const std::uint32_t feature = read_pod<std::uint32_t>(in, path);
        if (feature >= static_cast<std::uint32_t>(feature_dim)) {
            throw DataError("corrupt forest file (bad feature index): " + path.string());
        }
        tree.nodes[idx].feature = static_cast<std::int32_t>(feature);
        tree.nodes[idx].threshold = read_pod<double>(in, path);
        tree.nodes[idx].left = read_subtree(in, tree, feature_dim, depth + 1, path);
        tree.nodes[idx].right = read_subtree(in, tree, feature_dim, depth + 1, path);
    } else {
        throw DataError("corrupt forest file (bad node tag): " + path.string());
    }
    return idx;
}

}  // namespace

RegressionForest train_forest(const std::vector<TrainingSample>& samples,
                              const ForestParams& params, int jobs) {
    if (samples.size() < 2) throw DataError("forest training needs at least 2 samples");
    const int dim = static_cast<int>(samples[0].features.size());
    bool has_zero = false, has_one = false;
    for (const TrainingSample& s : samples) {
        if (static_cast<int>(s.features.size()) != dim) {
            throw DataError("training samples have inconsistent feature dimensions");
        }
        if (s.target == 0.0) {
            has_zero = true;
        } else if (s.target == 1.0) {
            has_one = true;
        } else {
            throw DataError("training targets must be 0 or 1");
        }
    }
    if (!has_zero || !has_one) {
        log_warn("forest training saw a single target value; the model will be constant");
    }
    if (params.tree_count < 1 || params.max_depth < 1 || params.min_leaf < 1 ||
        params.features_per_split < 1 || params.features_per_split > dim) {
        throw std::invalid_argument("invalid forest parameters");
    }

    RegressionForest forest;
    forest.params = params;
    forest.feature_dim = dim;
    forest.trees.resize(params.tree_count);

    SplitMix64 seeder(params.seed);
    std::vector<std::uint64_t> tree_seeds(params.tree_count);
    for (auto& s : tree_seeds) s = seeder.next();

    const std::size_t n = samples.size();
    parallel_for(static_cast<std::size_t>(params.tree_count), jobs, [&](std::size_t t) {
        TreeBuilder builder(samples, params, dim, tree_seeds[t]);
        std::vector<std::int32_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) {
            bootstrap[i] = static_cast<std::int32_t>(builder.rng.below(n));
        }
        builder.build(bootstrap, 0);
        forest.trees[t] = std::move(builder.tree);
    });
    return forest;
}

double predict(const RegressionForest& forest, std::span<const double> features) {
    if (static_cast<int>(features.size()) != forest.feature_dim) {
        throw std::invalid_argument("feature dimension mismatch");
    }
    double sum = 0.0;
    for (const Tree& tree : forest.trees) sum += tree.predict(features);
    return std::clamp(sum / static_cast<double>(forest.trees.size()), 0.0, 1.0);
}

void serialize_forest(const RegressionForest& forest, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw DataError("unwritable path: " + path.string());
        out.write("SPRF", 4);
        write_pod(out, kForestVersion);
        write_pod(out, static_cast<std::uint32_t>(forest.params.tree_count));
        write_pod(out, static_cast<std::uint32_t>(forest.params.max_depth));
        write_pod(out, static_cast<std::uint32_t>(forest.params.min_leaf));
        write_pod(out, static_cast<std::uint32_t>(forest.params.features_per_split));
        write_pod(out, forest.params.seed);
        write_pod(out, static_cast<std::uint32_t>(forest.feature_dim));
        for (const Tree& tree : forest.trees) write_subtree(out, tree, 0);
        if (!out) throw DataError("write failed: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

RegressionForest load_forest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing forest file: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "SPRF", 4) != 0) {
        throw DataError("bad magic: " + path.string());
    }
    const std::uint32_t version = read_pod<std::uint32_t>(in, path);
    if (version != kForestVersion) {
        throw DataError("unsupported forest version " + std::to_string(version) + ": " +
                        path.string());
    }
    RegressionForest forest;
    forest.params.tree_count = static_cast<int>(read_pod<std::uint32_t>(in, path));
    forest.params.max_depth = static_cast<int>(read_pod<std::uint32_t>(in, path));
    forest.params.min_leaf = static_cast<int>(read_pod<std::uint32_t>(in, path));
    forest.params.features_per_split = static_cast<int>(read_pod<std::uint32_t>(in, path));
    forest.params.seed = read_pod<std::uint64_t>(in, path);
    forest.feature_dim = static_cast<int>(read_pod<std::uint32_t>(in, path));
    if (forest.params.tree_count < 1 || forest.params.tree_count > 1000000 ||
        forest.feature_dim < 1) {
        throw DataError("corrupt forest file (bad header): " + path.string());
    }
    forest.trees.resize(forest.params.tree_count);
    for (Tree& tree : forest.trees) {
        read_subtree(in, tree, forest.feature_dim, 0, path);
    }
    if (in.peek() != std::ifstream::traits_type::eof()) {
        throw DataError("corrupt forest file (trailing bytes): " + path.string());
    }
    return forest;
}

}  // namespace sempri
