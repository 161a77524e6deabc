#ifndef SEMPRI_TEST_SUPPORT_HPP
#define SEMPRI_TEST_SUPPORT_HPP

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sempri/core.hpp"

namespace sempri::test {

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("sempri_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline ImageBuffer random_image(int height, int width, SplitMix64& rng) {
    ImageBuffer img;
    img.height = height;
    img.width = width;
    img.pixels.resize(static_cast<std::size_t>(height) * width * 3);
    for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

inline SaliencyMap random_map(int height, int width, SplitMix64& rng) {
    SaliencyMap map;
    map.height = height;
    map.width = width;
    map.values.resize(static_cast<std::size_t>(height) * width);
    for (auto& v : map.values) v = rng.next_double();
    return map;
}

// Random mask guaranteed to contain at least one salient and one background pixel.
inline GroundTruthMask random_mask(int height, int width, SplitMix64& rng) {
    GroundTruthMask mask;
    mask.height = height;
    mask.width = width;
    mask.values.resize(static_cast<std::size_t>(height) * width);
    for (;;) {
        int ones = 0;
        for (auto& v : mask.values) {
            v = static_cast<std::uint8_t>(rng.below(2));
            ones += v;
        }
        if (ones > 0 && ones < static_cast<int>(mask.values.size())) return mask;
    }
}

inline SemanticScoreMap random_scores(int height, int width, int num_classes, SplitMix64& rng,
                                      bool normalized = true) {
    SemanticScoreMap scores;
    scores.height = height;
    scores.width = width;
    scores.num_classes = num_classes;
    scores.scores.resize(static_cast<std::size_t>(height) * width * num_classes);
    for (std::size_t p = 0; p < scores.pixel_count(); ++p) {
        float* row = scores.scores.data() + p * num_classes;
        double sum = 0.0;
        for (int c = 0; c < num_classes; ++c) {
            row[c] = static_cast<float>(0.01 + rng.next_double());
            sum += row[c];
        }
        if (normalized) {
            for (int c = 0; c < num_classes; ++c) {
                row[c] = static_cast<float>(row[c] / sum);
            }
        }
    }
    return scores;
}

inline LabelMap random_labels(int height, int width, int num_classes, SplitMix64& rng) {
    LabelMap labels;
    labels.height = height;
    labels.width = width;
    labels.num_classes = num_classes;
    labels.labels.resize(static_cast<std::size_t>(height) * width);
    for (auto& l : labels.labels) l = static_cast<std::int32_t>(rng.below(num_classes));
    return labels;
}

}  // namespace sempri::test

#endif
