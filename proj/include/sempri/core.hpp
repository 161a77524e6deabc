#ifndef SEMPRI_CORE_HPP
#define SEMPRI_CORE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sempri {

// Raised for anything wrong with input data or files (exit code 2 in the CLI).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// 8-bit RGB image, row-major, interleaved channels.
struct ImageBuffer {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> pixels;  // size = height*width*3

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
    const std::uint8_t* rgb(int y, int x) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    std::uint8_t* rgb(int y, int x) {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
};

// Binary per-pixel annotation, values strictly 0 or 1.
struct GroundTruthMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> values;  // size = height*width

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
    std::uint8_t at(int y, int x) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

// Per-pixel class confidence tensor, (y, x, c) row-major.
// After ingestion every pixel's scores are non-negative and sum to 1.
struct SemanticScoreMap {
    int height = 0;
    int width = 0;
    int num_classes = 0;
    std::vector<float> scores;  // size = height*width*num_classes

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
    float at(int y, int x, int c) const {
        return scores[(static_cast<std::size_t>(y) * width + x) * num_classes + c];
    }
    const float* pixel(int y, int x) const {
        return scores.data() + (static_cast<std::size_t>(y) * width + x) * num_classes;
    }
    float* pixel(int y, int x) {
        return scores.data() + (static_cast<std::size_t>(y) * width + x) * num_classes;
    }
};

// Per-pixel class labels in [0, num_classes).
struct LabelMap {
    int height = 0;
    int width = 0;
    int num_classes = 0;
    std::vector<std::int32_t> labels;  // size = height*width

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
    std::int32_t at(int y, int x) const {
        return labels[static_cast<std::size_t>(y) * width + x];
    }
};

enum class MapRole { Explicit, Implicit, Fused };

// Real-valued saliency map with values in [0,1].
struct SaliencyMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;  // size = height*width
    MapRole role = MapRole::Fused;

    std::size_t pixel_count() const { return static_cast<std::size_t>(height) * width; }
    double at(int y, int x) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    double& at(int y, int x) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
};

// Deterministic 64-bit generator. All randomized stages use this instead of
// <random> distributions so results are identical across platforms and runs.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    // Uniform in [0,1).
    double next_double() { return (next() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0,n), n > 0. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold) return r % n;
        }
    }
};

// Pairwise (cascade) summation: reproducible and accurate for long vectors.
double pairwise_sum(std::span<const double> values);

// Runs fn(i) for i in [0,n) across up to `jobs` threads (jobs<=1 -> inline).
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

enum class LogLevel { Debug = 0, Info = 1, Warn = 2, Error = 3 };

// Level comes from the SEMPRI_LOG env var (debug|info|warn|error), default info.
LogLevel log_level();
void log_msg(LogLevel level, const std::string& message);
inline void log_debug(const std::string& m) { log_msg(LogLevel::Debug, m); }
inline void log_info(const std::string& m) { log_msg(LogLevel::Info, m); }
inline void log_warn(const std::string& m) { log_msg(LogLevel::Warn, m); }
inline void log_error(const std::string& m) { log_msg(LogLevel::Error, m); }

}  // namespace sempri

#endif
