#include "sempri/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sempri/color.hpp"
#include "sempri/dataset_io.hpp"

namespace fs = std::filesystem;

namespace sempri {

namespace {

// Order-independent per-pixel hash noise in [0,1).
double hash_noise(std::uint64_t seed, std::uint64_t p) {
    std::uint64_t z = seed ^ (p * 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return ((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
}

int preferred_count(int num_classes) { return std::max(1, (num_classes - 1) / 2); }

struct Shape {
    int kind = 0;  // 0 rect, 1 circle, 2 ellipse
    int cls = 0;
    double cx = 0, cy = 0, rx = 0, ry = 0;
    bool textured = false;
    int checker = 4;

    bool covers(int x, int y) const {
        const double dx = x - cx;
        const double dy = y - cy;
        switch (kind) {
            case 0: return std::abs(dx) <= rx && std::abs(dy) <= ry;
            case 1: return dx * dx + dy * dy <= rx * rx;
            default: return dx * dx / (rx * rx) + dy * dy / (ry * ry) <= 1.0;
        }
    }
};

// Stable per-class palette, spread around the hue circle.
void class_color(int cls, double& h, double& s, double& v) {
    const double golden = 0.61803398874989485;
    h = std::fmod(cls * golden, 1.0);
    s = 0.6 + 0.25 * std::fmod(cls * 0.377, 1.0);
    v = 0.85;
}

}  // namespace

bool is_preferred_class(int k, int num_classes) {
    return k >= 1 && k <= preferred_count(num_classes);
}

SynthScene generate_scene(int width, int height, int num_classes, SplitMix64& rng) {
    if (num_classes < 3) {
        throw std::invalid_argument("synthetic scenes need num_classes >= 3");
    }
    if (width < 16 || height < 16) {
        throw std::invalid_argument("synthetic scenes need at least 16x16 pixels");
    }
    const int pref = preferred_count(num_classes);
    const int other = num_classes - 1 - pref;

    auto random_shape = [&](int cls, double lo, double hi) {
        Shape s;
        s.kind = static_cast<int>(rng.below(3));
        s.cls = cls;
        const double min_dim = std::min(width, height);
        s.cx = (0.15 + 0.7 * rng.next_double()) * width;
        s.cy = (0.15 + 0.7 * rng.next_double()) * height;
        s.rx = (lo + (hi - lo) * rng.next_double()) * min_dim;
        s.ry = (lo + (hi - lo) * rng.next_double()) * min_dim;
        if (s.kind == 1) s.ry = s.rx;
        s.textured = rng.below(2) == 1;
        s.checker = 3 + static_cast<int>(rng.below(4));
        return s;
    };

    // One preferred and one non-preferred shape always exist and are kept
    // disjoint so both classes survive occlusion; extras go underneath.
    // The salient shape is sized so objects cover roughly 10-25% of the scene.
    Shape salient = random_shape(1 + static_cast<int>(rng.below(pref)), 0.20, 0.30);
    Shape distractor =
        random_shape(1 + pref + static_cast<int>(rng.below(other)), 0.14, 0.22);
    for (int attempt = 0; attempt < 100; ++attempt) {
        const double dx = salient.cx - distractor.cx;
        const double dy = salient.cy - distractor.cy;
        const double min_gap = std::max(salient.rx, salient.ry) +
                               std::max(distractor.rx, distractor.ry) + 2.0;
        if (std::sqrt(dx * dx + dy * dy) > min_gap) break;
        distractor.cx = (0.15 + 0.7 * rng.next_double()) * width;
        distractor.cy = (0.15 + 0.7 * rng.next_double()) * height;
    }

    std::vector<Shape> shapes;
    const int extras = static_cast<int>(rng.below(3));  // 2..4 shapes total
    for (int i = 0; i < extras; ++i) {
        shapes.push_back(
            random_shape(1 + static_cast<int>(rng.below(num_classes - 1)), 0.08, 0.16));
    }
    shapes.push_back(distractor);
    shapes.push_back(salient);

    const std::uint64_t noise_seed = rng.next();
    const double bg_fx = 0.02 + 0.06 * rng.next_double();
    const double bg_fy = 0.02 + 0.06 * rng.next_double();
    const double bg_hue = rng.next_double();

    SynthScene scene;
    scene.image.height = height;
    scene.image.width = width;
    scene.image.pixels.resize(static_cast<std::size_t>(height) * width * 3);
    scene.mask.height = height;
    scene.mask.width = width;
    scene.mask.values.resize(static_cast<std::size_t>(height) * width);
    scene.scores.height = height;
    scene.scores.width = width;
    scene.scores.num_classes = num_classes;
    scene.scores.scores.resize(static_cast<std::size_t>(height) * width * num_classes);

    const float off_weight = 0.1f / static_cast<float>(num_classes - 1);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * width + x;
            int owner = 0;
            const Shape* top = nullptr;
            for (const Shape& s : shapes) {  // later shapes draw on top
                if (s.covers(x, y)) {
                    owner = s.cls;
                    top = &s;
                }
            }

            double h, s, v;
            if (top == nullptr) {
                h = bg_hue;
                s = 0.12;
                v = 0.28 +
                    0.06 * std::sin(2.0 * std::numbers::pi * (bg_fx * x + bg_fy * y)) +
                    0.04 * (hash_noise(noise_seed, p) - 0.5);
            } else {
                class_color(owner, h, s, v);
                if (top->textured) {
                    const bool cell = ((x / top->checker) + (y / top->checker)) % 2 == 0;
                    v += cell ? 0.08 : -0.08;
                }
                v += 0.02 * (hash_noise(noise_seed, p) - 0.5);
            }
            const auto rgb = hsv_to_srgb(h, s, v);
            std::uint8_t* px = scene.image.pixels.data() + 3 * p;
            px[0] = rgb[0];
            px[1] = rgb[1];
            px[2] = rgb[2];

            scene.mask.values[p] = is_preferred_class(owner, num_classes) ? 1 : 0;
            float* score = scene.scores.scores.data() + p * num_classes;
            for (int c = 0; c < num_classes; ++c) score[c] = off_weight;
            score[owner] = 0.9f;
        }
    }
    return scene;
}

fs::path generate_dataset(const SynthOptions& options, const fs::path& out_dir) {
    if (options.count < 1) throw std::invalid_argument("count must be >= 1");
    fs::create_directories(out_dir);

    SplitMix64 seeder(options.seed);
    std::ostringstream manifest;
    char name[64];
    for (int i = 0; i < options.count; ++i) {
        SplitMix64 scene_rng(seeder.next());
        const SynthScene scene =
            generate_scene(options.width, options.height, options.num_classes, scene_rng);

        std::snprintf(name, sizeof(name), "img_%04d.png", i);
        const std::string image_name = name;
        std::snprintf(name, sizeof(name), "mask_%04d.png", i);
        const std::string mask_name = name;
        std::snprintf(name, sizeof(name), "scores_%04d.spst", i);
        const std::string tensor_name = name;

        write_image(scene.image, out_dir / image_name);
        write_mask(scene.mask, out_dir / mask_name);
        write_score_tensor(scene.scores, out_dir / tensor_name);
        manifest << image_name << "\t" << mask_name << "\t" << tensor_name << "\n";
    }
    const fs::path manifest_path = out_dir / "manifest.tsv";
    atomic_write_file(manifest_path, manifest.str());
    return manifest_path;
}

}  // namespace sempri
