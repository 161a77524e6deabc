#include "sempri/region_features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "sempri/color.hpp"
#include "sempri/dataset_io.hpp"

namespace sempri {

namespace {

void check_region(const Segmentation& seg, int q) {
    if (q < 0 || q >= seg.num_regions) throw std::invalid_argument("region index out of range");
}

struct Kernel {
    int radius = 0;
    std::vector<double> taps;  // (2r+1)^2, row-major

    double tap(int dy, int dx) const {
        return taps[static_cast<std::size_t>(dy + radius) * (2 * radius + 1) + (dx + radius)];
    }
};

Kernel make_kernel(double sigma, const std::function<double(double, double)>& f) {
    Kernel k;
    k.radius = static_cast<int>(std::ceil(3.0 * sigma));
    const int side = 2 * k.radius + 1;
    k.taps.resize(static_cast<std::size_t>(side) * side);
    double abs_sum = 0.0;
    for (int dy = -k.radius; dy <= k.radius; ++dy) {
        for (int dx = -k.radius; dx <= k.radius; ++dx) {
            const double v = f(static_cast<double>(dx), static_cast<double>(dy));
            k.taps[static_cast<std::size_t>(dy + k.radius) * side + (dx + k.radius)] = v;
            abs_sum += std::abs(v);
        }
    }
    for (double& t : k.taps) t /= abs_sum;
    return k;
}

const std::vector<Kernel>& filter_bank() {
    static const std::vector<Kernel> bank = [] {
        std::vector<Kernel> filters;
        for (double sigma : {1.0, 2.0}) {
            const double s2 = sigma * sigma;
            for (int o = 0; o < 4; ++o) {
                const double theta = o * std::numbers::pi / 4.0;
                const double ct = std::cos(theta);
                const double st = std::sin(theta);
                // even: second derivative of a Gaussian along the orientation
                filters.push_back(make_kernel(sigma, [=](double x, double y) {
                    const double u = x * ct + y * st;
                    return (u * u / s2 - 1.0) * std::exp(-(x * x + y * y) / (2.0 * s2));
                }));
                // odd: first derivative (quadrature pair)
                filters.push_back(make_kernel(sigma, [=](double x, double y) {
                    const double u = x * ct + y * st;
                    return -u * std::exp(-(x * x + y * y) / (2.0 * s2));
                }));
            }
        }
        const double sigma = 2.0;
        const double s2 = sigma * sigma;
        filters.push_back(make_kernel(sigma, [=](double x, double y) {
            return std::exp(-(x * x + y * y) / (2.0 * s2));
        }));
        filters.push_back(make_kernel(sigma, [=](double x, double y) {
            const double r2 = x * x + y * y;
            return (r2 - 2.0 * s2) * std::exp(-r2 / (2.0 * s2));
        }));
        return filters;
    }();
    return bank;
}

int nearest_word(const double* response, const TextonDictionary& dict) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < kTextonWords; ++c) {
        const double* center = dict.center(c);
        double d = 0.0;
        for (int f = 0; f < kTextonFilterCount; ++f) {
            const double diff = response[f] - center[f];
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    return best;
}

}  // namespace

std::array<double, 10> geometric_features(const Segmentation& seg, const RegionAdjacency& adj,
                                          int q) {
    check_region(seg, q);
    const int h = seg.height;
    const int w = seg.width;
    const auto& pixels = seg.region_pixels[q];

    double cx = 0.0, cy = 0.0;
    int min_x = w, max_x = -1, min_y = h, max_y = -1;
    std::int64_t boundary = 0;
    for (std::int32_t p : pixels) {
        const int y = p / w;
        const int x = p % w;
        cx += (x + 0.5) / w;
        cy += (y + 0.5) / h;
        min_x = std::min(min_x, x);
        max_x = std::max(max_x, x);
        min_y = std::min(min_y, y);
        max_y = std::max(max_y, y);
        const bool edge = x == 0 || x + 1 == w || y == 0 || y + 1 == h ||
                          seg.labels[p - 1] != q || seg.labels[p + 1] != q ||
                          seg.labels[p - w] != q || seg.labels[p + w] != q;
        if (edge) ++boundary;
    }
    const double inv_n = 1.0 / static_cast<double>(pixels.size());
    const double area = static_cast<double>(h) * w;

    std::array<double, 10> out{};
    out[0] = cx * inv_n;
    out[1] = cy * inv_n;
    out[2] = static_cast<double>(min_x) / w;
    out[3] = static_cast<double>(min_y) / h;
    out[4] = static_cast<double>(max_x + 1) / w;
    out[5] = static_cast<double>(max_y + 1) / h;
    const double bw = out[4] - out[2];
    const double bh = out[5] - out[3];
    out[6] = bh > 0.0 ? bw / bh : 0.0;
    out[7] = static_cast<double>(boundary) / (2.0 * (h + w));
    out[8] = static_cast<double>(pixels.size()) / area;
    double neighbor_area = 0.0;
    for (std::int32_t r : adj[q]) neighbor_area += static_cast<double>(seg.region_size(r));
    out[9] = std::min(1.0, neighbor_area / area);
    return out;
}

std::array<double, 10> geometric_features(const Segmentation& seg, int q) {
    return geometric_features(seg, region_adjacency(seg), q);
}

std::array<double, 12> color_features(const ImageBuffer& image, const Segmentation& seg, int q) {
    check_region(seg, q);
    const auto& pixels = seg.region_pixels[q];

    double sum[9] = {0}, sumsq[9] = {0};
    double hue_cos = 0.0, hue_sin = 0.0;
    for (std::int32_t p : pixels) {
        const std::uint8_t* px = image.pixels.data() + 3 * static_cast<std::size_t>(p);
        const double rgb[3] = {px[0] / 255.0, px[1] / 255.0, px[2] / 255.0};
        const auto lab = srgb_to_lab(px[0], px[1], px[2]);
        const double lab_s[3] = {lab[0] / 100.0, (lab[1] + 128.0) / 255.0,
                                 (lab[2] + 128.0) / 255.0};
        const auto hsv = srgb_to_hsv(px[0], px[1], px[2]);
        const double ch[9] = {rgb[0], rgb[1], rgb[2], lab_s[0], lab_s[1], lab_s[2],
                              hsv[0],  hsv[1], hsv[2]};
        for (int i = 0; i < 9; ++i) {
            sum[i] += ch[i];
            sumsq[i] += ch[i] * ch[i];
        }
        hue_cos += std::cos(2.0 * std::numbers::pi * hsv[0]);
        hue_sin += std::sin(2.0 * std::numbers::pi * hsv[0]);
    }
    const double inv_n = 1.0 / static_cast<double>(pixels.size());
    auto variance = [&](int i) {
        const double mean = sum[i] * inv_n;
        return std::max(0.0, sumsq[i] * inv_n - mean * mean);
    };

    std::array<double, 12> out{};
    for (int i = 0; i < 3; ++i) out[i] = variance(i);          // RGB variances
    for (int i = 0; i < 3; ++i) out[3 + i] = variance(3 + i);  // Lab variances
    for (int i = 0; i < 3; ++i) out[6 + i] = sum[i] * inv_n;   // mean RGB
    const double resultant =
        std::sqrt(hue_cos * hue_cos + hue_sin * hue_sin) * inv_n;
    out[9] = std::clamp(1.0 - resultant, 0.0, 1.0);  // circular hue variance
    out[10] = variance(7);
    out[11] = variance(8);
    return out;
}

std::vector<double> texton_filter_responses(const ImageBuffer& image) {
    const int h = image.height;
    const int w = image.width;
    std::vector<double> luma(static_cast<std::size_t>(h) * w);
    for (std::size_t p = 0; p < luma.size(); ++p) {
        const std::uint8_t* px = image.pixels.data() + 3 * p;
        luma[p] = srgb_luma(px[0], px[1], px[2]);
    }

    const auto& bank = filter_bank();
    std::vector<double> responses(luma.size() * kTextonFilterCount);
    for (int f = 0; f < kTextonFilterCount; ++f) {
        const Kernel& k = bank[f];
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int dy = -k.radius; dy <= k.radius; ++dy) {
                    const int yy = std::clamp(y + dy, 0, h - 1);
                    const double* row = luma.data() + static_cast<std::size_t>(yy) * w;
                    for (int dx = -k.radius; dx <= k.radius; ++dx) {
                        const int xx = std::clamp(x + dx, 0, w - 1);
                        acc += k.tap(dy, dx) * row[xx];
                    }
                }
                responses[(static_cast<std::size_t>(y) * w + x) * kTextonFilterCount + f] = acc;
            }
        }
    }
    return responses;
}

TextonDictionary build_texton_dictionary(const std::vector<ImageBuffer>& images,
                                         std::uint64_t seed) {
    if (images.empty()) throw std::invalid_argument("texton dictionary needs at least one image");
    constexpr std::size_t kMaxSamples = 100000;

    std::uint64_t total = 0;
    for (const ImageBuffer& img : images) total += img.pixel_count();

    SplitMix64 rng(seed);
    std::vector<std::uint64_t> chosen;
    if (total <= kMaxSamples) {
        chosen.resize(total);
        for (std::uint64_t i = 0; i < total; ++i) chosen[i] = i;
    } else {
        // Floyd's algorithm: kMaxSamples distinct indices out of [0, total).
        std::unordered_set<std::uint64_t> set;
        set.reserve(kMaxSamples * 2);
        for (std::uint64_t j = total - kMaxSamples; j < total; ++j) {
            const std::uint64_t t = rng.below(j + 1);
            set.insert(set.count(t) != 0 ? j : t);
        }
        chosen.assign(set.begin(), set.end());
        std::sort(chosen.begin(), chosen.end());
    }

    std::vector<double> samples;
    samples.reserve(chosen.size() * kTextonFilterCount);
    std::size_t cursor = 0;
    std::uint64_t offset = 0;
    for (const ImageBuffer& img : images) {
        const std::uint64_t count = img.pixel_count();
        if (cursor < chosen.size() && chosen[cursor] < offset + count) {
            const std::vector<double> resp = texton_filter_responses(img);
            while (cursor < chosen.size() && chosen[cursor] < offset + count) {
                const std::size_t p = static_cast<std::size_t>(chosen[cursor] - offset);
                const double* r = resp.data() + p * kTextonFilterCount;
                samples.insert(samples.end(), r, r + kTextonFilterCount);
                ++cursor;
            }
        }
        offset += count;
    }
    const std::size_t n = samples.size() / kTextonFilterCount;

    auto dist2 = [&](std::size_t i, const double* center) {
        const double* s = samples.data() + i * kTextonFilterCount;
        double d = 0.0;
        for (int f = 0; f < kTextonFilterCount; ++f) {
            const double diff = s[f] - center[f];
            d += diff * diff;
        }
        return d;
    };

    TextonDictionary dict;
    dict.seed = seed;
    dict.centers.assign(static_cast<std::size_t>(kTextonWords) * kTextonFilterCount, 0.0);

    // k-means++ seeding
    std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = static_cast<std::size_t>(rng.below(n));
        std::copy_n(samples.data() + first * kTextonFilterCount, kTextonFilterCount,
                    dict.centers.begin());
    }
    for (int c = 1; c < kTextonWords; ++c) {
        const double* prev = dict.center(c - 1);
        double total_d2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            min_d2[i] = std::min(min_d2[i], dist2(i, prev));
            total_d2 += min_d2[i];
        }
        std::size_t pick;
        if (total_d2 <= 0.0) {
            pick = static_cast<std::size_t>(rng.below(n));
        } else {
            const double r = rng.next_double() * total_d2;
            double cum = 0.0;
            pick = n - 1;
            for (std::size_t i = 0; i < n; ++i) {
                cum += min_d2[i];
                if (cum > r) {
                    pick = i;
                    break;
                }
            }
        }
        std::copy_n(samples.data() + pick * kTextonFilterCount, kTextonFilterCount,
                    dict.centers.begin() + static_cast<std::size_t>(c) * kTextonFilterCount);
    }

    // Lloyd iterations
    std::vector<std::int32_t> assignment(n, -1);
    for (int iter = 0; iter < 50; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            const std::int32_t word =
                nearest_word(samples.data() + i * kTextonFilterCount, dict);
            if (word != assignment[i]) {
                assignment[i] = word;
                changed = true;
            }
        }
        if (!changed) break;
        std::vector<double> sums(dict.centers.size(), 0.0);
        std::vector<std::int64_t> counts(kTextonWords, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const double* s = samples.data() + i * kTextonFilterCount;
            double* dst = sums.data() +
                          static_cast<std::size_t>(assignment[i]) * kTextonFilterCount;
            for (int f = 0; f < kTextonFilterCount; ++f) dst[f] += s[f];
            ++counts[assignment[i]];
        }
        for (int c = 0; c < kTextonWords; ++c) {
            if (counts[c] == 0) continue;  // empty word keeps its center
            const double inv = 1.0 / counts[c];
            for (int f = 0; f < kTextonFilterCount; ++f) {
                dict.centers[static_cast<std::size_t>(c) * kTextonFilterCount + f] =
                    sums[static_cast<std::size_t>(c) * kTextonFilterCount + f] * inv;
            }
        }
    }
    return dict;
}

std::vector<std::int32_t> compute_texton_map(const ImageBuffer& image,
                                             const TextonDictionary& dict) {
    const std::vector<double> resp = texton_filter_responses(image);
    std::vector<std::int32_t> map(image.pixel_count());
    for (std::size_t p = 0; p < map.size(); ++p) {
        map[p] = nearest_word(resp.data() + p * kTextonFilterCount, dict);
    }
    return map;
}

std::array<double, kTextonWords> texton_histogram(const std::vector<std::int32_t>& texton_map,
                                                  const Segmentation& seg, int q) {
    check_region(seg, q);
    std::array<double, kTextonWords> hist{};
    const auto& pixels = seg.region_pixels[q];
    if (pixels.empty()) return hist;
    for (std::int32_t p : pixels) hist[texton_map[p]] += 1.0;
    for (double& v : hist) v /= static_cast<double>(pixels.size());
    return hist;
}

std::array<double, kTextonWords> texton_histogram(const ImageBuffer& image,
                                                  const Segmentation& seg, int q,
                                                  const TextonDictionary& dict) {
    return texton_histogram(compute_texton_map(image, dict), seg, q);
}

std::vector<double> local_semantic_feature(const LabelMap& labels, const Segmentation& seg,
                                           int q) {
    check_region(seg, q);
    std::vector<double> hist(labels.num_classes, 0.0);
    const auto& pixels = seg.region_pixels[q];
    for (std::int32_t p : pixels) hist[labels.labels[p]] += 1.0;
    for (double& v : hist) v /= static_cast<double>(pixels.size());
    return hist;
}

std::vector<double> global_semantic_feature(const SemanticScoreMap& scores,
                                            const Segmentation& seg, int q) {
    check_region(seg, q);
    std::vector<double> mass(scores.num_classes, 0.0);
    for (std::int32_t p : seg.region_pixels[q]) {
        const float* row = scores.scores.data() + static_cast<std::size_t>(p) * scores.num_classes;
        for (int c = 0; c < scores.num_classes; ++c) mass[c] += row[c];
    }
    const double inv_area = 1.0 / (static_cast<double>(scores.height) * scores.width);
    for (double& v : mass) v *= inv_area;
    return mass;
}

namespace {

RegionFeatureVector assemble_one(const ImageBuffer& image, const SemanticScoreMap& scores,
                                 const LabelMap& labels, const Segmentation& seg, int q,
                                 const RegionAdjacency& adj,
                                 const std::vector<std::int32_t>& texton_map) {
    RegionFeatureVector fv;
    fv.values.reserve(feature_dimension(scores.num_classes));
    const auto geo = geometric_features(seg, adj, q);
    fv.values.insert(fv.values.end(), geo.begin(), geo.end());
    const auto col = color_features(image, seg, q);
    fv.values.insert(fv.values.end(), col.begin(), col.end());
    const auto tex = texton_histogram(texton_map, seg, q);
    fv.values.insert(fv.values.end(), tex.begin(), tex.end());
    const auto sp1 = local_semantic_feature(labels, seg, q);
    fv.values.insert(fv.values.end(), sp1.begin(), sp1.end());
    const auto sp2 = global_semantic_feature(scores, seg, q);
    fv.values.insert(fv.values.end(), sp2.begin(), sp2.end());
    return fv;
}

void check_consistent(const ImageBuffer& image, const SemanticScoreMap& scores,
                      const LabelMap& labels, const Segmentation& seg) {
    if (image.height != seg.height || image.width != seg.width ||
        scores.height != seg.height || scores.width != seg.width ||
        labels.height != seg.height || labels.width != seg.width ||
        labels.num_classes != scores.num_classes) {
        throw std::invalid_argument("feature inputs are dimensionally inconsistent");
    }
}

}  // namespace

RegionFeatureVector assemble_features(const ImageBuffer& image, const SemanticScoreMap& scores,
                                      const LabelMap& labels, const Segmentation& seg, int q,
                                      const TextonDictionary& dict) {
    check_consistent(image, scores, labels, seg);
    return assemble_one(image, scores, labels, seg, q, region_adjacency(seg),
                        compute_texton_map(image, dict));
}

std::vector<RegionFeatureVector> assemble_all_features(const ImageBuffer& image,
                                                       const SemanticScoreMap& scores,
                                                       const LabelMap& labels,
                                                       const Segmentation& seg,
                                                       const TextonDictionary& dict) {
    check_consistent(image, scores, labels, seg);
    const RegionAdjacency adj = region_adjacency(seg);
    const std::vector<std::int32_t> texton_map = compute_texton_map(image, dict);
    std::vector<RegionFeatureVector> out;
    out.reserve(seg.num_regions);
    for (int q = 0; q < seg.num_regions; ++q) {
        out.push_back(assemble_one(image, scores, labels, seg, q, adj, texton_map));
    }
    return out;
}

void save_texton_dictionary(const TextonDictionary& dict, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "TXTN 1 " << kTextonWords << " " << kTextonFilterCount << "\n";
    char buf[64];
    for (int c = 0; c < kTextonWords; ++c) {
        for (int f = 0; f < kTextonFilterCount; ++f) {
            std::snprintf(buf, sizeof(buf), "%.17g", dict.center(c)[f]);
            out << buf << (f + 1 == kTextonFilterCount ? "\n" : " ");
        }
    }
    atomic_write_file(path, out.str());
}

TextonDictionary load_texton_dictionary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("missing texton dictionary: " + path.string());
    std::string magic;
    int version = 0, words = 0, filters = 0;
    if (!(in >> magic >> version >> words >> filters) || magic != "TXTN" || version != 1 ||
        words != kTextonWords || filters != kTextonFilterCount) {
        throw DataError("corrupt texton dictionary header: " + path.string());
    }
    TextonDictionary dict;
    dict.centers.resize(static_cast<std::size_t>(kTextonWords) * kTextonFilterCount);
    for (double& v : dict.centers) {
        if (!(in >> v)) throw DataError("corrupt texton dictionary payload: " + path.string());
    }
    return dict;
}

}  // namespace sempri
