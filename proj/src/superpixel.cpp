#include "sempri/superpixel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sempri/color.hpp"

namespace sempri {

namespace {

struct Components {
    std::vector<std::int32_t> comp;      // per pixel component id
    std::vector<std::int32_t> label;     // per component: source label
    std::vector<std::int64_t> size;      // per component: pixel count
};

// 4-connected components of a label map, ids assigned in raster order.
Components find_components(const std::vector<std::int32_t>& labels, int h, int w) {
    Components out;
    out.comp.assign(labels.size(), -1);
    std::vector<std::int32_t> stack;
    for (std::size_t start = 0; start < labels.size(); ++start) {
        if (out.comp[start] != -1) continue;
        const std::int32_t id = static_cast<std::int32_t>(out.label.size());
        const std::int32_t lab = labels[start];
        out.label.push_back(lab);
        out.size.push_back(0);
        stack.clear();
        stack.push_back(static_cast<std::int32_t>(start));
        out.comp[start] = id;
        while (!stack.empty()) {
            const std::int32_t p = stack.back();
            stack.pop_back();
            ++out.size[id];
            const int y = p / w;
            const int x = p % w;
            const std::int32_t neighbors[4] = {
                x > 0 ? p - 1 : -1,
                x + 1 < w ? p + 1 : -1,
                y > 0 ? p - w : -1,
                y + 1 < h ? p + w : -1,
            };
            for (std::int32_t np : neighbors) {
                if (np >= 0 && out.comp[np] == -1 && labels[np] == lab) {
                    out.comp[np] = id;
                    stack.push_back(np);
                }
            }
        }
    }
    return out;
}

// Renumbers labels to contiguous [0, n_r) in raster order of first appearance
// and collects per-region pixel lists.
Segmentation finalize_segmentation(std::vector<std::int32_t> labels, int h, int w) {
    std::int32_t max_label = 0;
    for (std::int32_t l : labels) max_label = std::max(max_label, l);
    std::vector<std::int32_t> remap(static_cast<std::size_t>(max_label) + 1, -1);

    Segmentation seg;
    seg.height = h;
    seg.width = w;
    std::int32_t next = 0;
    for (std::size_t p = 0; p < labels.size(); ++p) {
        std::int32_t& m = remap[labels[p]];
        if (m == -1) m = next++;
        labels[p] = m;
    }
    seg.num_regions = next;
    seg.region_pixels.resize(next);
    for (std::size_t p = 0; p < labels.size(); ++p) {
        seg.region_pixels[labels[p]].push_back(static_cast<std::int32_t>(p));
    }
    seg.labels = std::move(labels);
    return seg;
}

struct ClusterCenter {
    double l = 0, a = 0, b = 0, x = 0, y = 0;
};

}  // namespace

Segmentation slic_segment(const ImageBuffer& image, int target_regions, double compactness) {
    const int h = image.height;
    const int w = image.width;
    const std::int64_t n = static_cast<std::int64_t>(h) * w;
    if (target_regions < 1 || target_regions > n) {
        throw std::invalid_argument("target_regions out of range [1, h*w]");
    }

    std::vector<double> lab(static_cast<std::size_t>(n) * 3);
    for (std::int64_t p = 0; p < n; ++p) {
        const std::uint8_t* px = image.pixels.data() + 3 * p;
        const auto v = srgb_to_lab(px[0], px[1], px[2]);
        lab[3 * p] = v[0];
        lab[3 * p + 1] = v[1];
        lab[3 * p + 2] = v[2];
    }

    const double step = std::sqrt(static_cast<double>(n) / target_regions);
    const int ny = std::max<int>(1, static_cast<int>(std::lround(
                                        std::sqrt(static_cast<double>(target_regions) * h / w))));
    const int nx = std::max<int>(1, static_cast<int>(std::lround(
                                        static_cast<double>(target_regions) / ny)));

    std::vector<ClusterCenter> centers;
    centers.reserve(static_cast<std::size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            ClusterCenter c;
            c.x = (ix + 0.5) * (static_cast<double>(w) / nx) - 0.5;
            c.y = (iy + 0.5) * (static_cast<double>(h) / ny) - 0.5;
            const int sx = std::clamp(static_cast<int>(std::lround(c.x)), 0, w - 1);
            const int sy = std::clamp(static_cast<int>(std::lround(c.y)), 0, h - 1);
            const std::size_t p = static_cast<std::size_t>(sy) * w + sx;
            c.l = lab[3 * p];
            c.a = lab[3 * p + 1];
            c.b = lab[3 * p + 2];
            centers.push_back(c);
        }
    }

    const double spatial_weight = compactness / step;
    // Window half-widths: at least the seed spacing so every pixel is covered.
    const double hwx = std::max(step, static_cast<double>(w) / nx);
    const double hwy = std::max(step, static_cast<double>(h) / ny);

    std::vector<std::int32_t> labels(static_cast<std::size_t>(n), -1);
    std::vector<double> best(static_cast<std::size_t>(n));

    for (int iter = 0; iter < 10; ++iter) {
        std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
        std::fill(labels.begin(), labels.end(), -1);
        for (std::size_t k = 0; k < centers.size(); ++k) {
            const ClusterCenter& c = centers[k];
            const int x0 = std::max(0, static_cast<int>(std::floor(c.x - hwx)));
            const int x1 = std::min(w - 1, static_cast<int>(std::ceil(c.x + hwx)));
            const int y0 = std::max(0, static_cast<int>(std::floor(c.y - hwy)));
            const int y1 = std::min(h - 1, static_cast<int>(std::ceil(c.y + hwy)));
            for (int y = y0; y <= y1; ++y) {
                const double dy = y - c.y;
                for (int x = x0; x <= x1; ++x) {
                    const std::size_t p = static_cast<std::size_t>(y) * w + x;
                    const double dl = lab[3 * p] - c.l;
                    const double da = lab[3 * p + 1] - c.a;
                    const double db = lab[3 * p + 2] - c.b;
                    const double dx = x - c.x;
                    const double d = std::sqrt(dl * dl + da * da + db * db) +
                                     spatial_weight * std::sqrt(dx * dx + dy * dy);
                    if (d < best[p]) {
                        best[p] = d;
                        labels[p] = static_cast<std::int32_t>(k);
                    }
                }
            }
        }

        // centers can drift; any pixel every window missed falls back to a
        // global nearest-center scan
        for (std::int64_t p = 0; p < n; ++p) {
            if (labels[p] != -1) continue;
            const int y = static_cast<int>(p / w);
            const int x = static_cast<int>(p % w);
            for (std::size_t k = 0; k < centers.size(); ++k) {
                const ClusterCenter& c = centers[k];
                const double dl = lab[3 * p] - c.l;
                const double da = lab[3 * p + 1] - c.a;
                const double db = lab[3 * p + 2] - c.b;
                const double dx = x - c.x;
                const double dy = y - c.y;
                const double d = std::sqrt(dl * dl + da * da + db * db) +
                                 spatial_weight * std::sqrt(dx * dx + dy * dy);
                if (d < best[p]) {
                    best[p] = d;
                    labels[p] = static_cast<std::int32_t>(k);
                }
            }
        }

        std::vector<ClusterCenter> sums(centers.size());
        std::vector<std::int64_t> counts(centers.size(), 0);
        for (std::int64_t p = 0; p < n; ++p) {
            const std::int32_t k = labels[p];
            sums[k].l += lab[3 * p];
            sums[k].a += lab[3 * p + 1];
            sums[k].b += lab[3 * p + 2];
            sums[k].x += p % w;
            sums[k].y += p / w;
            ++counts[k];
        }
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (counts[k] == 0) continue;  // empty cluster keeps its center
            const double inv = 1.0 / counts[k];
            centers[k] = {sums[k].l * inv, sums[k].a * inv, sums[k].b * inv,
                          sums[k].x * inv, sums[k].y * inv};
        }
    }

    // Orphan components (not the largest blob of their cluster) merge into the
    // largest adjacent region; passes repeat until everything is resolved.
    Components comps = find_components(labels, h, w);
    const std::size_t n_comp = comps.label.size();

    std::vector<std::vector<std::int32_t>> comp_adj(n_comp);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t p = static_cast<std::size_t>(y) * w + x;
            if (x + 1 < w && comps.comp[p] != comps.comp[p + 1]) {
                comp_adj[comps.comp[p]].push_back(comps.comp[p + 1]);
                comp_adj[comps.comp[p + 1]].push_back(comps.comp[p]);
            }
            if (y + 1 < h && comps.comp[p] != comps.comp[p + w]) {
                comp_adj[comps.comp[p]].push_back(comps.comp[p + w]);
                comp_adj[comps.comp[p + w]].push_back(comps.comp[p]);
            }
        }
    }
    for (auto& adj : comp_adj) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }

    std::vector<std::int32_t> main_comp(centers.size(), -1);
    for (std::size_t c = 0; c < n_comp; ++c) {
        std::int32_t& m = main_comp[comps.label[c]];
        if (m == -1 || comps.size[c] > comps.size[m]) m = static_cast<std::int32_t>(c);
    }

    std::vector<std::uint8_t> resolved(n_comp, 0);
    std::vector<std::int32_t> final_label(n_comp, -1);
    std::vector<std::int64_t> region_area(centers.size(), 0);
    std::size_t unresolved = n_comp;
    for (std::size_t c = 0; c < n_comp; ++c) {
        if (main_comp[comps.label[c]] == static_cast<std::int32_t>(c)) {
            resolved[c] = 1;
            final_label[c] = comps.label[c];
            region_area[comps.label[c]] = comps.size[c];
            --unresolved;
        }
    }
    while (unresolved > 0) {
        const std::vector<std::uint8_t> resolved_snap = resolved;
        const std::vector<std::int64_t> area_snap = region_area;
        bool progress = false;
        for (std::size_t c = 0; c < n_comp; ++c) {
            if (resolved[c] != 0) continue;
            std::int32_t best_label = -1;
            std::int64_t best_area = -1;
            for (std::int32_t a : comp_adj[c]) {
                if (resolved_snap[a] == 0) continue;
                const std::int32_t la = final_label[a];
                if (area_snap[la] > best_area ||
                    (area_snap[la] == best_area && la < best_label)) {
                    best_area = area_snap[la];
                    best_label = la;
                }
            }
            if (best_label >= 0) {
                final_label[c] = best_label;
                resolved[c] = 1;
                region_area[best_label] += comps.size[c];
                --unresolved;
                progress = true;
            }
        }
        if (!progress) throw std::logic_error("slic: orphan merge did not converge");
    }

    for (std::int64_t p = 0; p < n; ++p) labels[p] = final_label[comps.comp[p]];
    return finalize_segmentation(std::move(labels), h, w);
}

RegionAdjacency region_adjacency(const Segmentation& seg) {
    RegionAdjacency adj(seg.num_regions);
    const int h = seg.height;
    const int w = seg.width;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::int32_t a = seg.at(y, x);
            if (x + 1 < w) {
                const std::int32_t b = seg.at(y, x + 1);
                if (a != b) {
                    adj[a].push_back(b);
                    adj[b].push_back(a);
                }
            }
            if (y + 1 < h) {
                const std::int32_t b = seg.at(y + 1, x);
                if (a != b) {
                    adj[a].push_back(b);
                    adj[b].push_back(a);
                }
            }
        }
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

Segmentation segmentation_from_labels(const std::vector<std::int32_t>& labels, int height,
                                      int width) {
    if (labels.size() != static_cast<std::size_t>(height) * width) {
        throw std::invalid_argument("label buffer size mismatch");
    }
    Components comps = find_components(labels, height, width);
    return finalize_segmentation(std::move(comps.comp), height, width);
}

}  // namespace sempri
