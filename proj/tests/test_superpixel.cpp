#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "sempri/superpixel.hpp"
#include "test_support.hpp"

using namespace sempri;

namespace {

// Oracle: verifies cover, contiguous labels, nonempty 4-connected regions.
void check_segmentation_invariants(const Segmentation& seg) {
    REQUIRE(seg.num_regions >= 1);
    std::vector<std::int64_t> count(seg.num_regions, 0);
    for (std::int32_t l : seg.labels) {
        REQUIRE(l >= 0);
        REQUIRE(l < seg.num_regions);
        ++count[l];
    }
    std::int64_t total = 0;
    for (int q = 0; q < seg.num_regions; ++q) {
        CHECK(count[q] >= 1);
        CHECK(count[q] == static_cast<std::int64_t>(seg.region_size(q)));
        total += count[q];
    }
    CHECK(total == static_cast<std::int64_t>(seg.labels.size()));

    // flood fill from each region's first pixel must reach the whole region
    const int h = seg.height;
    const int w = seg.width;
    std::vector<std::uint8_t> seen(seg.labels.size(), 0);
    for (int q = 0; q < seg.num_regions; ++q) {
        std::vector<std::int32_t> stack = {seg.region_pixels[q][0]};
        seen[stack[0]] = 1;
        std::int64_t reached = 0;
        while (!stack.empty()) {
            const std::int32_t p = stack.back();
            stack.pop_back();
            ++reached;
            const int y = p / w;
            const int x = p % w;
            const std::int32_t neighbors[4] = {x > 0 ? p - 1 : -1, x + 1 < w ? p + 1 : -1,
                                               y > 0 ? p - w : -1, y + 1 < h ? p + w : -1};
            for (std::int32_t np : neighbors) {
                if (np >= 0 && seen[np] == 0 && seg.labels[np] == q) {
                    seen[np] = 1;
                    stack.push_back(np);
                }
            }
        }
        CHECK(reached == count[q]);
    }
}

ImageBuffer uniform_image(int h, int w, std::uint8_t value) {
    ImageBuffer img;
    img.height = h;
    img.width = w;
    img.pixels.assign(static_cast<std::size_t>(h) * w * 3, value);
    return img;
}

}  // namespace

TEST_CASE("slic with target 1 yields a single region") {
    SplitMix64 rng(21);
    const ImageBuffer img = test::random_image(24, 49, rng);
    const Segmentation seg = slic_segment(img, 1);
    CHECK(seg.num_regions == 1);
    for (std::int32_t l : seg.labels) CHECK(l == 0);
}

TEST_CASE("slic rejects out-of-range targets") {
    const ImageBuffer img = uniform_image(8, 8, 100);
    CHECK_THROWS_AS(slic_segment(img, 0), std::invalid_argument);
    CHECK_THROWS_AS(slic_segment(img, 65), std::invalid_argument);
}

TEST_CASE("slic on a uniform 120x120 image with target 4 gives quadrants") {
    const ImageBuffer img = uniform_image(120, 120, 128);
    const Segmentation seg = slic_segment(img, 4);
    check_segmentation_invariants(seg);
    REQUIRE(seg.num_regions == 4);

    for (int q = 0; q < 4; ++q) {
        const double area = static_cast<double>(seg.region_size(q));
        CHECK(area >= 0.75 * 3600.0);
        CHECK(area <= 1.25 * 3600.0);
    }
    // centroids near the quadrant centers (29.5/89.5 +- a few pixels)
    std::vector<std::pair<double, double>> centroids;
    for (int q = 0; q < 4; ++q) {
        double cx = 0, cy = 0;
        for (std::int32_t p : seg.region_pixels[q]) {
            cx += p % 120;
            cy += p / 120;
        }
        centroids.emplace_back(cx / seg.region_size(q), cy / seg.region_size(q));
    }
    std::vector<std::pair<double, double>> expected = {
        {29.5, 29.5}, {89.5, 29.5}, {29.5, 89.5}, {89.5, 89.5}};
    for (const auto& e : expected) {
        const bool found = std::any_of(centroids.begin(), centroids.end(), [&](const auto& c) {
            return std::abs(c.first - e.first) < 6.0 && std::abs(c.second - e.second) < 6.0;
        });
        CHECK(found);
    }
}

TEST_CASE("slic on a natural-statistics image keeps the region count near target") {
    SplitMix64 rng(22);
    const ImageBuffer img = test::random_image(120, 160, rng);
    const Segmentation seg = slic_segment(img, 100);
    check_segmentation_invariants(seg);
    CHECK(seg.num_regions >= 50);
    CHECK(seg.num_regions <= 150);
}

TEST_CASE("slic is deterministic") {
    SplitMix64 rng(23);
    const ImageBuffer img = test::random_image(60, 80, rng);
    const Segmentation a = slic_segment(img, 40);
    const Segmentation b = slic_segment(img, 40);
    CHECK(a.labels == b.labels);
    CHECK(a.num_regions == b.num_regions);
}

TEST_CASE("region_adjacency of a single region is empty") {
    const ImageBuffer img = uniform_image(10, 10, 50);
    const Segmentation seg = slic_segment(img, 1);
    const RegionAdjacency adj = region_adjacency(seg);
    REQUIRE(adj.size() == 1);
    CHECK(adj[0].empty());
}

TEST_CASE("region_adjacency of left/right halves is one pair") {
    std::vector<std::int32_t> labels(8 * 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) labels[y * 8 + x] = x < 4 ? 0 : 1;
    }
    const Segmentation seg = segmentation_from_labels(labels, 8, 8);
    REQUIRE(seg.num_regions == 2);
    const RegionAdjacency adj = region_adjacency(seg);
    CHECK(adj[0] == std::vector<std::int32_t>{1});
    CHECK(adj[1] == std::vector<std::int32_t>{0});
}

TEST_CASE("region_adjacency of quadrants has 4 edges, no diagonals") {
    std::vector<std::int32_t> labels(8 * 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) labels[y * 8 + x] = (y < 4 ? 0 : 2) + (x < 4 ? 0 : 1);
    }
    const Segmentation seg = segmentation_from_labels(labels, 8, 8);
    REQUIRE(seg.num_regions == 4);
    const RegionAdjacency adj = region_adjacency(seg);
    std::size_t edges = 0;
    for (const auto& list : adj) edges += list.size();
    CHECK(edges == 8);  // 4 undirected pairs
    // raster order: 0=TL, 1=TR, 2=BL, 3=BR; diagonals absent
    CHECK(std::find(adj[0].begin(), adj[0].end(), 3) == adj[0].end());
    CHECK(std::find(adj[1].begin(), adj[1].end(), 2) == adj[1].end());
}

TEST_CASE("region_adjacency matches a brute-force pixel-pair scan") {
    SplitMix64 rng(24);
    const ImageBuffer img = test::random_image(30, 40, rng);
    const Segmentation seg = slic_segment(img, 12);
    const RegionAdjacency adj = region_adjacency(seg);

    std::set<std::pair<std::int32_t, std::int32_t>> oracle;
    for (int y = 0; y < 30; ++y) {
        for (int x = 0; x < 40; ++x) {
            const std::int32_t a = seg.at(y, x);
            if (x + 1 < 40 && seg.at(y, x + 1) != a) {
                oracle.emplace(std::min(a, seg.at(y, x + 1)), std::max(a, seg.at(y, x + 1)));
            }
            if (y + 1 < 30 && seg.at(y + 1, x) != a) {
                oracle.emplace(std::min(a, seg.at(y + 1, x)), std::max(a, seg.at(y + 1, x)));
            }
        }
    }
    std::set<std::pair<std::int32_t, std::int32_t>> got;
    for (std::int32_t q = 0; q < seg.num_regions; ++q) {
        for (std::int32_t r : adj[q]) {
            CHECK(r != q);  // irreflexive
            got.emplace(std::min(q, r), std::max(q, r));
            // symmetry
            CHECK(std::find(adj[r].begin(), adj[r].end(), q) != adj[r].end());
        }
    }
    CHECK(got == oracle);
}

TEST_CASE("segmentation_from_labels splits disconnected label components") {
    // label 0 appears as two disconnected blobs -> must become two regions
    std::vector<std::int32_t> labels = {
        0, 1, 0,
        0, 1, 0,
    };
    const Segmentation seg = segmentation_from_labels(labels, 2, 3);
    CHECK(seg.num_regions == 3);
}
