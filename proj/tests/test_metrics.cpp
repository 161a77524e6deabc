#include <doctest.h>

#include <cmath>
#include <vector>

#include "sempri/dataset_io.hpp"
#include "sempri/metrics.hpp"
#include "test_support.hpp"

using namespace sempri;
using sempri::test::TempDir;

namespace {

GroundTruthMask make_mask(int h, int w, const std::vector<std::uint8_t>& values) {
    GroundTruthMask mask;
    mask.height = h;
    mask.width = w;
    mask.values = values;
    return mask;
}

SaliencyMap map_from_mask(const GroundTruthMask& mask) {
    SaliencyMap map;
    map.height = mask.height;
    map.width = mask.width;
    map.values.resize(mask.values.size());
    for (std::size_t i = 0; i < mask.values.size(); ++i) {
        map.values[i] = static_cast<double>(mask.values[i]);
    }
    return map;
}

// Exhaustive confusion-matrix oracle for one threshold.
void oracle_pr(const SaliencyMap& map, const GroundTruthMask& gt, int tau, double& precision,
               double& recall) {
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t p = 0; p < map.values.size(); ++p) {
        const bool pred = 255.0 * map.values[p] >= static_cast<double>(tau);
        const bool pos = gt.values[p] != 0;
        if (pred && pos) ++tp;
        if (pred && !pos) ++fp;
        if (!pred && pos) ++fn;
    }
    precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    recall = static_cast<double>(tp) / (tp + fn);
}

}  // namespace

TEST_CASE("a perfect binary detector has precision=recall=1 for tau >= 1") {
    SplitMix64 rng(91);
    const GroundTruthMask gt = test::random_mask(8, 8, rng);
    const auto curve = pr_curve(map_from_mask(gt), gt);
    CHECK(curve[0].recall == 1.0);
    for (int tau = 1; tau < 256; ++tau) {
        CHECK(curve[tau].precision == 1.0);
        CHECK(curve[tau].recall == 1.0);
    }
}

TEST_CASE("an inverted detector has zero recall for tau >= 1") {
    SplitMix64 rng(92);
    const GroundTruthMask gt = test::random_mask(8, 8, rng);
    SaliencyMap inverted = map_from_mask(gt);
    for (double& v : inverted.values) v = 1.0 - v;
    const auto curve = pr_curve(inverted, gt);
    for (int tau = 1; tau < 256; ++tau) {
        CHECK(curve[tau].recall == 0.0);
    }
    CHECK(curve[0].recall == 1.0);  // everything predicted at tau=0
}

TEST_CASE("pr_curve matches the exhaustive oracle on random pairs") {
    SplitMix64 rng(93);
    for (int trial = 0; trial < 25; ++trial) {
        const SaliencyMap map = test::random_map(4, 4, rng);
        const GroundTruthMask gt = test::random_mask(4, 4, rng);
        const auto curve = pr_curve(map, gt);
        for (int tau = 0; tau < 256; ++tau) {
            double precision, recall;
            oracle_pr(map, gt, tau, precision, recall);
            CHECK(curve[tau].threshold == tau);
            CHECK(curve[tau].precision == doctest::Approx(precision).epsilon(1e-12));
            CHECK(curve[tau].recall == doctest::Approx(recall).epsilon(1e-12));
        }
    }
}

TEST_CASE("recall is non-increasing in the threshold and anchored at 1") {
    SplitMix64 rng(94);
    const SaliencyMap map = test::random_map(12, 12, rng);
    const GroundTruthMask gt = test::random_mask(12, 12, rng);
    const auto curve = pr_curve(map, gt);
    CHECK(curve[0].recall == 1.0);
    for (int tau = 1; tau < 256; ++tau) {
        CHECK(curve[tau].recall <= curve[tau - 1].recall);
    }
}

TEST_CASE("pr_curve rejects an empty ground truth") {
    const GroundTruthMask gt = make_mask(2, 2, {0, 0, 0, 0});
    SaliencyMap map;
    map.height = 2;
    map.width = 2;
    map.values = {0.1, 0.2, 0.3, 0.4};
    CHECK_THROWS_AS(pr_curve(map, gt), DataError);
}

TEST_CASE("adaptive_threshold doubles the mean and clamps") {
    SaliencyMap map;
    map.height = 2;
    map.width = 2;
    map.values = {0.3, 0.3, 0.3, 0.3};
    CHECK(adaptive_threshold(map) == doctest::Approx(0.6).epsilon(1e-15));

    map.values = {0.6, 0.6, 0.6, 0.6};
    CHECK(adaptive_threshold(map) == 1.0);

    SplitMix64 rng(95);
    const SaliencyMap rand_map = test::random_map(9, 7, rng);
    double sum = 0.0;
    for (double v : rand_map.values) sum += v;
    CHECK(adaptive_threshold(rand_map) ==
          doctest::Approx(std::min(1.0, 2.0 * sum / rand_map.values.size())).epsilon(1e-12));
}

TEST_CASE("f_measure hand cases") {
    CHECK(f_measure(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(f_measure(0.5, 1.0) == doctest::Approx(0.65 / 1.15).epsilon(1e-15));
    CHECK(f_measure(0.0, 0.0) == 0.0);
}

TEST_CASE("f_measure is monotone in each argument") {
    SplitMix64 rng(96);
    for (int trial = 0; trial < 100; ++trial) {
        const double p = 0.05 + 0.9 * rng.next_double();
        const double r = 0.05 + 0.9 * rng.next_double();
        const double dp = 0.05 * rng.next_double();
        CHECK(f_measure(p + dp, r) >= f_measure(p, r));
        CHECK(f_measure(p, r + dp) >= f_measure(p, r));
    }
}

TEST_CASE("mae hand cases") {
    const GroundTruthMask gt = make_mask(2, 2, {0, 1, 0, 1});
    SaliencyMap map;
    map.height = 2;
    map.width = 2;

    map.values = {0.0, 1.0, 0.0, 1.0};
    CHECK(mae(map, gt) == 0.0);

    map.values = {0.5, 0.5, 0.0, 1.0};
    CHECK(mae(map, gt) == doctest::Approx(0.25).epsilon(1e-15));

    const GroundTruthMask zeros = make_mask(2, 2, {0, 0, 0, 0});
    map.values = {1.0, 1.0, 1.0, 1.0};
    CHECK(mae(map, zeros) == 1.0);
}

TEST_CASE("mae is symmetric under complement") {
    SplitMix64 rng(97);
    const SaliencyMap map = test::random_map(6, 9, rng);
    const GroundTruthMask gt = test::random_mask(6, 9, rng);

    SaliencyMap inv_map = map;
    for (double& v : inv_map.values) v = 1.0 - v;
    GroundTruthMask inv_gt = gt;
    for (auto& v : inv_gt.values) v = v != 0 ? 0 : 1;
    CHECK(mae(map, gt) == doctest::Approx(mae(inv_map, inv_gt)).epsilon(1e-12));
}

TEST_CASE("adaptive F on a perfect binary map is 1") {
    SplitMix64 rng(98);
    const GroundTruthMask gt = test::random_mask(8, 8, rng);
    const SaliencyMap map = map_from_mask(gt);
    const double tau = adaptive_threshold(map);
    std::int64_t tp = 0, fp = 0, fn = 0;
    for (std::size_t p = 0; p < map.values.size(); ++p) {
        const bool pred = map.values[p] >= tau;
        const bool pos = gt.values[p] != 0;
        tp += pred && pos;
        fp += pred && !pos;
        fn += !pred && pos;
    }
    const double precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
    const double recall = static_cast<double>(tp) / (tp + fn);
    CHECK(f_measure(precision, recall) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate_dataset aggregates per-image metrics") {
    TempDir dir("metrics");
    SplitMix64 rng(99);

    // five synthetic pairs: image files for the manifest, maps + masks on disk
    const int n = 5, h = 8, w = 8;
    std::vector<SaliencyMap> maps;
    std::vector<GroundTruthMask> gts;
    std::string manifest_text;
    SemanticScoreMap scores;
    scores.height = h;
    scores.width = w;
    scores.num_classes = 2;
    scores.scores.assign(static_cast<std::size_t>(h) * w * 2, 0.5f);
    for (int i = 0; i < n; ++i) {
        const std::string stem = "img_" + std::to_string(i);
        write_image(test::random_image(h, w, rng), dir / (stem + ".png"));
        const GroundTruthMask gt = test::random_mask(h, w, rng);
        write_mask(gt, dir / (stem + "_gt.png"));
        const SaliencyMap map = test::random_map(h, w, rng);
        write_score_tensor(scores, dir / (stem + ".spst"));
        manifest_text += stem + ".png\t" + stem + "_gt.png\t" + stem + ".spst\n";

        // evaluate_dataset reads maps from <maps_dir>/<stem>.png
        std::filesystem::create_directories(dir / "maps");
        write_saliency_map(map, dir.path() / "maps" / (stem + ".png"));
        maps.push_back(load_saliency_map(dir.path() / "maps" / (stem + ".png")));
        gts.push_back(gt);
    }
    atomic_write_file(dir / "m.tsv", manifest_text);
    const DatasetManifest manifest = parse_manifest(dir / "m.tsv", ManifestSplit::Test);
    const DatasetReport report = evaluate_dataset(dir / "maps", manifest);

    REQUIRE(report.image_count == static_cast<std::size_t>(n));

    // oracle: recompute every aggregate from the quantized maps
    double mae_sum = 0.0, p_sum = 0.0, r_sum = 0.0, f_sum = 0.0;
    std::vector<std::array<PrPoint, 256>> curves;
    for (int i = 0; i < n; ++i) {
        curves.push_back(pr_curve(maps[i], gts[i]));
        mae_sum += mae(maps[i], gts[i]);
        const double tau = adaptive_threshold(maps[i]);
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t p = 0; p < maps[i].values.size(); ++p) {
            const bool pred = maps[i].values[p] >= tau;
            const bool pos = gts[i].values[p] != 0;
            tp += pred && pos;
            fp += pred && !pos;
            fn += !pred && pos;
        }
        const double precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp);
        const double recall = static_cast<double>(tp) / (tp + fn);
        p_sum += precision;
        r_sum += recall;
        f_sum += f_measure(precision, recall);
    }
    CHECK(report.mean_mae == doctest::Approx(mae_sum / n).epsilon(1e-9));
    CHECK(report.adaptive_precision == doctest::Approx(p_sum / n).epsilon(1e-9));
    CHECK(report.adaptive_recall == doctest::Approx(r_sum / n).epsilon(1e-9));
    CHECK(report.adaptive_f == doctest::Approx(f_sum / n).epsilon(1e-9));
    for (int tau = 0; tau < 256; ++tau) {
        double pc = 0, rc = 0;
        for (int i = 0; i < n; ++i) {
            pc += curves[i][tau].precision;
            rc += curves[i][tau].recall;
        }
        CHECK(report.mean_curve[tau].precision == doctest::Approx(pc / n).epsilon(1e-9));
        CHECK(report.mean_curve[tau].recall == doctest::Approx(rc / n).epsilon(1e-9));
    }

    // single-image dataset: report equals the image's own metrics
    atomic_write_file(dir / "one.tsv", "img_0.png\timg_0_gt.png\timg_0.spst\n");
    const DatasetReport one =
        evaluate_dataset(dir / "maps", parse_manifest(dir / "one.tsv", ManifestSplit::Test));
    CHECK(one.mean_mae == doctest::Approx(mae(maps[0], gts[0])).epsilon(1e-12));

    // two images with MAE a and b -> mean (a+b)/2
    atomic_write_file(dir / "two.tsv",
                      "img_0.png\timg_0_gt.png\timg_0.spst\nimg_1.png\timg_1_gt.png\timg_1."
                      "spst\n");
    const DatasetReport two =
        evaluate_dataset(dir / "maps", parse_manifest(dir / "two.tsv", ManifestSplit::Test));
    CHECK(two.mean_mae ==
          doctest::Approx((mae(maps[0], gts[0]) + mae(maps[1], gts[1])) / 2.0).epsilon(1e-12));

    // CSV shape: 256 data rows plus the summary block
    const std::string csv = report_to_csv(report);
    CHECK(csv.find("threshold,precision,recall") != std::string::npos);
    CHECK(csv.find("adaptive_precision,adaptive_recall,f_measure,mae") != std::string::npos);
}

TEST_CASE("evaluate_dataset reports a missing map by entry") {
    TempDir dir("metrics");
    SplitMix64 rng(100);
    write_image(test::random_image(4, 4, rng), dir / "a.png");
    write_mask(test::random_mask(4, 4, rng), dir / "a_gt.png");
    SemanticScoreMap scores;
    scores.height = 4;
    scores.width = 4;
    scores.num_classes = 2;
    scores.scores.assign(32, 0.5f);
    write_score_tensor(scores, dir / "a.spst");
    atomic_write_file(dir / "m.tsv", "a.png\ta_gt.png\ta.spst\n");
    std::filesystem::create_directories(dir / "maps");

    CHECK_THROWS_WITH_AS(
        evaluate_dataset(dir / "maps", parse_manifest(dir / "m.tsv", ManifestSplit::Test)),
        doctest::Contains("a.png"), DataError);
}
